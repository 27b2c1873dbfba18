#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace seqlcd::detail {

/// Splits one comma-separated line; no quoting (all our CSVs are numeric).
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads all non-empty lines, dropping the first one (header).
std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& path);

double parse_double(const std::string& field);
long long parse_int(const std::string& field);

std::ofstream open_for_write(const std::filesystem::path& path);
std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace seqlcd::detail
