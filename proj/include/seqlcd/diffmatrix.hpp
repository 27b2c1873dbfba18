#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seqlcd/descriptor.hpp"

namespace seqlcd {

/// Half-open interval of query (column) indices.
struct ColumnRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  bool empty() const noexcept { return end <= begin; }
};

/// Reference x query matrix of Euclidean distances. Entries are filled on
/// demand and tracked explicitly: an uncomputed entry is never read as 0.
class DifferenceMatrix {
 public:
  using Storage = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DifferenceMatrix() = default;
  DifferenceMatrix(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const noexcept { return data_.rows(); }
  Eigen::Index cols() const noexcept { return data_.cols(); }

  bool in_bounds(Eigen::Index i, Eigen::Index j) const noexcept {
    return i >= 0 && j >= 0 && i < rows() && j < cols();
  }
  bool is_computed(Eigen::Index i, Eigen::Index j) const noexcept {
    return valid_[static_cast<std::size_t>(i * cols() + j)] != 0;
  }
  /// True when every entry of column j is computed.
  bool column_computed(Eigen::Index j) const noexcept { return col_count_[static_cast<std::size_t>(j)] == rows(); }
  std::vector<Eigen::Index> computed_columns() const;
  Eigen::Index computed_entries() const noexcept { return computed_; }

  /// Checked access: RangeOutOfBounds or UncomputedEntry.
  float entry(Eigen::Index i, Eigen::Index j) const;
  float unchecked(Eigen::Index i, Eigen::Index j) const noexcept { return data_(i, j); }

  /// Stores a value and marks it computed. Returns true if it was new.
  bool set(Eigen::Index i, Eigen::Index j, float value) noexcept;

  /// Entries; uncomputed positions hold NaN.
  const Storage& data() const noexcept { return data_; }

 private:
  Storage data_;
  std::vector<std::uint8_t> valid_;
  std::vector<Eigen::Index> col_count_;
  Eigen::Index computed_ = 0;
};

/// D(i, j) = |reference_i - query_j|, stored as float.
float pair_distance(const DescriptorSet& reference, const DescriptorSet& query, Eigen::Index i, Eigen::Index j);

DifferenceMatrix build_full(const DescriptorSet& reference, const DescriptorSet& query);

/// Computes every entry in the columns of `range` that is not yet computed.
/// Returns the number of entries newly filled.
Eigen::Index fill_columns(const DescriptorSet& reference, const DescriptorSet& query, ColumnRange range,
                          DifferenceMatrix& matrix);

/// Value-returning form: starts from `existing` (or an empty matrix of the
/// right shape) and fills `range`.
DifferenceMatrix build_columns(const DescriptorSet& reference, const DescriptorSet& query, ColumnRange range,
                               DifferenceMatrix existing = {});

/// Lazily fills a single entry. Returns true if it had to be computed.
bool ensure_entry(const DescriptorSet& reference, const DescriptorSet& query, DifferenceMatrix& matrix,
                  Eigen::Index i, Eigen::Index j);

// SQDM dump, little-endian:
//   "SQDM" | u32 version=1 | u32 rows | u32 cols | cols x u8 column-complete
//   | rows*cols f32 row-major, NaN where uncomputed
void save_matrix_file(const DifferenceMatrix& matrix, const std::filesystem::path& path);
DifferenceMatrix load_matrix_file(const std::filesystem::path& path);

}  // namespace seqlcd
