#include <fstream>

#include "binio.hpp"
#include "csv.hpp"
#include "seqlcd/descriptor.hpp"

namespace seqlcd {

namespace {
constexpr char kMagic[4] = {'S', 'Q', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_descriptor_file(const DescriptorSet& set, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out.write(kMagic, 4);
  detail::put_u32(out, kVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(set.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(set.dim()));
  detail::put_string(out, set.source_tag());
  for (Eigen::Index r = 0; r < set.size(); ++r)
    for (Eigen::Index c = 0; c < set.dim(); ++c) detail::put_f32(out, set.rows()(r, c));
  if (!set.frame_names().empty()) {
    detail::put_u32(out, static_cast<std::uint32_t>(set.frame_names().size()));
    for (const auto& name : set.frame_names()) detail::put_string(out, name);
  }
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

DescriptorSet load_descriptor_file(const std::filesystem::path& path) {
  detail::ByteReader in(detail::read_file_bytes(path));
  if (in.remaining() < 4 || in.take(4) != std::string(kMagic, 4)) throw Error(Errc::BadMagic, path.string());
  const std::uint32_t version = in.u32();
  if (version != kVersion) throw Error(Errc::UnsupportedVersion, "version " + std::to_string(version));
  const std::uint32_t count = in.u32();
  const std::uint32_t dim = in.u32();
  if (dim == 0) throw Error(Errc::DimMismatch, "dimension 0 in " + path.string());
  if (count == 0) throw Error(Errc::EmptyInput, "no descriptors in " + path.string());
  std::string tag = in.string();

  const std::size_t values = static_cast<std::size_t>(count) * dim;
  if (in.remaining() / 4 < values)
    throw Error(Errc::TruncatedFile, "header declares " + std::to_string(count) + " rows of dim " +
                                         std::to_string(dim) + " in " + path.string());
  DescriptorRows rows(count, dim);
  for (Eigen::Index r = 0; r < rows.rows(); ++r)
    for (Eigen::Index c = 0; c < rows.cols(); ++c) rows(r, c) = in.f32();

  std::vector<std::string> names;
  if (in.remaining() > 0) {
    const std::uint32_t name_count = in.u32();
    if (name_count != count)
      throw Error(Errc::DimMismatch, "name table has " + std::to_string(name_count) + " entries for " +
                                         std::to_string(count) + " frames");
    names.reserve(name_count);
    for (std::uint32_t i = 0; i < name_count; ++i) names.push_back(in.string());
  }
  return DescriptorSet(std::move(rows), std::move(tag), std::move(names));
}

}  // namespace seqlcd
