#include "seqlcd/diffmatrix.hpp"

#include <cmath>
#include <limits>

#include "binio.hpp"
#include "csv.hpp"
#include "seqlcd/parallel.hpp"

namespace seqlcd {

DifferenceMatrix::DifferenceMatrix(Eigen::Index rows, Eigen::Index cols)
    : data_(Storage::Constant(rows, cols, std::numeric_limits<float>::quiet_NaN())),
      valid_(static_cast<std::size_t>(rows * cols), 0),
      col_count_(static_cast<std::size_t>(cols), 0) {}

std::vector<Eigen::Index> DifferenceMatrix::computed_columns() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index j = 0; j < cols(); ++j)
    if (column_computed(j)) out.push_back(j);
  return out;
}

float DifferenceMatrix::entry(Eigen::Index i, Eigen::Index j) const {
  if (!in_bounds(i, j))
    throw Error(Errc::RangeOutOfBounds, "(" + std::to_string(i) + ", " + std::to_string(j) + ") outside " +
                                            std::to_string(rows()) + "x" + std::to_string(cols()));
  if (!is_computed(i, j))
    throw Error(Errc::UncomputedEntry, "(" + std::to_string(i) + ", " + std::to_string(j) + ")");
  return data_(i, j);
}

bool DifferenceMatrix::set(Eigen::Index i, Eigen::Index j, float value) noexcept {
  data_(i, j) = value;
  auto& flag = valid_[static_cast<std::size_t>(i * cols() + j)];
  if (flag) return false;
  flag = 1;
  ++col_count_[static_cast<std::size_t>(j)];
  ++computed_;
  return true;
}

float pair_distance(const DescriptorSet& reference, const DescriptorSet& query, Eigen::Index i, Eigen::Index j) {
  return static_cast<float>(euclidean_distance(reference.row(i).transpose(), query.row(j).transpose()));
}

namespace {

void check_dims(const DescriptorSet& reference, const DescriptorSet& query) {
  if (reference.empty() || query.empty()) throw Error(Errc::EmptyInput, "empty descriptor set");
  if (reference.dim() != query.dim())
    throw Error(Errc::DimMismatch, "reference dim " + std::to_string(reference.dim()) + " vs query dim " +
                                       std::to_string(query.dim()));
}

}  // namespace

DifferenceMatrix build_full(const DescriptorSet& reference, const DescriptorSet& query) {
  check_dims(reference, query);
  DifferenceMatrix matrix(reference.size(), query.size());
  fill_columns(reference, query, {0, query.size()}, matrix);
  return matrix;
}

Eigen::Index fill_columns(const DescriptorSet& reference, const DescriptorSet& query, ColumnRange range,
                          DifferenceMatrix& matrix) {
  check_dims(reference, query);
  if (matrix.rows() != reference.size() || matrix.cols() != query.size())
    throw Error(Errc::DimMismatch, "matrix shape does not match the descriptor sets");
  if (range.empty()) return 0;
  if (range.begin < 0 || range.end > query.size())
    throw Error(Errc::RangeOutOfBounds, "columns [" + std::to_string(range.begin) + ", " +
                                            std::to_string(range.end) + ") outside " + std::to_string(query.size()));
  const auto width = static_cast<std::size_t>(range.end - range.begin);
  // Workers own whole columns; distances are written to a scratch buffer
  // and committed serially so the validity bookkeeping stays single-writer.
  Eigen::MatrixXf scratch(reference.size(), static_cast<Eigen::Index>(width));
  parallel_for(0, width, [&](std::size_t c) {
    const Eigen::Index j = range.begin + static_cast<Eigen::Index>(c);
    for (Eigen::Index i = 0; i < reference.size(); ++i)
      scratch(i, static_cast<Eigen::Index>(c)) =
          matrix.is_computed(i, j) ? matrix.unchecked(i, j) : pair_distance(reference, query, i, j);
  });
  Eigen::Index added = 0;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(width); ++c)
    for (Eigen::Index i = 0; i < reference.size(); ++i)
      added += matrix.set(i, range.begin + c, scratch(i, c)) ? 1 : 0;
  return added;
}

DifferenceMatrix build_columns(const DescriptorSet& reference, const DescriptorSet& query, ColumnRange range,
                               DifferenceMatrix existing) {
  if (existing.rows() == 0 && existing.cols() == 0) existing = DifferenceMatrix(reference.size(), query.size());
  fill_columns(reference, query, range, existing);
  return existing;
}

bool ensure_entry(const DescriptorSet& reference, const DescriptorSet& query, DifferenceMatrix& matrix,
                  Eigen::Index i, Eigen::Index j) {
  if (!matrix.in_bounds(i, j)) throw Error(Errc::RangeOutOfBounds, "lazy entry outside the matrix");
  if (matrix.is_computed(i, j)) return false;
  return matrix.set(i, j, pair_distance(reference, query, i, j));
}

namespace {
constexpr char kMagic[4] = {'S', 'Q', 'D', 'M'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_matrix_file(const DifferenceMatrix& matrix, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out.write(kMagic, 4);
  detail::put_u32(out, kVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) out.put(matrix.column_computed(j) ? 1 : 0);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix.cols(); ++j)
      detail::put_f32(out, matrix.is_computed(i, j) ? matrix.unchecked(i, j) : std::numeric_limits<float>::quiet_NaN());
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

DifferenceMatrix load_matrix_file(const std::filesystem::path& path) {
  detail::ByteReader in(detail::read_file_bytes(path));
  if (in.remaining() < 4 || in.take(4) != std::string(kMagic, 4)) throw Error(Errc::BadMagic, path.string());
  const std::uint32_t version = in.u32();
  if (version != kVersion) throw Error(Errc::UnsupportedVersion, "version " + std::to_string(version));
  const Eigen::Index rows = in.u32();
  const Eigen::Index cols = in.u32();
  in.take(static_cast<std::size_t>(cols));
  if (in.remaining() / 4 < static_cast<std::size_t>(rows * cols)) throw Error(Errc::TruncatedFile, path.string());
  DifferenceMatrix matrix(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const float v = in.f32();
      if (!std::isnan(v)) matrix.set(i, j, v);
    }
  return matrix;
}

}  // namespace seqlcd
