#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "seqlcd/error.hpp"

namespace seqlcd {

/// A single per-frame feature vector. Unit L2 norm once normalized.
using Descriptor = Eigen::VectorXd;

/// Row-major storage for a traversal: one descriptor per row, 32-bit floats.
using DescriptorRows = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Scales `raw` to unit length. Rejects all-zero and non-finite input.
template <typename Derived>
Descriptor normalize(const Eigen::MatrixBase<Derived>& raw) {
  const Eigen::Index d = raw.size();
  if (d < 1) throw Error(Errc::ZeroVector, "empty vector");
  double sq = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double x = static_cast<double>(raw.derived().coeff(i));
    if (!std::isfinite(x)) throw Error(Errc::NonFiniteInput, "element " + std::to_string(i));
    sq += x * x;
  }
  if (sq == 0.0) throw Error(Errc::ZeroVector, "all elements are zero");
  const double norm = std::sqrt(sq);
  Descriptor out(d);
  for (Eigen::Index i = 0; i < d; ++i) out[i] = static_cast<double>(raw.derived().coeff(i)) / norm;
  return out;
}

/// Euclidean distance accumulated in double with a fixed element order, so
/// the same pair always produces the same bits regardless of caller.
template <typename A, typename B>
double euclidean_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  eigen_assert(a.size() == b.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a.derived().coeff(i)) - static_cast<double>(b.derived().coeff(i));
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

/// An ordered collection of unit-norm descriptors from one traversal.
class DescriptorSet {
 public:
  DescriptorSet() = default;

  /// Takes ownership of already-normalized rows. Verifies every row is finite
  /// and has unit norm within `kUnitNormTolerance`.
  DescriptorSet(DescriptorRows rows, std::string source_tag, std::vector<std::string> frame_names = {});

  /// Normalizes each raw vector, then stores it at 32-bit precision.
  static DescriptorSet from_raw(const std::vector<Eigen::VectorXd>& raw, std::string source_tag,
                                std::vector<std::string> frame_names = {});

  Eigen::Index size() const noexcept { return rows_.rows(); }
  Eigen::Index dim() const noexcept { return rows_.cols(); }
  bool empty() const noexcept { return rows_.rows() == 0; }

  const DescriptorRows& rows() const noexcept { return rows_; }
  auto row(Eigen::Index i) const { return rows_.row(i); }

  const std::string& source_tag() const noexcept { return source_tag_; }
  const std::vector<std::string>& frame_names() const noexcept { return frame_names_; }

  static constexpr double kUnitNormTolerance = 1e-5;

 private:
  DescriptorRows rows_;
  std::string source_tag_;
  std::vector<std::string> frame_names_;
};

bool operator==(const DescriptorSet& a, const DescriptorSet& b);

/// Known activation sizes of the Places-CNN/AlexNet tap points. Returns 0
/// for an unknown layer name.
Eigen::Index layer_dimension(std::string_view layer);

/// True iff the set's dimension is consistent with `expected_source`.
/// "pixel-patch" and "custom" accept any dimension.
bool validate_dim(const DescriptorSet& set, std::string_view expected_source);

// SQDS binary format, little-endian:
//   "SQDS" | u32 version=1 | u32 count | u32 dim | u32 tag_len | tag bytes
//   | count*dim f32 row-major | [u32 name_count | (u32 len | bytes)*]
DescriptorSet load_descriptor_file(const std::filesystem::path& path);
void save_descriptor_file(const DescriptorSet& set, const std::filesystem::path& path);

}  // namespace seqlcd
