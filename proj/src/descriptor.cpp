#include "seqlcd/descriptor.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace seqlcd {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::EmptyImage: return "EmptyImage";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::RangeOutOfBounds: return "RangeOutOfBounds";
    case Errc::UncomputedEntry: return "UncomputedEntry";
    case Errc::OutOfSeqRange: return "OutOfSeqRange";
    case Errc::QueryTooShort: return "QueryTooShort";
    case Errc::TooFewCandidates: return "TooFewCandidates";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::NotInAnyRange: return "NotInAnyRange";
    case Errc::FrameMismatch: return "FrameMismatch";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadFormat: return "BadFormat";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

DescriptorSet::DescriptorSet(DescriptorRows rows, std::string source_tag, std::vector<std::string> frame_names)
    : rows_(std::move(rows)), source_tag_(std::move(source_tag)), frame_names_(std::move(frame_names)) {
  if (rows_.rows() < 1) throw Error(Errc::EmptyInput, "descriptor set has no frames");
  if (rows_.cols() < 1) throw Error(Errc::DimMismatch, "descriptor dimension must be >= 1");
  if (!frame_names_.empty() && static_cast<Eigen::Index>(frame_names_.size()) != rows_.rows())
    throw Error(Errc::DimMismatch, "frame name count differs from descriptor count");
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    double sq = 0.0;
    for (Eigen::Index c = 0; c < rows_.cols(); ++c) {
      const double x = rows_(r, c);
      if (!std::isfinite(x)) throw Error(Errc::NonFiniteInput, "frame " + std::to_string(r));
      sq += x * x;
    }
    if (std::abs(std::sqrt(sq) - 1.0) > kUnitNormTolerance)
      throw Error(Errc::NotNormalized, "frame " + std::to_string(r) + " has norm " + std::to_string(std::sqrt(sq)));
  }
}

DescriptorSet DescriptorSet::from_raw(const std::vector<Eigen::VectorXd>& raw, std::string source_tag,
                                      std::vector<std::string> frame_names) {
  if (raw.empty()) throw Error(Errc::EmptyInput, "descriptor set has no frames");
  const Eigen::Index dim = raw.front().size();
  DescriptorRows rows(static_cast<Eigen::Index>(raw.size()), dim);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != dim) throw Error(Errc::DimMismatch, "frame " + std::to_string(i));
    rows.row(static_cast<Eigen::Index>(i)) = normalize(raw[i]).cast<float>().transpose();
  }
  return DescriptorSet(std::move(rows), std::move(source_tag), std::move(frame_names));
}

bool operator==(const DescriptorSet& a, const DescriptorSet& b) {
  return a.source_tag() == b.source_tag() && a.frame_names() == b.frame_names() && a.size() == b.size() &&
         a.dim() == b.dim() && (a.rows().array() == b.rows().array()).all();
}

Eigen::Index layer_dimension(std::string_view layer) {
  static constexpr std::array<std::pair<std::string_view, Eigen::Index>, 11> kLayers{{
      {"conv1", 290400}, {"pool1", 69984}, {"conv2", 186624}, {"pool2", 43264},
      {"conv3", 64896}, {"conv4", 64896}, {"conv5", 43264}, {"pool5", 9216},
      {"fc6", 4096}, {"fc7", 4096}, {"fc8", 1000},
  }};
  std::string lower(layer);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& [name, dim] : kLayers)
    if (name == lower) return dim;
  return 0;
}

bool validate_dim(const DescriptorSet& set, std::string_view expected_source) {
  if (expected_source == "pixel-patch" || expected_source == "custom") return true;
  const Eigen::Index expected = layer_dimension(expected_source);
  return expected != 0 && set.dim() == expected;
}

}  // namespace seqlcd
