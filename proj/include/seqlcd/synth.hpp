#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "seqlcd/descriptor.hpp"
#include "seqlcd/eval.hpp"

namespace seqlcd {

/// Descriptor-space stand-in for a pair of traversals of one route.
struct SynthConfig {
  Eigen::Index n_frames = 500;
  Eigen::Index dim = 64;
  /// Expected L2 norm of the additive Gaussian perturbation applied to each
  /// query descriptor before re-normalization (per-element sigma is
  /// condition_noise / sqrt(dim)).
  double condition_noise = 0.0;
  /// Fraction in [0, 0.5]; rotates each coordinate pair of the query by
  /// viewpoint_shift * pi / 2.
  double viewpoint_shift = 0.0;
  /// Query frame j shows reference frame round(j * speed_ratio).
  double speed_ratio = 1.0;
  std::uint64_t seed = 1;
  /// Angle in radians between consecutive reference descriptors.
  double step_angle = 0.065;
  /// Reference frames at which the walk jumps to a fresh random point.
  std::vector<Eigen::Index> scene_cuts;

  void validate() const;
};

struct SynthPair {
  DescriptorSet reference;
  DescriptorSet query;
  GroundTruth gt;
};

SynthPair generate_pair(const SynthConfig& config);

}  // namespace seqlcd
