#include "seqlcd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace seqlcd {

void SynthConfig::validate() const {
  if (n_frames < 2) throw Error(Errc::BadConfig, "n_frames must be >= 2");
  if (dim < 2) throw Error(Errc::BadConfig, "dim must be >= 2");
  if (!(condition_noise >= 0.0) || !std::isfinite(condition_noise))
    throw Error(Errc::BadConfig, "condition_noise must be >= 0");
  if (!(viewpoint_shift >= 0.0 && viewpoint_shift <= 0.5))
    throw Error(Errc::BadConfig, "viewpoint_shift must lie in [0, 0.5]");
  if (!(speed_ratio >= 0.8 - 1e-12 && speed_ratio <= 1.2 + 1e-12))
    throw Error(Errc::BadConfig, "speed_ratio must lie in [0.8, 1.2]");
  if (!(step_angle > 0.0 && step_angle < std::numbers::pi)) throw Error(Errc::BadConfig, "step_angle must be in (0, pi)");
  for (Eigen::Index cut : scene_cuts)
    if (cut < 1 || cut >= n_frames) throw Error(Errc::BadConfig, "scene cut outside (0, n_frames)");
}

namespace {

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v.normalized();
}

}  // namespace

SynthPair generate_pair(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const Eigen::Index n = config.n_frames;
  const Eigen::Index dim = config.dim;

  // Reference: a walk on the unit sphere with a fixed angle per step, each
  // step heading in a fresh direction orthogonal to the current point.
  std::vector<Eigen::VectorXd> reference(static_cast<std::size_t>(n));
  reference[0] = random_unit(rng, dim);
  const double c = std::cos(config.step_angle);
  const double s = std::sin(config.step_angle);
  for (Eigen::Index t = 1; t < n; ++t) {
    const Eigen::VectorXd& prev = reference[static_cast<std::size_t>(t - 1)];
    if (std::find(config.scene_cuts.begin(), config.scene_cuts.end(), t) != config.scene_cuts.end()) {
      reference[static_cast<std::size_t>(t)] = random_unit(rng, dim);
      continue;
    }
    Eigen::VectorXd dir = random_unit(rng, dim);
    dir -= dir.dot(prev) * prev;
    dir.normalize();
    reference[static_cast<std::size_t>(t)] = (c * prev + s * dir).normalized();
  }

  std::vector<Eigen::Index> truth;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index r = std::lround(static_cast<double>(j) * config.speed_ratio);
    if (r > n - 1) break;
    truth.push_back(r);
  }

  const double angle = config.viewpoint_shift * std::numbers::pi / 2.0;
  const double rc = std::cos(angle);
  const double rs = std::sin(angle);
  const double sigma = config.condition_noise / std::sqrt(static_cast<double>(dim));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> query;
  query.reserve(truth.size());
  for (Eigen::Index r : truth) {
    Eigen::VectorXd x = reference[static_cast<std::size_t>(r)];
    if (angle != 0.0) {
      for (Eigen::Index i = 0; i + 1 < dim; i += 2) {
        const double a = x[i];
        const double b = x[i + 1];
        x[i] = rc * a - rs * b;
        x[i + 1] = rs * a + rc * b;
      }
    }
    if (sigma > 0.0)
      for (Eigen::Index i = 0; i < dim; ++i) x[i] += sigma * gauss(rng);
    query.push_back(std::move(x));
  }

  SynthPair pair{DescriptorSet::from_raw(reference, "synthetic"), DescriptorSet::from_raw(query, "synthetic"), {}};
  pair.gt.mapping.assign(truth.begin(), truth.end());
  return pair;
}

}  // namespace seqlcd
