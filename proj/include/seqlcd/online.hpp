#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "seqlcd/accel.hpp"
#include "seqlcd/descriptor.hpp"
#include "seqlcd/seqmatch.hpp"

namespace seqlcd {

struct OnlineParams {
  int initial_k = 30;
  int num = 16;
  int t_window = 10;
  double cd_low = 0.9;
  double cd_high = 1.1;

  void validate() const;
  bool in_band(double cd) const noexcept { return cd >= cd_low && cd <= cd_high; }
};

/// Number of preceding frames each Change Degree sum runs over.
inline constexpr Eigen::Index kChangeDegreeSpan = 10;

/// Ratio of the summed distances from frame n to its 10 predecessors over
/// the same sum for frame n-1. The denominator reaches back to n-11, so
/// n >= 11 is required. A zero denominator means no change and yields 1.
template <typename Derived>
double change_degree(const Eigen::MatrixBase<Derived>& rows, Eigen::Index n) {
  if (n < kChangeDegreeSpan + 1 || n >= rows.rows())
    throw Error(Errc::InsufficientHistory, "change degree needs frames n-11..n, n=" + std::to_string(n));
  double numerator = 0.0;
  double denominator = 0.0;
  for (Eigen::Index i = n - kChangeDegreeSpan; i <= n - 1; ++i) {
    numerator += euclidean_distance(rows.row(n).transpose(), rows.row(i).transpose());
    denominator += euclidean_distance(rows.row(n - 1).transpose(), rows.row(i - 1).transpose());
  }
  if (denominator == 0.0) return 1.0;
  return numerator / denominator;
}

struct AdaptState {
  std::vector<int> iml_buffer;
  int t_count = 0;
  int current_k = 0;

  static AdaptState initial(const OnlineParams& params) { return {{}, 0, params.initial_k}; }
};

/// 1-based index of the first range containing `chosen_ref`.
int image_matching_label(std::span<const MatchingRange> ranges, Eigen::Index chosen_ref);

/// Appends the matching label of `chosen_ref` and advances the batch counter.
void record_iml(AdaptState& state, std::span<const MatchingRange> ranges, Eigen::Index chosen_ref);
/// Full-sweep frames count as label 1.
void record_reinit_iml(AdaptState& state);

/// Gate on the Change Degree: outside [cd_low, cd_high] K snaps back to
/// initial_k and the batch restarts; inside, a full batch shrinks K to the
/// largest buffered label. Returns true on a reset.
bool maybe_update_k(AdaptState& state, double cd, const OnlineParams& params);
/// Same as the in-band branch, for frames without enough history to gate.
void maybe_update_k(AdaptState& state, const OnlineParams& params);

struct KTraceRow {
  Eigen::Index frame = 0;
  std::optional<double> change_degree;
  int current_k = 0;
  int iml = 0;
  bool reset = false;
};

struct OnlineResult {
  MatchResult result;
  std::vector<KTraceRow> k_trace;
};

OnlineResult match_online(const DescriptorSet& reference, const DescriptorSet& query, const MatcherParams& base,
                          int l_reinit, const OnlineParams& params);

/// CSV: frame,change_degree,current_k,iml,reset_flag.
void write_k_trace_csv(std::span<const KTraceRow> trace, const std::filesystem::path& path);

}  // namespace seqlcd
