#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "seqlcd/descriptor.hpp"
#include "seqlcd/diffmatrix.hpp"

namespace seqlcd {

/// Sequence-matching knobs. ds has no default and must be chosen by the caller.
struct MatcherParams {
  int ds = 0;
  double v_min = 0.8;
  double v_max = 1.2;
  double v_step = 0.1;
  int r_window = 10;
  bool same_traversal = false;

  void validate() const;
  int half() const noexcept { return ds / 2; }
  /// v_k = v_min + k * v_step for k = 0, 1, ... while v_k <= v_max (1e-9 slack).
  std::vector<double> speeds() const;
};

/// Inclusive index interval; empty when last < first.
struct IndexInterval {
  Eigen::Index first = 0;
  Eigen::Index last = -1;
  bool empty() const noexcept { return last < first; }
  Eigen::Index size() const noexcept { return empty() ? 0 : last - first + 1; }
  bool contains(Eigen::Index i) const noexcept { return i >= first && i <= last; }
};

/// Frames n whose window [n - ds/2, n + ds/2] lies inside a sequence of `count` frames.
IndexInterval valid_window_centers(Eigen::Index count, const MatcherParams& params);

/// Reference row visited at step i of the trajectory through middle frame q
/// at speed v: q + round(v * (i - ds/2)), half away from zero, clamped to [0, rows-1].
Eigen::Index trajectory_row(Eigen::Index q, int i, double v, const MatcherParams& params, Eigen::Index rows);

struct SeqScore {
  Eigen::Index query_index = 0;
  Eigen::Index ref_index = 0;
  double speed = 0.0;
  double score = 0.0;
};

/// Sum of the ds+1 difference-matrix entries along one trajectory.
double cal_seq_dif(const DifferenceMatrix& matrix, Eigen::Index n, Eigen::Index q, double v,
                   const MatcherParams& params);

/// Minimum cal_seq_dif over the speed grid; ties go to the smaller speed.
SeqScore sweep_speeds(const DifferenceMatrix& matrix, Eigen::Index n, Eigen::Index q, const MatcherParams& params);

struct FrameMatch {
  Eigen::Index query_index = 0;
  std::optional<Eigen::Index> best_ref;
  double best_score = std::numeric_limits<double>::quiet_NaN();
  double second_score = std::numeric_limits<double>::quiet_NaN();
  double confidence = std::numeric_limits<double>::quiet_NaN();
  double speed = std::numeric_limits<double>::quiet_NaN();

  bool accepted(double theta) const noexcept { return best_ref.has_value() && confidence >= theta; }
};

/// Instrumentation: how much work each query frame cost.
struct FrameStats {
  Eigen::Index query_index = 0;
  Eigen::Index candidates_scored = 0;
  Eigen::Index seq_evals = 0;
  Eigen::Index entries_computed = 0;
  bool reinit = false;
};

struct MatchStats {
  std::vector<FrameStats> frames;
  /// Entries computed outside any per-frame step (the full sweep's matrix build).
  Eigen::Index upfront_entries = 0;

  Eigen::Index total_seq_evals() const noexcept;
  Eigen::Index total_entries() const noexcept;
  Eigen::Index total_work() const noexcept { return total_seq_evals() + total_entries(); }
};

struct MatchResult {
  Eigen::Index ref_count = 0;
  std::vector<FrameMatch> frames;  // one per query frame
  MatchStats stats;

  Eigen::Index query_count() const noexcept { return static_cast<Eigen::Index>(frames.size()); }
  Eigen::Index matched_count() const noexcept;
};

/// Reduces the per-candidate scores of one frame (ascending ref_index) to a
/// FrameMatch: argmin with ties to the smaller reference, second best taken
/// outside +/- r_window of the winner, confidence = second / best.
FrameMatch select_best(std::span<const SeqScore> scored, Eigen::Index n, const MatcherParams& params);

/// Candidate reference frames for query n: centers with a full window,
/// minus the recent-template range when matching a traversal against itself.
bool is_candidate(Eigen::Index q, Eigen::Index n, Eigen::Index rows, const MatcherParams& params);

/// Full sweep over a complete difference matrix.
MatchResult match_matrix(const DifferenceMatrix& matrix, const MatcherParams& params);

/// Builds the full difference matrix, then sweeps it.
MatchResult match_all(const DescriptorSet& reference, const DescriptorSet& query, const MatcherParams& params);

/// CSV: query_index,best_ref,best_score,second_score,confidence,speed. One
/// row per matched frame.
void write_match_csv(const MatchResult& result, const std::filesystem::path& path);
/// Frames absent from the file come back unmatched; query_count (if larger
/// than the last listed index) pads the tail.
MatchResult read_match_csv(const std::filesystem::path& path, Eigen::Index query_count = 0);

/// CSV: frame,candidates_scored,entries_computed,reinit_flag.
void write_stats_csv(const MatchStats& stats, const std::filesystem::path& path);

}  // namespace seqlcd
