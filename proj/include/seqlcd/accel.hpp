#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "seqlcd/descriptor.hpp"
#include "seqlcd/diffmatrix.hpp"
#include "seqlcd/seqmatch.hpp"

namespace seqlcd {

struct AccelParams {
  MatcherParams base;
  int k = 10;
  int num = 6;
  int l_reinit = 450;

  void validate() const;
};

/// One matching range: seed +/- num/2, clamped to the reference bounds.
struct MatchingRange {
  Eigen::Index seed = 0;
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  bool contains(Eigen::Index r) const noexcept { return r >= lo && r <= hi; }
};

struct CandidateSet {
  std::vector<std::uint8_t> flags;     // one per reference frame
  std::vector<MatchingRange> ranges;   // in seed order (best seed first)

  Eigen::Index count() const noexcept;
  bool flagged(Eigen::Index r) const noexcept { return flags[static_cast<std::size_t>(r)] != 0; }
};

/// Flags the k intervals around the k best seeds of the previous frame.
/// `sorted_scores` must be ascending by score (ties by reference index).
CandidateSet seed_candidates(std::span<const SeqScore> sorted_scores, int k, int num, Eigen::Index ref_count);
CandidateSet seed_candidates(std::span<const SeqScore> sorted_scores, const AccelParams& params,
                             Eigen::Index ref_count);

/// Frame-by-frame windowed matcher. Each step scores only the reference
/// frames flagged by the previous frame's best seeds, computing difference
/// matrix entries lazily; every `l_reinit` frames (and at the first frame)
/// it falls back to a full sweep.
class WindowedMatcher {
 public:
  struct Step {
    FrameMatch match;
    bool reinit = false;
    /// Ranges the match was searched in; empty for a full sweep.
    std::vector<MatchingRange> ranges;
  };

  WindowedMatcher(const DescriptorSet& reference, const DescriptorSet& query, const MatcherParams& base, int num,
                  int l_reinit);

  bool done() const noexcept { return next_ > window_.last; }
  Eigen::Index next_frame() const noexcept { return next_; }

  /// Matches the next valid query frame using `k` matching ranges.
  Step step(int k);

  /// Result over all query frames; frames outside the valid window stay unmatched.
  MatchResult finish() &&;

  const DifferenceMatrix& matrix() const noexcept { return matrix_; }

 private:
  SeqScore score_lazily(Eigen::Index n, Eigen::Index q, FrameStats& stats);

  const DescriptorSet& reference_;
  const DescriptorSet& query_;
  MatcherParams params_;
  int num_;
  int l_reinit_;
  std::vector<double> speeds_;
  IndexInterval window_;
  Eigen::Index next_;
  DifferenceMatrix matrix_;
  std::vector<SeqScore> previous_sorted_;
  MatchResult result_;
};

MatchResult match_accelerated(const DescriptorSet& reference, const DescriptorSet& query, const AccelParams& params);

}  // namespace seqlcd
