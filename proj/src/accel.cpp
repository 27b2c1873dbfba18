#include "seqlcd/accel.hpp"

#include <algorithm>

namespace seqlcd {

void AccelParams::validate() const {
  base.validate();
  if (k < 1) throw Error(Errc::BadConfig, "k must be >= 1");
  if (num < 2 || num % 2 != 0) throw Error(Errc::BadConfig, "num must be even and >= 2");
  if (l_reinit < 1) throw Error(Errc::BadConfig, "l_reinit must be >= 1");
}

Eigen::Index CandidateSet::count() const noexcept {
  return std::count_if(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; });
}

CandidateSet seed_candidates(std::span<const SeqScore> sorted_scores, int k, int num, Eigen::Index ref_count) {
  if (k < 1 || num < 0) throw Error(Errc::BadConfig, "seed_candidates needs k >= 1 and num >= 0");
  if (static_cast<Eigen::Index>(sorted_scores.size()) < k)
    throw Error(Errc::TooFewCandidates, std::to_string(sorted_scores.size()) + " scored candidates for k=" +
                                            std::to_string(k));
  CandidateSet set;
  set.flags.assign(static_cast<std::size_t>(ref_count), 0);
  set.ranges.reserve(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    const Eigen::Index seed = sorted_scores[static_cast<std::size_t>(r)].ref_index;
    MatchingRange range{seed, std::max<Eigen::Index>(0, seed - num / 2),
                        std::min<Eigen::Index>(ref_count - 1, seed + num / 2)};
    for (Eigen::Index g = range.lo; g <= range.hi; ++g) set.flags[static_cast<std::size_t>(g)] = 1;
    set.ranges.push_back(range);
  }
  return set;
}

CandidateSet seed_candidates(std::span<const SeqScore> sorted_scores, const AccelParams& params,
                             Eigen::Index ref_count) {
  return seed_candidates(sorted_scores, params.k, params.num, ref_count);
}

WindowedMatcher::WindowedMatcher(const DescriptorSet& reference, const DescriptorSet& query,
                                 const MatcherParams& base, int num, int l_reinit)
    : reference_(reference), query_(query), params_(base), num_(num), l_reinit_(l_reinit) {
  params_.validate();
  if (num_ < 2 || num_ % 2 != 0) throw Error(Errc::BadConfig, "num must be even and >= 2");
  if (l_reinit_ < 1) throw Error(Errc::BadConfig, "l_reinit must be >= 1");
  if (reference.dim() != query.dim()) throw Error(Errc::DimMismatch, "reference and query dims differ");
  window_ = valid_window_centers(query.size(), params_);
  if (window_.empty() || valid_window_centers(reference.size(), params_).empty())
    throw Error(Errc::QueryTooShort, "sequences shorter than ds+1 frames");
  speeds_ = params_.speeds();
  next_ = window_.first;
  matrix_ = DifferenceMatrix(reference.size(), query.size());
  result_.ref_count = reference.size();
  result_.frames.resize(static_cast<std::size_t>(query.size()));
  for (Eigen::Index n = 0; n < query.size(); ++n) result_.frames[static_cast<std::size_t>(n)].query_index = n;
}

SeqScore WindowedMatcher::score_lazily(Eigen::Index n, Eigen::Index q, FrameStats& stats) {
  const int h = params_.half();
  for (double v : speeds_)
    for (int i = 0; i <= params_.ds; ++i)
      if (ensure_entry(reference_, query_, matrix_, trajectory_row(q, i, v, params_, matrix_.rows()), n - h + i))
        ++stats.entries_computed;
  stats.seq_evals += static_cast<Eigen::Index>(speeds_.size());
  return sweep_speeds(matrix_, n, q, params_);
}

WindowedMatcher::Step WindowedMatcher::step(int k) {
  if (done()) throw Error(Errc::OutOfSeqRange, "no query frames left");
  if (k < 1) throw Error(Errc::BadConfig, "k must be >= 1");
  const Eigen::Index n = next_++;
  const Eigen::Index rows = matrix_.rows();
  const IndexInterval refs = valid_window_centers(rows, params_);

  FrameStats stats;
  stats.query_index = n;
  Step out;
  out.reinit = previous_sorted_.empty() || (n - window_.first) % l_reinit_ == 0;

  std::vector<SeqScore> scored;
  if (!out.reinit) {
    const int k_eff = std::min<int>(k, static_cast<int>(previous_sorted_.size()));
    CandidateSet candidates = seed_candidates(previous_sorted_, k_eff, num_, rows);
    for (Eigen::Index q = refs.first; q <= refs.last; ++q)
      if (candidates.flagged(q) && is_candidate(q, n, rows, params_)) scored.push_back(score_lazily(n, q, stats));
    if (scored.empty())
      out.reinit = true;  // every flagged window was invalid; fall back to a full sweep
    else
      out.ranges = std::move(candidates.ranges);
  }
  if (out.reinit) {
    const int h = params_.half();
    stats.entries_computed += fill_columns(reference_, query_, {n - h, n + h + 1}, matrix_);
    for (Eigen::Index q = refs.first; q <= refs.last; ++q)
      if (is_candidate(q, n, rows, params_)) scored.push_back(sweep_speeds(matrix_, n, q, params_));
    stats.seq_evals += static_cast<Eigen::Index>(scored.size() * speeds_.size());
  }
  stats.candidates_scored = static_cast<Eigen::Index>(scored.size());
  stats.reinit = out.reinit;

  out.match = select_best(scored, n, params_);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const SeqScore& a, const SeqScore& b) { return a.score < b.score; });
  previous_sorted_ = std::move(scored);

  result_.frames[static_cast<std::size_t>(n)] = out.match;
  result_.stats.frames.push_back(stats);
  return out;
}

MatchResult WindowedMatcher::finish() && { return std::move(result_); }

MatchResult match_accelerated(const DescriptorSet& reference, const DescriptorSet& query, const AccelParams& params) {
  params.validate();
  WindowedMatcher matcher(reference, query, params.base, params.num, params.l_reinit);
  while (!matcher.done()) matcher.step(params.k);
  return std::move(matcher).finish();
}

}  // namespace seqlcd
