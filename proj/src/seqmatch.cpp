#include "seqlcd/seqmatch.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <fmt/os.h>

#include "csv.hpp"
#include "seqlcd/parallel.hpp"

namespace seqlcd {

void MatcherParams::validate() const {
  if (ds < 2 || ds % 2 != 0) throw Error(Errc::BadConfig, "ds must be even and >= 2, got " + std::to_string(ds));
  if (!(std::isfinite(v_min) && std::isfinite(v_max) && std::isfinite(v_step)) || !(v_min > 0.0) ||
      !(v_min <= v_max) || !(v_step > 0.0))
    throw Error(Errc::BadConfig, "speed range requires 0 < v_min <= v_max and v_step > 0");
  if (r_window < 0) throw Error(Errc::BadConfig, "r_window must be >= 0");
}

std::vector<double> MatcherParams::speeds() const {
  const auto steps = static_cast<long>(std::floor((v_max - v_min) / v_step + 1e-9));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long k = 0; k <= steps; ++k) out.push_back(v_min + static_cast<double>(k) * v_step);
  return out;
}

IndexInterval valid_window_centers(Eigen::Index count, const MatcherParams& params) {
  return {params.half(), count - 1 - params.half()};
}

Eigen::Index trajectory_row(Eigen::Index q, int i, double v, const MatcherParams& params, Eigen::Index rows) {
  const double offset = v * static_cast<double>(i - params.half());
  const Eigen::Index row = q + static_cast<Eigen::Index>(std::lround(offset));
  return std::clamp<Eigen::Index>(row, 0, rows - 1);
}

double cal_seq_dif(const DifferenceMatrix& matrix, Eigen::Index n, Eigen::Index q, double v,
                   const MatcherParams& params) {
  const int h = params.half();
  if (n - h < 0 || n + h >= matrix.cols())
    throw Error(Errc::OutOfSeqRange, "query window around " + std::to_string(n) + " leaves [0, " +
                                         std::to_string(matrix.cols()) + ")");
  if (q < 0 || q >= matrix.rows()) throw Error(Errc::RangeOutOfBounds, "reference " + std::to_string(q));
  double sum = 0.0;
  for (int i = 0; i <= params.ds; ++i)
    sum += matrix.entry(trajectory_row(q, i, v, params, matrix.rows()), n - h + i);
  return sum;
}

SeqScore sweep_speeds(const DifferenceMatrix& matrix, Eigen::Index n, Eigen::Index q, const MatcherParams& params) {
  SeqScore best{n, q, 0.0, std::numeric_limits<double>::infinity()};
  for (double v : params.speeds()) {
    const double s = cal_seq_dif(matrix, n, q, v, params);
    if (s < best.score) {
      best.score = s;
      best.speed = v;
    }
  }
  return best;
}

Eigen::Index MatchStats::total_seq_evals() const noexcept {
  Eigen::Index total = 0;
  for (const auto& f : frames) total += f.seq_evals;
  return total;
}

Eigen::Index MatchStats::total_entries() const noexcept {
  Eigen::Index total = upfront_entries;
  for (const auto& f : frames) total += f.entries_computed;
  return total;
}

Eigen::Index MatchResult::matched_count() const noexcept {
  return std::count_if(frames.begin(), frames.end(), [](const FrameMatch& f) { return f.best_ref.has_value(); });
}

FrameMatch select_best(std::span<const SeqScore> scored, Eigen::Index n, const MatcherParams& params) {
  FrameMatch out;
  out.query_index = n;
  if (scored.empty()) return out;
  const SeqScore* best = &scored.front();
  for (const auto& s : scored)
    if (s.score < best->score) best = &s;

  double second = std::numeric_limits<double>::infinity();
  for (const auto& s : scored)
    if (std::abs(s.ref_index - best->ref_index) > params.r_window) second = std::min(second, s.score);

  out.best_ref = best->ref_index;
  out.best_score = best->score;
  out.speed = best->speed;
  if (std::isinf(second)) {
    // Nothing outside the exclusion window: no evidence of distinctiveness.
    out.second_score = best->score;
    out.confidence = 1.0;
  } else {
    out.second_score = second;
    if (best->score > 0.0)
      out.confidence = second / best->score;
    else
      out.confidence = second > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return out;
}

bool is_candidate(Eigen::Index q, Eigen::Index n, Eigen::Index rows, const MatcherParams& params) {
  if (!valid_window_centers(rows, params).contains(q)) return false;
  return !(params.same_traversal && std::abs(q - n) <= params.r_window);
}

MatchResult match_matrix(const DifferenceMatrix& matrix, const MatcherParams& params) {
  params.validate();
  const IndexInterval centers = valid_window_centers(matrix.cols(), params);
  const IndexInterval refs = valid_window_centers(matrix.rows(), params);
  if (centers.empty() || refs.empty())
    throw Error(Errc::QueryTooShort, "no frame has a full window of ds=" + std::to_string(params.ds));

  const Eigen::Index speed_count = static_cast<Eigen::Index>(params.speeds().size());
  MatchResult result;
  result.ref_count = matrix.rows();
  result.frames.resize(static_cast<std::size_t>(matrix.cols()));
  for (Eigen::Index n = 0; n < matrix.cols(); ++n) result.frames[static_cast<std::size_t>(n)].query_index = n;
  result.stats.frames.resize(static_cast<std::size_t>(centers.size()));

  parallel_for(0, static_cast<std::size_t>(centers.size()), [&](std::size_t idx) {
    const Eigen::Index n = centers.first + static_cast<Eigen::Index>(idx);
    std::vector<SeqScore> scored;
    scored.reserve(static_cast<std::size_t>(refs.size()));
    for (Eigen::Index q = refs.first; q <= refs.last; ++q)
      if (is_candidate(q, n, matrix.rows(), params)) scored.push_back(sweep_speeds(matrix, n, q, params));
    result.frames[static_cast<std::size_t>(n)] = select_best(scored, n, params);
    auto& st = result.stats.frames[idx];
    st.query_index = n;
    st.candidates_scored = static_cast<Eigen::Index>(scored.size());
    st.seq_evals = st.candidates_scored * speed_count;
    st.reinit = true;
  });
  return result;
}

MatchResult match_all(const DescriptorSet& reference, const DescriptorSet& query, const MatcherParams& params) {
  params.validate();
  if (reference.dim() != query.dim()) throw Error(Errc::DimMismatch, "reference and query dims differ");
  if (valid_window_centers(query.size(), params).empty() || valid_window_centers(reference.size(), params).empty())
    throw Error(Errc::QueryTooShort, "sequences shorter than ds+1 frames");
  const DifferenceMatrix matrix = build_full(reference, query);
  MatchResult result = match_matrix(matrix, params);
  result.stats.upfront_entries = matrix.computed_entries();
  return result;
}

void write_match_csv(const MatchResult& result, const std::filesystem::path& path) {
  std::string text = "query_index,best_ref,best_score,second_score,confidence,speed\n";
  for (const auto& f : result.frames) {
    if (!f.best_ref) continue;
    text += fmt::format("{},{},{},{},{},{}\n", f.query_index, *f.best_ref, f.best_score, f.second_score,
                        f.confidence, f.speed);
  }
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

MatchResult read_match_csv(const std::filesystem::path& path, Eigen::Index query_count) {
  MatchResult result;
  std::vector<FrameMatch> listed;
  Eigen::Index last = -1;
  for (const auto& row : detail::read_csv_rows(path)) {
    if (row.size() != 6) throw Error(Errc::BadFormat, "match CSV rows need 6 fields in " + path.string());
    FrameMatch f;
    f.query_index = detail::parse_int(row[0]);
    f.best_ref = detail::parse_int(row[1]);
    f.best_score = detail::parse_double(row[2]);
    f.second_score = detail::parse_double(row[3]);
    f.confidence = detail::parse_double(row[4]);
    f.speed = detail::parse_double(row[5]);
    if (f.query_index < 0 || *f.best_ref < 0) throw Error(Errc::BadFormat, "negative index in " + path.string());
    last = std::max(last, f.query_index);
    result.ref_count = std::max(result.ref_count, *f.best_ref + 1);
    listed.push_back(f);
  }
  const Eigen::Index count = std::max(query_count, last + 1);
  result.frames.resize(static_cast<std::size_t>(count));
  for (Eigen::Index n = 0; n < count; ++n) result.frames[static_cast<std::size_t>(n)].query_index = n;
  for (const auto& f : listed) result.frames[static_cast<std::size_t>(f.query_index)] = f;
  return result;
}

void write_stats_csv(const MatchStats& stats, const std::filesystem::path& path) {
  std::string text = "frame,candidates_scored,entries_computed,reinit_flag\n";
  for (const auto& f : stats.frames)
    text += fmt::format("{},{},{},{}\n", f.query_index, f.candidates_scored, f.entries_computed, f.reinit ? 1 : 0);
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace seqlcd
