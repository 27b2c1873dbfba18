#include "seqlcd/online.hpp"

#include <algorithm>
#include <climits>

#include <fmt/format.h>

#include "csv.hpp"

namespace seqlcd {

void OnlineParams::validate() const {
  if (initial_k < 1) throw Error(Errc::BadConfig, "initial_k must be >= 1");
  if (num < 2 || num % 2 != 0) throw Error(Errc::BadConfig, "num must be even and >= 2");
  if (t_window < 1) throw Error(Errc::BadConfig, "t_window must be >= 1");
  if (!(cd_low > 0.0) || !(cd_low < cd_high)) throw Error(Errc::BadConfig, "change degree gate needs 0 < low < high");
}

int image_matching_label(std::span<const MatchingRange> ranges, Eigen::Index chosen_ref) {
  for (std::size_t k = 0; k < ranges.size(); ++k)
    if (ranges[k].contains(chosen_ref)) return static_cast<int>(k) + 1;
  throw Error(Errc::NotInAnyRange, "reference " + std::to_string(chosen_ref) + " is outside every matching range");
}

void record_iml(AdaptState& state, std::span<const MatchingRange> ranges, Eigen::Index chosen_ref) {
  state.iml_buffer.push_back(image_matching_label(ranges, chosen_ref));
  ++state.t_count;
}

void record_reinit_iml(AdaptState& state) {
  state.iml_buffer.push_back(1);
  ++state.t_count;
}

void maybe_update_k(AdaptState& state, const OnlineParams& params) {
  if (state.t_count >= params.t_window && !state.iml_buffer.empty()) {
    state.current_k = *std::max_element(state.iml_buffer.begin(), state.iml_buffer.end());
    state.iml_buffer.clear();
    state.t_count = 0;
  }
}

bool maybe_update_k(AdaptState& state, double cd, const OnlineParams& params) {
  if (!params.in_band(cd)) {
    state.current_k = params.initial_k;
    state.iml_buffer.clear();
    state.t_count = 0;
    return true;
  }
  maybe_update_k(state, params);
  return false;
}

OnlineResult match_online(const DescriptorSet& reference, const DescriptorSet& query, const MatcherParams& base,
                          int l_reinit, const OnlineParams& params) {
  params.validate();
  WindowedMatcher matcher(reference, query, base, params.num, l_reinit);
  AdaptState state = AdaptState::initial(params);
  OnlineResult out;
  while (!matcher.done()) {
    KTraceRow row;
    row.frame = matcher.next_frame();
    // Gate before matching so a reset widens this frame's own candidate set.
    if (row.frame > kChangeDegreeSpan) {
      row.change_degree = change_degree(query.rows(), row.frame);
      row.reset = maybe_update_k(state, *row.change_degree, params);
    } else {
      maybe_update_k(state, params);
    }
    row.current_k = state.current_k;
    const auto step = matcher.step(state.current_k);
    if (step.match.best_ref) {
      if (step.reinit)
        record_reinit_iml(state);
      else
        record_iml(state, step.ranges, *step.match.best_ref);
      row.iml = state.iml_buffer.back();
    }
    out.k_trace.push_back(row);
  }
  out.result = std::move(matcher).finish();
  return out;
}

void write_k_trace_csv(std::span<const KTraceRow> trace, const std::filesystem::path& path) {
  std::string text = "frame,change_degree,current_k,iml,reset_flag\n";
  for (const auto& r : trace)
    text += fmt::format("{},{},{},{},{}\n", r.frame, r.change_degree ? fmt::format("{}", *r.change_degree) : "",
                        r.current_k, r.iml, r.reset ? 1 : 0);
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace seqlcd
