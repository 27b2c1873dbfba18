#include "seqlcd/eval.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "csv.hpp"

namespace seqlcd {

GroundTruth GroundTruth::identity(Eigen::Index count, int tolerance) {
  GroundTruth gt;
  gt.tolerance = tolerance;
  gt.mapping.resize(static_cast<std::size_t>(count));
  for (Eigen::Index n = 0; n < count; ++n) gt.mapping[static_cast<std::size_t>(n)] = n;
  return gt;
}

void GroundTruth::validate(Eigen::Index ref_count) const {
  if (tolerance < 0) throw Error(Errc::BadConfig, "tolerance must be >= 0");
  for (std::size_t n = 0; n < mapping.size(); ++n)
    if (mapping[n] && (*mapping[n] < 0 || *mapping[n] >= ref_count))
      throw Error(Errc::BadConfig, "ground truth for query " + std::to_string(n) + " points outside the reference");
}

double LabelCounts::precision() const noexcept {
  return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double LabelCounts::recall() const noexcept {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

LabelCounts label_matches(const MatchResult& result, const GroundTruth& gt, double theta) {
  if (gt.mapping.size() != result.frames.size())
    throw Error(Errc::FrameMismatch, "ground truth covers " + std::to_string(gt.mapping.size()) +
                                         " query frames, result covers " + std::to_string(result.frames.size()));
  LabelCounts counts;
  for (const auto& f : result.frames) {
    if (!f.best_ref) continue;
    const auto& truth = gt.mapping[static_cast<std::size_t>(f.query_index)];
    if (f.accepted(theta)) {
      if (truth && std::abs(*f.best_ref - *truth) <= gt.tolerance)
        ++counts.tp;
      else
        ++counts.fp;
    } else if (truth) {
      ++counts.fn;
    }
  }
  return counts;
}

std::vector<double> default_theta_grid(const MatchResult& result, std::size_t points) {
  std::vector<double> conf;
  for (const auto& f : result.frames)
    if (f.best_ref) conf.push_back(f.confidence);
  if (conf.empty() || points == 0) return {1.0};
  std::sort(conf.begin(), conf.end());
  std::vector<double> grid;
  grid.reserve(points);
  for (std::size_t k = 0; k < points; ++k) {
    const std::size_t idx =
        points == 1 ? 0 : static_cast<std::size_t>(std::llround(static_cast<double>(k) * (conf.size() - 1) / (points - 1)));
    grid.push_back(conf[idx]);
  }
  return grid;
}

EvalReport pr_curve(const MatchResult& result, const GroundTruth& gt, std::span<const double> theta_grid) {
  if (theta_grid.empty()) throw Error(Errc::BadConfig, "empty threshold grid");
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end()))
    throw Error(Errc::BadConfig, "threshold grid must be ascending");
  EvalReport report;
  for (double theta : theta_grid) {
    const LabelCounts c = label_matches(result, gt, theta);
    report.curve.push_back({theta, c.precision(), c.recall(), c});
    if (c.fp == 0) report.max_recall_at_full_precision = std::max(report.max_recall_at_full_precision, c.recall());
  }
  return report;
}

EvalReport pr_curve(const MatchResult& result, const GroundTruth& gt) {
  const auto grid = default_theta_grid(result);
  return pr_curve(result, gt, grid);
}

GroundTruth load_ground_truth_csv(const std::filesystem::path& path, Eigen::Index query_count, int tolerance) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  Eigen::Index last = -1;
  for (const auto& row : detail::read_csv_rows(path)) {
    if (row.size() != 2) throw Error(Errc::BadFormat, "ground truth rows need 2 fields in " + path.string());
    const Eigen::Index q = detail::parse_int(row[0]);
    const Eigen::Index r = detail::parse_int(row[1]);
    if (q < 0 || r < 0) throw Error(Errc::BadFormat, "negative index in " + path.string());
    last = std::max(last, q);
    pairs.emplace_back(q, r);
  }
  if (query_count > 0 && last >= query_count)
    throw Error(Errc::FrameMismatch, "ground truth lists query " + std::to_string(last) + " beyond " +
                                         std::to_string(query_count) + " frames");
  GroundTruth gt;
  gt.tolerance = tolerance;
  gt.mapping.resize(static_cast<std::size_t>(query_count > 0 ? query_count : last + 1));
  for (const auto& [q, r] : pairs) gt.mapping[static_cast<std::size_t>(q)] = r;
  return gt;
}

void save_ground_truth_csv(const GroundTruth& gt, const std::filesystem::path& path) {
  std::string text = "query_index,ref_index\n";
  for (std::size_t n = 0; n < gt.mapping.size(); ++n)
    if (gt.mapping[n]) text += fmt::format("{},{}\n", n, *gt.mapping[n]);
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

}  // namespace seqlcd
