#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlcd/seqmatch.hpp"

namespace seqlcd {

struct GroundTruth {
  std::vector<std::optional<Eigen::Index>> mapping;  // per query frame
  int tolerance = 2;

  static GroundTruth identity(Eigen::Index count, int tolerance = 2);
  /// BadConfig if a mapped index falls outside [0, ref_count).
  void validate(Eigen::Index ref_count) const;
};

struct LabelCounts {
  Eigen::Index tp = 0;
  Eigen::Index fp = 0;
  Eigen::Index fn = 0;

  /// TP / (TP + FP); 1 when nothing was accepted.
  double precision() const noexcept;
  /// TP / (TP + FN); 0 when nothing is matchable.
  double recall() const noexcept;
};

/// Labels every frame that has a proposed match. Accepted frames
/// (confidence >= theta) are TP when within `tolerance` frames of the truth,
/// else FP; rejected frames with a true match are FN.
LabelCounts label_matches(const MatchResult& result, const GroundTruth& gt, double theta);

struct CurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  LabelCounts counts;
};

struct EvalReport {
  std::vector<CurvePoint> curve;
  double max_recall_at_full_precision = 0.0;
};

/// `points` nearest-rank quantiles of the confidences of matched frames, ascending.
std::vector<double> default_theta_grid(const MatchResult& result, std::size_t points = 100);

EvalReport pr_curve(const MatchResult& result, const GroundTruth& gt, std::span<const double> theta_grid);
EvalReport pr_curve(const MatchResult& result, const GroundTruth& gt);

/// CSV "query_index,ref_index"; frames without a row have no true match.
GroundTruth load_ground_truth_csv(const std::filesystem::path& path, Eigen::Index query_count, int tolerance = 2);
void save_ground_truth_csv(const GroundTruth& gt, const std::filesystem::path& path);

// Plotting.
struct PlotSeries {
  std::string label;
  const EvalReport* report = nullptr;
};

void write_curve_csv(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_curve_csv(const std::filesystem::path& path);
/// Standalone SVG, recall on x and precision on y, one polyline per series.
void write_pr_svg(std::span<const PlotSeries> series, const std::filesystem::path& path);
/// Writes `<prefix>.csv` and `<prefix>.svg`.
void emit_plot(const EvalReport& report, const std::filesystem::path& prefix, const std::string& label = "matcher");

}  // namespace seqlcd
