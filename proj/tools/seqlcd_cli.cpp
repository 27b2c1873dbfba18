// seqlcd: command-line front end for sequence-based loop closure detection.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "seqlcd/accel.hpp"
#include "seqlcd/descriptor.hpp"
#include "seqlcd/diffmatrix.hpp"
#include "seqlcd/eval.hpp"
#include "seqlcd/image.hpp"
#include "seqlcd/online.hpp"
#include "seqlcd/parallel.hpp"
#include "seqlcd/seqmatch.hpp"
#include "seqlcd/synth.hpp"

namespace fs = std::filesystem;
using namespace seqlcd;

namespace {

struct ExtractOptions {
  fs::path images;
  fs::path out;
  PixelDescriptorConfig pixels;
};

struct MatchOptions {
  fs::path ref;
  fs::path query;
  fs::path out;
  std::string mode = "full";
  MatcherParams base;
  int k = 10;
  std::optional<int> num;  // 6 for accel, 16 for online when omitted
  int l_reinit = 450;
  OnlineParams online;
  fs::path stats;
  fs::path k_trace;
  fs::path dump_matrix;
};

struct EvalOptions {
  fs::path matches;
  fs::path gt;
  bool gt_identity = false;
  long long query_count = 0;
  int tolerance = 2;
  fs::path out;
  std::string label = "matcher";
  std::optional<double> min_recall;
};

struct SynthOptions {
  SynthConfig config;
  fs::path out_dir;
};

struct PlotOptions {
  std::vector<std::string> curves;
  fs::path out;
};

int run_extract(const ExtractOptions& opt) {
  opt.pixels.validate();
  if (!fs::is_directory(opt.images)) throw Error(Errc::EmptyInput, opt.images.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.images))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  if (files.empty()) throw Error(Errc::EmptyInput, "no .pgm files in " + opt.images.string());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

  DescriptorRows rows(static_cast<Eigen::Index>(files.size()),
                      static_cast<Eigen::Index>(opt.pixels.target_width) * opt.pixels.target_height);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      rows.row(static_cast<Eigen::Index>(i)) = pixel_descriptor(read_pgm(files[i]), opt.pixels).cast<float>().transpose();
    } catch (const Error& e) {
      throw Error(e.code(), files[i].filename().string() + ": " + e.what());
    }
    names.push_back(files[i].filename().string());
  }
  save_descriptor_file(DescriptorSet(std::move(rows), "pixel-patch", std::move(names)), opt.out);
  fmt::print("extracted {} descriptors of dim {} -> {}\n", files.size(),
             opt.pixels.target_width * opt.pixels.target_height, opt.out.string());
  return 0;
}

void print_candidate_bound(const MatchStats& stats, long long bound) {
  Eigen::Index worst = 0;
  for (const auto& f : stats.frames)
    if (!f.reinit) worst = std::max(worst, f.candidates_scored);
  fmt::print("max candidates on windowed frames: {} (bound {}) {}\n", worst, bound,
             worst <= bound ? "respected" : "VIOLATED");
}

int run_match(MatchOptions opt) {
  opt.base.validate();
  const AccelParams accel{opt.base, opt.k, opt.num.value_or(6), opt.l_reinit};
  opt.online.num = opt.num.value_or(16);
  if (opt.mode == "accel") accel.validate();
  if (opt.mode == "online") {
    opt.online.validate();
    if (opt.l_reinit < 1) throw Error(Errc::BadConfig, "l_reinit must be >= 1");
  }
  const DescriptorSet reference = load_descriptor_file(opt.ref);
  const DescriptorSet query = load_descriptor_file(opt.query);

  const auto start = std::chrono::steady_clock::now();
  MatchResult result;
  std::optional<std::vector<KTraceRow>> trace;
  long long bound = 0;
  if (opt.mode == "full") {
    if (reference.dim() != query.dim()) throw Error(Errc::DimMismatch, "reference and query dims differ");
    if (valid_window_centers(query.size(), opt.base).empty() || valid_window_centers(reference.size(), opt.base).empty())
      throw Error(Errc::QueryTooShort, "sequences shorter than ds+1 frames");
    const DifferenceMatrix matrix = build_full(reference, query);
    result = match_matrix(matrix, opt.base);
    result.stats.upfront_entries = matrix.computed_entries();
    if (!opt.dump_matrix.empty()) save_matrix_file(matrix, opt.dump_matrix);
  } else if (opt.mode == "accel") {
    const AccelParams& params = accel;
    bound = static_cast<long long>(params.k) * (params.num + 1);
    WindowedMatcher matcher(reference, query, params.base, params.num, params.l_reinit);
    while (!matcher.done()) matcher.step(params.k);
    if (!opt.dump_matrix.empty()) save_matrix_file(matcher.matrix(), opt.dump_matrix);
    result = std::move(matcher).finish();
  } else if (opt.mode == "online") {
    bound = static_cast<long long>(opt.online.initial_k) * (opt.online.num + 1);
    auto online = match_online(reference, query, opt.base, opt.l_reinit, opt.online);
    result = std::move(online.result);
    trace = std::move(online.k_trace);
  } else {
    throw Error(Errc::BadConfig, "unknown mode " + opt.mode);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_match_csv(result, opt.out);
  if (!opt.stats.empty()) write_stats_csv(result.stats, opt.stats);
  if (trace) {
    const fs::path trace_path = opt.k_trace.empty() ? fs::path(opt.out.string() + ".ktrace.csv") : opt.k_trace;
    write_k_trace_csv(*trace, trace_path);
    fmt::print("k trace -> {}\n", trace_path.string());
  }

  fmt::print("mode {}: matched {} of {} query frames in {:.3f} s\n", opt.mode, result.matched_count(),
             result.query_count(), seconds);
  fmt::print("sequence evaluations: {}, matrix entries computed: {}\n", result.stats.total_seq_evals(),
             result.stats.total_entries());
  if (bound > 0) print_candidate_bound(result.stats, bound);
  return 0;
}

int run_eval(const EvalOptions& opt) {
  MatchResult result = read_match_csv(opt.matches, opt.query_count);
  GroundTruth gt;
  if (opt.gt_identity) {
    gt = GroundTruth::identity(result.query_count(), opt.tolerance);
  } else {
    if (opt.gt.empty()) throw Error(Errc::BadConfig, "either --gt or --gt-identity is required");
    gt = load_ground_truth_csv(opt.gt, 0, opt.tolerance);
    const auto count = std::max<std::size_t>(gt.mapping.size(), result.frames.size());
    gt.mapping.resize(count);
    result = read_match_csv(opt.matches, static_cast<Eigen::Index>(count));
  }
  const EvalReport report = pr_curve(result, gt);
  emit_plot(report, opt.out, opt.label);
  fmt::print("max recall at 100% precision: {:.4f}\n", report.max_recall_at_full_precision);
  fmt::print("curve -> {0}.csv, {0}.svg\n", opt.out.string());
  if (opt.min_recall && report.max_recall_at_full_precision < *opt.min_recall) {
    fmt::print(stderr, "recall floor {:.4f} not met\n", *opt.min_recall);
    return 1;
  }
  return 0;
}

int run_synth(const SynthOptions& opt) {
  const SynthPair pair = generate_pair(opt.config);
  fs::create_directories(opt.out_dir);
  save_descriptor_file(pair.reference, opt.out_dir / "reference.sqds");
  save_descriptor_file(pair.query, opt.out_dir / "query.sqds");
  save_ground_truth_csv(pair.gt, opt.out_dir / "gt.csv");
  fmt::print("synthetic pair: {} reference, {} query frames, dim {} -> {}\n", pair.reference.size(),
             pair.query.size(), pair.reference.dim(), opt.out_dir.string());
  return 0;
}

int run_plot(const PlotOptions& opt) {
  std::vector<EvalReport> reports;
  std::vector<std::string> labels;
  for (const auto& spec : opt.curves) {
    const auto eq = spec.find('=');
    const std::string label = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    reports.push_back(read_curve_csv(path));
    labels.push_back(label);
  }
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < reports.size(); ++i) series.push_back({labels[i], &reports[i]});
  write_pr_svg(series, opt.out);
  fmt::print("plot -> {}\n", opt.out.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence-based loop closure detection over per-frame descriptors"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (default: SEQLCD_THREADS or all cores)");

  ExtractOptions extract;
  auto* cmd_extract = app.add_subcommand("extract-pixels", "Pixel-patch descriptors from a directory of PGM images");
  cmd_extract->add_option("--images", extract.images, "Directory of .pgm frames (lexicographic order)")->required();
  cmd_extract->add_option("--out", extract.out, "Output SQDS file")->required();
  cmd_extract->add_option("--width", extract.pixels.target_width, "Down-sampled width")->capture_default_str();
  cmd_extract->add_option("--height", extract.pixels.target_height, "Down-sampled height")->capture_default_str();
  cmd_extract->add_option("--patch", extract.pixels.patch_size, "Patch size")->capture_default_str();

  MatchOptions match;
  auto* cmd_match = app.add_subcommand("match", "Match a query traversal against a reference traversal");
  cmd_match->add_option("--ref", match.ref, "Reference SQDS file")->required();
  cmd_match->add_option("--query", match.query, "Query SQDS file")->required();
  cmd_match->add_option("--out", match.out, "Match CSV output")->required();
  cmd_match->add_option("--ds", match.base.ds, "Sequence length (even)")->required();
  cmd_match->add_option("--mode", match.mode, "full | accel | online")
      ->check(CLI::IsMember({"full", "accel", "online"}))
      ->capture_default_str();
  cmd_match->add_option("--v-min", match.base.v_min, "Minimum trajectory speed")->capture_default_str();
  cmd_match->add_option("--v-max", match.base.v_max, "Maximum trajectory speed")->capture_default_str();
  cmd_match->add_option("--v-step", match.base.v_step, "Trajectory speed increment")->capture_default_str();
  cmd_match->add_option("--r-window", match.base.r_window, "Recent template range")->capture_default_str();
  cmd_match->add_flag("--same-traversal", match.base.same_traversal, "Reference and query are the same run");
  cmd_match->add_option("--k", match.k, "Matching ranges (accel)")->capture_default_str();
  cmd_match->add_option("--num", match.num, "Matching range width (default 6 accel, 16 online)");
  cmd_match->add_option("--l-reinit", match.l_reinit, "Reinitialization period in frames")->capture_default_str();
  cmd_match->add_option("--initial-k", match.online.initial_k, "Starting K (online)")->capture_default_str();
  cmd_match->add_option("--t-window", match.online.t_window, "Adaptation batch size (online)")->capture_default_str();
  cmd_match->add_option("--cd-low", match.online.cd_low, "Lower change degree gate")->capture_default_str();
  cmd_match->add_option("--cd-high", match.online.cd_high, "Upper change degree gate")->capture_default_str();
  cmd_match->add_option("--stats", match.stats, "Per-frame instrumentation CSV");
  cmd_match->add_option("--k-trace", match.k_trace, "K trace CSV (online; default <out>.ktrace.csv)");
  cmd_match->add_option("--dump-matrix", match.dump_matrix, "Write the difference matrix as SQDM");

  EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "Precision/recall of a match CSV against ground truth");
  cmd_eval->add_option("--matches", eval.matches, "Match CSV")->required();
  auto* gt_opt = cmd_eval->add_option("--gt", eval.gt, "Ground truth CSV (query_index,ref_index)");
  cmd_eval->add_flag("--gt-identity", eval.gt_identity, "Query frame n corresponds to reference frame n")
      ->excludes(gt_opt);
  cmd_eval->add_option("--query-count", eval.query_count, "Total query frames (pads trailing unmatched frames)");
  cmd_eval->add_option("--tolerance", eval.tolerance, "Accepted frame offset")->capture_default_str();
  cmd_eval->add_option("--out", eval.out, "Output prefix for <prefix>.csv and <prefix>.svg")->required();
  cmd_eval->add_option("--label", eval.label, "Curve label")->capture_default_str();
  cmd_eval->add_option("--min-recall", eval.min_recall, "Exit 1 if recall at 100% precision is below this");

  SynthOptions synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic reference/query pair with ground truth");
  cmd_synth->add_option("--frames", synth.config.n_frames, "Reference frames")->capture_default_str();
  cmd_synth->add_option("--dim", synth.config.dim, "Descriptor dimension")->capture_default_str();
  cmd_synth->add_option("--noise", synth.config.condition_noise, "Condition noise")->capture_default_str();
  cmd_synth->add_option("--shift", synth.config.viewpoint_shift, "Viewpoint shift fraction")->capture_default_str();
  cmd_synth->add_option("--speed", synth.config.speed_ratio, "Query/reference speed ratio")->capture_default_str();
  cmd_synth->add_option("--seed", synth.config.seed, "RNG seed")->capture_default_str();
  cmd_synth->add_option("--step-angle", synth.config.step_angle, "Walk step angle (radians)")->capture_default_str();
  cmd_synth->add_option("--scene-cut", synth.config.scene_cuts, "Reference frames where the scene jumps");
  cmd_synth->add_option("--out-dir", synth.out_dir, "Output directory")->required();

  PlotOptions plot;
  auto* cmd_plot = app.add_subcommand("plot", "Overlay PR curve CSVs into one SVG");
  cmd_plot->add_option("--curve", plot.curves, "Curve CSV, optionally label=path")->required();
  cmd_plot->add_option("--out", plot.out, "Output SVG")->required();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_cap(threads);

  try {
    if (*cmd_extract) return run_extract(extract);
    if (*cmd_match) return run_match(match);
    if (*cmd_eval) return run_eval(eval);
    if (*cmd_synth) return run_synth(synth);
    if (*cmd_plot) return run_plot(plot);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
