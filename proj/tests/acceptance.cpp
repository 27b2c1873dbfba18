// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "seqlcd/accel.hpp"
#include "seqlcd/eval.hpp"
#include "seqlcd/online.hpp"
#include "seqlcd/synth.hpp"

using namespace seqlcd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  fmt::print("{} {}: {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", name, o.detail, secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MatcherParams params_with(int ds) {
  MatcherParams p;
  p.ds = ds;
  return p;
}

bool same_frames(const MatchResult& a, const MatchResult& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t n = 0; n < a.frames.size(); ++n) {
    const auto& x = a.frames[n];
    const auto& y = b.frames[n];
    if (x.best_ref != y.best_ref) return false;
    if (!x.best_ref) continue;
    if (x.best_score != y.best_score || x.speed != y.speed || x.second_score != y.second_score ||
        x.confidence != y.confidence)
      return false;
  }
  return true;
}

SynthPair calibrated_pair(Eigen::Index frames) {
  SynthConfig cfg;
  cfg.n_frames = frames;
  cfg.condition_noise = 0.1;
  cfg.viewpoint_shift = 0.125;
  cfg.seed = 1;
  return generate_pair(cfg);
}

Outcome oracle_equivalence() {
  oracle::Rng rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  long frames = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int ds = trial % 2 ? 4 : 10;
    const long nr = ds + 1 + static_cast<long>(rng.next() % (200 - ds));
    const long nq = ds + 1 + static_cast<long>(rng.next() % (200 - ds));
    const long dim = 1 + static_cast<long>(rng.next() % 32);
    const DescriptorSet ref = oracle::random_set(rng, nr, dim);
    const DescriptorSet qry = oracle::random_set(rng, nq, dim);
    MatcherParams p = params_with(ds);
    p.same_traversal = trial % 5 == 0;
    const MatchResult got = match_all(ref, qry, p);
    const auto expected = oracle::brute_force_match(oracle::naive_distances(ref, qry), ds, p.v_min, p.v_max,
                                                    p.v_step, p.r_window, p.same_traversal);
    if (static_cast<long>(got.matched_count()) !=
        std::count_if(expected.begin(), expected.end(), [](const auto& m) { return m.best_ref >= 0; }))
      return {false, fmt::format("instance {}: matched frame count differs", trial)};
    for (const auto& e : expected) {
      const auto& f = got.frames[static_cast<std::size_t>(e.query_index)];
      if (e.best_ref < 0) {
        if (f.best_ref) return {false, fmt::format("instance {} frame {}: unexpected match", trial, e.query_index)};
        continue;
      }
      if (!f.best_ref || *f.best_ref != e.best_ref || f.best_score != e.score || f.speed != e.speed)
        return {false, fmt::format("instance {} frame {}: got ref {} score {} v {}, oracle ref {} score {} v {}", trial,
                                   e.query_index, f.best_ref.value_or(-1), f.best_score, f.speed, e.best_ref, e.score,
                                   e.speed)};
      ++frames;
    }
  }
  const double secs = elapsed_since(t0);
  return {secs < 60.0, fmt::format("50 instances, {} frames identical (argmin, score, speed); {:.1f} s < 60 s", frames, secs)};
}

Outcome coverage_completeness() {
  oracle::Rng rng(1002);
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 20; ++trial) {
    const int ds = trial % 2 ? 4 : 10;
    const long n = ds + 1 + static_cast<long>(rng.next() % (200 - ds));
    const long nq = ds + 1 + static_cast<long>(rng.next() % (200 - ds));
    const long dim = 1 + static_cast<long>(rng.next() % 32);
    const DescriptorSet ref = oracle::random_set(rng, n, dim);
    const DescriptorSet qry = oracle::random_set(rng, nq, dim);
    const MatcherParams p = params_with(ds);
    const AccelParams a{p, static_cast<int>(n), static_cast<int>(2 * n), 450};
    if (!same_frames(match_accelerated(ref, qry, a), match_all(ref, qry, p)))
      return {false, fmt::format("instance {} (N={}) differs from the full sweep", trial, n)};
  }
  const double secs = elapsed_since(t0);
  return {secs < 60.0, fmt::format("20 instances with k=N, num=2N identical to the full sweep; {:.1f} s < 60 s", secs)};
}

Outcome candidate_bound() {
  const SynthPair pair = calibrated_pair(1000);
  long windowed = 0;
  for (int k : {1, 6, 10, 30}) {
    for (int num : {6, 16, 40}) {
      const MatchResult r = match_accelerated(pair.reference, pair.query, {params_with(10), k, num, 450});
      const Eigen::Index bound = static_cast<Eigen::Index>(k) * (num + 1);
      for (const auto& f : r.stats.frames) {
        if (f.reinit) continue;
        ++windowed;
        if (f.candidates_scored > bound)
          return {false, fmt::format("k={} num={} frame {}: {} candidates > {}", k, num, f.query_index,
                                     f.candidates_scored, bound)};
      }
    }
  }
  return {windowed > 0, fmt::format("12 settings, {} windowed frames, all within k(num+1)", windowed)};
}

Outcome accuracy_retention() {
  const SynthPair pair = calibrated_pair(1000);
  const MatcherParams p = params_with(100);
  const double full = pr_curve(match_all(pair.reference, pair.query, p), pair.gt).max_recall_at_full_precision;
  const double accel =
      pr_curve(match_accelerated(pair.reference, pair.query, {p, 10, 6, 450}), pair.gt).max_recall_at_full_precision;
  return {accel >= full - 0.05,
          fmt::format("recall@100%P full {:.4f}, accelerated (k=10, num=6, ds=100) {:.4f}, gap {:.4f} <= 0.05", full,
                      accel, full - accel)};
}

Outcome work_reduction() {
  const SynthPair pair = calibrated_pair(1000);
  const MatcherParams p = params_with(80);
  auto t0 = std::chrono::steady_clock::now();
  const MatchResult full = match_all(pair.reference, pair.query, p);
  const double full_secs = elapsed_since(t0);
  t0 = std::chrono::steady_clock::now();
  const MatchResult acc = match_accelerated(pair.reference, pair.query, {p, 10, 16, 450});
  const double acc_secs = elapsed_since(t0);
  const double ratio = static_cast<double>(acc.stats.total_work()) / static_cast<double>(full.stats.total_work());
  const double speedup = full_secs / std::max(acc_secs, 1e-9);
  if (speedup < 3.0) fmt::print("WARN wall-clock speedup {:.2f}x below 3x (advisory only)\n", speedup);
  return {ratio <= 0.25, fmt::format("work {} / {} = {:.3f} <= 0.25; wall {:.3f} s vs {:.3f} s ({:.1f}x, advisory >= 3x)",
                                     acc.stats.total_work(), full.stats.total_work(), ratio, acc_secs, full_secs,
                                     speedup)};
}

Outcome online_adaptation() {
  SynthConfig cfg;
  cfg.n_frames = 600;
  cfg.dim = 256;
  cfg.condition_noise = 0.1;
  cfg.viewpoint_shift = 0.125;
  cfg.seed = 5;
  const Eigen::Index cut = 300;
  cfg.scene_cuts = {cut};
  const SynthPair pair = generate_pair(cfg);
  const OnlineParams op{30, 16, 10, 0.9, 1.1};
  const OnlineResult out = match_online(pair.reference, pair.query, params_with(10), 450, op);

  int shrink_at = -1;
  for (std::size_t i = 0; i < out.k_trace.size(); ++i)
    if (out.k_trace[i].current_k <= 5) {
      shrink_at = static_cast<int>(i);
      break;
    }
  if (shrink_at < 0 || shrink_at > 3 * op.t_window)
    return {false, fmt::format("K never reached <= 5 within 3 batches (first at trace row {})", shrink_at)};

  for (const auto& row : out.k_trace) {
    const bool at_cut = row.frame == cut;
    if (at_cut) {
      if (!row.change_degree || op.in_band(*row.change_degree) || !row.reset || row.current_k != op.initial_k)
        return {false, fmt::format("jump frame {}: cd {}, reset {}, K {}", cut, row.change_degree.value_or(NAN),
                                   row.reset, row.current_k)};
    } else if (row.reset && row.frame < cut) {
      return {false, fmt::format("spurious reset at frame {} before the jump", row.frame)};
    }
  }
  const auto& jump = *std::find_if(out.k_trace.begin(), out.k_trace.end(), [&](const auto& r) { return r.frame == cut; });
  return {true, fmt::format("K <= 5 after {} frames (3 batches = {}); jump frame {} cd {:.2f} outside [0.9, 1.1], K reset to {}",
                            shrink_at, 3 * op.t_window, cut, *jump.change_degree, jump.current_k)};
}

MatchResult proposals(long count) {
  MatchResult r;
  r.ref_count = count;
  r.frames.resize(static_cast<std::size_t>(count));
  for (long n = 0; n < count; ++n) r.frames[static_cast<std::size_t>(n)].query_index = n;
  return r;
}

Outcome metric_identities() {
  oracle::Rng rng(1003);
  long points = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const long count = 10 + static_cast<long>(rng.next() % 200);
    MatchResult r = proposals(count);
    GroundTruth gt = GroundTruth::identity(count, 2);
    for (long n = 0; n < count; ++n) {
      if (rng.uniform() < 0.15) gt.mapping[static_cast<std::size_t>(n)].reset();
      if (rng.uniform() < 0.1) continue;
      auto& f = r.frames[static_cast<std::size_t>(n)];
      f.best_ref = std::clamp<long>(n + static_cast<long>(rng.next() % 9) - 4, 0, count - 1);
      f.confidence = 1.0 + rng.uniform();
    }
    const EvalReport rep = pr_curve(r, gt);
    for (std::size_t i = 0; i < rep.curve.size(); ++i) {
      const auto& p = rep.curve[i];
      long tp = 0, fp = 0, fn = 0;
      for (const auto& f : r.frames) {
        if (!f.best_ref) continue;
        const auto& t = gt.mapping[static_cast<std::size_t>(f.query_index)];
        if (f.confidence >= p.threshold)
          (t && std::abs(*f.best_ref - *t) <= 2 ? tp : fp)++;
        else if (t)
          ++fn;
      }
      const double prec = tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp);
      const double rec = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
      if (p.counts.tp != tp || p.counts.fp != fp || p.counts.fn != fn || p.precision != prec || p.recall != rec)
        return {false, fmt::format("trial {} theta {}: recomputed labels differ", trial, p.threshold)};
      if (i > 0 && (p.threshold < rep.curve[i - 1].threshold || p.recall > rep.curve[i - 1].recall))
        return {false, fmt::format("trial {}: recall not monotone in theta", trial)};
      ++points;
    }
  }
  MatchResult edge = proposals(10);
  edge.frames[4].best_ref = 6;
  edge.frames[4].confidence = 2.0;
  edge.frames[5].best_ref = 8;
  edge.frames[5].confidence = 2.0;
  const LabelCounts c = label_matches(edge, GroundTruth::identity(10, 2), 1.0);
  if (c.tp != 1 || c.fp != 1) return {false, "offset-2 proposal not counted as TP (or offset-3 not FP)"};
  return {true, fmt::format("{} curve points recomputed from raw labels, theta-monotone; offset 2 is TP, 3 is FP", points)};
}

Outcome normalization_suite() {
  oracle::Rng rng(1004);
  double worst_norm = 0.0, worst_scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const long dim = 1 + static_cast<long>(rng.next() % 4096);
    Eigen::VectorXd x(dim);
    for (long k = 0; k < dim; ++k) x[k] = rng.gauss() * std::exp(4.0 * rng.gauss());
    const Eigen::VectorXd u = normalize(x);
    worst_norm = std::max(worst_norm, std::abs(u.norm() - 1.0));
    const double c = std::exp(6.0 * (rng.uniform() - 0.5));
    worst_scale = std::max(worst_scale, (normalize(c * x) - u).cwiseAbs().maxCoeff());
  }
  bool zero_rejected = false;
  try {
    normalize(Eigen::VectorXd::Zero(17));
  } catch (const Error& e) {
    zero_rejected = e.code() == Errc::ZeroVector;
  }
  return {worst_norm <= 1e-9 && worst_scale <= 1e-9 && zero_rejected,
          fmt::format("1000 vectors: max |norm-1| {:.2e}, max scale drift {:.2e} (<= 1e-9); zero vector {}", worst_norm,
                      worst_scale, zero_rejected ? "rejected" : "NOT rejected")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + SEQLCD_CLI_PATH + "\" " + args + " >> \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end() {
  const fs::path dir = fs::temp_directory_path() / "seqlcd_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path log = dir / "log.txt";
  const std::string d = dir.string();
  const std::string pair = "--ref \"" + d + "/syn/reference.sqds\" --query \"" + d + "/syn/query.sqds\" --ds 10";
  const std::vector<std::string> steps{
      "synth --frames 300 --noise 0.1 --shift 0.125 --seed 2 --out-dir \"" + d + "/syn\"",
      "match " + pair + " --mode full --out \"" + d + "/full.csv\"",
      "match " + pair + " --mode accel --out \"" + d + "/accel.csv\"",
      "match " + pair + " --mode online --out \"" + d + "/online.csv\"",
      "eval --matches \"" + d + "/full.csv\" --gt \"" + d + "/syn/gt.csv\" --query-count 300 --out \"" + d +
          "/pr_full\" --min-recall 0.9",
      "eval --matches \"" + d + "/accel.csv\" --gt \"" + d + "/syn/gt.csv\" --query-count 300 --out \"" + d +
          "/pr_accel\" --min-recall 0.9",
      "eval --matches \"" + d + "/online.csv\" --gt \"" + d + "/syn/gt.csv\" --query-count 300 --out \"" + d +
          "/pr_online\" --min-recall 0.9",
      "plot --curve full=\"" + d + "/pr_full.csv\" --curve accel=\"" + d + "/pr_accel.csv\" --curve online=\"" + d +
          "/pr_online.csv\" --out \"" + d + "/overlay.svg\""};
  for (const auto& s : steps) {
    const int code = run_cli(s, log);
    if (code != 0) return {false, fmt::format("`seqlcd {}` exited {}:\n{}", s.substr(0, s.find(' ')), code, slurp(log))};
  }
  const std::string svg = slurp(dir / "overlay.svg");
  const auto polylines = [&] {
    std::size_t n = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++n;
    return n;
  }();
  fs::remove_all(dir);
  return {polylines == 3, fmt::format("synth -> match (full, accel, online) -> eval (recall floor 0.9) -> plot; {} curves", polylines)};
}

}  // namespace

int main() {
  criterion("oracle equivalence", oracle_equivalence);
  criterion("coverage completeness", coverage_completeness);
  criterion("candidate bound", candidate_bound);
  criterion("accuracy retention", accuracy_retention);
  criterion("work reduction", work_reduction);
  criterion("online adaptation", online_adaptation);
  criterion("metric identities", metric_identities);
  criterion("normalization", normalization_suite);
  criterion("end-to-end pipeline", end_to_end);
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
