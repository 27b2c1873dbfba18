#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "csv.hpp"
#include "seqlcd/eval.hpp"

namespace seqlcd {

void write_curve_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::string text = "threshold,precision,recall,tp,fp,fn\n";
  for (const auto& p : report.curve)
    text += fmt::format("{},{},{},{},{},{}\n", p.threshold, p.precision, p.recall, p.counts.tp, p.counts.fp,
                        p.counts.fn);
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

EvalReport read_curve_csv(const std::filesystem::path& path) {
  EvalReport report;
  for (const auto& row : detail::read_csv_rows(path)) {
    if (row.size() != 6) throw Error(Errc::BadFormat, "curve rows need 6 fields in " + path.string());
    CurvePoint p;
    p.threshold = detail::parse_double(row[0]);
    p.precision = detail::parse_double(row[1]);
    p.recall = detail::parse_double(row[2]);
    p.counts = {detail::parse_int(row[3]), detail::parse_int(row[4]), detail::parse_int(row[5])};
    if (p.counts.fp == 0) report.max_recall_at_full_precision = std::max(report.max_recall_at_full_precision, p.recall);
    report.curve.push_back(p);
  }
  return report;
}

namespace {

constexpr double kSize = 480.0;
constexpr double kMargin = 60.0;
constexpr double kPlot = kSize - 2 * kMargin;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

double to_x(double recall) { return kMargin + recall * kPlot; }
double to_y(double precision) { return kSize - kMargin - precision * kPlot; }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_pr_svg(std::span<const PlotSeries> series, const std::filesystem::path& path) {
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n"
      "<rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n",
      kSize);
  svg += fmt::format("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
                     to_x(0), to_y(0), to_x(1), to_y(0));
  svg += fmt::format("<line class=\"axis\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
                     to_x(0), to_y(0), to_x(0), to_y(1));
  for (int t = 0; t <= 5; ++t) {
    const double v = t / 5.0;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:.1f}</text>\n",
                       to_x(v), to_y(0) + 16, v);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.1f}</text>\n",
                       to_x(0) - 6, to_y(v) + 4, v);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">Recall</text>\n",
                     to_x(0.5), kSize - 20);
  svg += fmt::format(
      "<text x=\"20\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2f})\">"
      "Precision</text>\n",
      to_y(0.5), to_y(0.5));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % kColors.size()];
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" fill=\"{}\">{}</text>\n", to_x(0.55),
                       kMargin - 30 + 14.0 * static_cast<double>(s), color, escape(series[s].label));
    if (!series[s].report || series[s].report->curve.empty()) continue;
    std::string points;
    for (const auto& p : series[s].report->curve) {
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", to_x(p.recall), to_y(p.precision));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, points);
  }
  svg += "</svg>\n";
  auto out = detail::open_for_write(path);
  out << svg;
  if (!out) throw Error(Errc::IoFailure, "write failed: " + path.string());
}

void emit_plot(const EvalReport& report, const std::filesystem::path& prefix, const std::string& label) {
  auto csv = prefix;
  csv += ".csv";
  auto svg = prefix;
  svg += ".svg";
  write_curve_csv(report, csv);
  const PlotSeries series{label, &report};
  write_pr_svg(std::span(&series, 1), svg);
}

}  // namespace seqlcd
