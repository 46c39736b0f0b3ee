#include "nscheps/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace nscheps {

namespace {

constexpr double width = 640.0;
constexpr double height = 420.0;
constexpr double left = 80.0;
constexpr double right = 160.0;
constexpr double top = 40.0;
constexpr double bottom = 60.0;

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

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

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  double map(double v) const { return log ? std::log10(v) : v; }
  double unit(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis a;
  a.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    lo = std::min(lo, a.map(v));
    hi = std::max(hi, a.map(v));
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-300) {
    const double pad = std::max(std::abs(lo) * 0.05, log ? 0.5 : 1e-12);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

}  // namespace

std::string line_chart_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  std::vector<std::vector<std::pair<double, double>>> pts(series.size());
  std::vector<double> xs, ys;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::size_t n = std::min(series[s].x.size(), series[s].y.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double x = series[s].x[k];
      const double y = series[s].y[k];
      if (!usable(x, spec.log_x) || !usable(y, spec.log_y)) continue;
      pts[s].emplace_back(x, y);
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const Axis ax = make_axis(xs, spec.log_x);
  const Axis ay = make_axis(ys, spec.log_y);
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double x) { return left + pw * ax.unit(x); };
  auto py = [&](double y) { return top + ph * (1.0 - ay.unit(y)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(spec.title) +
         "</text>\n";
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int t = 0; t <= 4; ++t) {
    const double f = t / 4.0;
    const double vx = ax.lo + f * (ax.hi - ax.lo);
    const double vy = ay.lo + f * (ay.hi - ay.lo);
    const double gx = left + f * pw;
    const double gy = top + ph * (1.0 - f);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(gx) + "\" y2=\"" +
           num(top + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
           tick_label(ax.log ? std::pow(10.0, vx) : vx) + "</text>\n";
    svg += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(left) + "\" y2=\"" + num(gy) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(gy + 4) + "\" text-anchor=\"end\">" +
           tick_label(ay.log ? std::pow(10.0, vy) : vy) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 16) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         num(top + ph / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = palette[s % std::size(palette)];
    svg += "<g class=\"series\" data-name=\"" + escape(series[s].name) + "\">\n";
    std::string points;
    for (const auto& [x, y] : pts[s]) {
      if (!points.empty()) points += ' ';
      points += num(px(x)) + "," + num(py(y));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    for (const auto& [x, y] : pts[s])
      svg += "<circle class=\"pt\" cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    svg += "</g>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(s);
    svg += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 32) +
           "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(left + pw + 38) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[s].name) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string energy_plot_svg(const std::vector<EnergyRecord>& records) {
  PlotSeries total{"total", {}, {}}, bound{"total + dissipation", {}, {}}, e0{"gradient part", {}, {}},
      pot{"potential part", {}, {}}, kin{"kinetic", {}, {}};
  for (const EnergyRecord& r : records) {
    for (PlotSeries* s : {&total, &bound, &e0, &pot, &kin}) s->x.push_back(r.t);
    total.y.push_back(r.total());
    bound.y.push_back(r.total() + r.dissipation_cum);
    e0.y.push_back(r.e0);
    pot.y.push_back(r.potential);
    kin.y.push_back(r.kinetic);
  }
  return line_chart_svg({"Energy", "t", "energy", false, false}, {total, bound, e0, pot, kin});
}

std::string sweep_plot_svg(const SweepReport& report) {
  PlotSeries phi{"sup L2 phi", {}, {}}, v{"L2(QT) v", {}, {}}, mu{"L2L2 mu", {}, {}}, gap{"initial energy gap", {}, {}};
  for (const SweepRow& r : report.rows) {
    if (r.failed) continue;
    for (PlotSeries* s : {&phi, &v, &mu, &gap}) s->x.push_back(r.eps);
    phi.y.push_back(r.sup_l2_phi);
    v.y.push_back(r.l2qt_v);
    mu.y.push_back(r.l2l2_mu);
    gap.y.push_back(r.init_energy_gap);
  }
  return line_chart_svg({"Distance to the local reference", "eps", "distance", true, true}, {phi, v, mu, gap});
}

std::string gamma_plot_svg(const GammaTable& table) {
  PlotSeries s{"relative error", {}, {}};
  for (const GammaRow& r : table.rows) {
    s.x.push_back(r.eps);
    s.y.push_back(r.rel_error);
  }
  return line_chart_svg({"Nonlocal energy against gradient energy", "eps", "relative error", true, true}, {s});
}

std::string operator_plot_svg(const OperatorTable& table) {
  PlotSeries s{"relative error", {}, {}};
  for (const OperatorRow& r : table.rows) {
    s.x.push_back(r.eps);
    s.y.push_back(r.rel_error);
  }
  return line_chart_svg({"Nonlocal bilinear form against gradient form", "eps", "relative error", true, true}, {s});
}

}  // namespace nscheps
