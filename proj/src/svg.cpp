#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "spinsim/experiments.hpp"

namespace spinsim {

namespace {

constexpr double kWidth = 760.0;
constexpr double kPanelHeight = 380.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr double kFloor = 1e-16;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

double log_infidelity(const SweepRow& r) { return std::log10(std::max(r.infidelity(), kFloor)); }

std::string decade_label(int e) { return "1e" + std::to_string(e); }

std::string theta_label(double theta) {
  const double q = theta / (units::kPi / 4.0);
  const long k = std::lround(q);
  if (k == 0) return "0";
  if (k % 4 == 0) return (k == 4 ? "" : std::to_string(k / 4)) + "\xcf\x80";
  if (k % 2 == 0) return (k / 2 == 1 ? "" : std::to_string(k / 2)) + "\xcf\x80/2";
  return (k == 1 ? "" : std::to_string(k)) + "\xcf\x80/4";
}

// Piecewise-linear ramp through fixed anchors (dark blue to yellow).
std::string color(double t) {
  static const std::array<std::array<int, 3>, 5> anchors{{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  int c[3];
  for (int k = 0; k < 3; ++k) {
    c[k] = static_cast<int>(std::lround(anchors[i][k] + f * (anchors[i + 1][k] - anchors[i][k])));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
  return buf;
}

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

struct Axis {
  double lo, hi;      // data units (log10 for log axes)
  double p0, p1;      // pixels
  double map(double v) const { return hi == lo ? 0.5 * (p0 + p1) : p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

std::pair<double, double> decade_range(double lo, double hi) {
  double a = std::floor(lo), b = std::ceil(hi);
  if (b <= a) b = a + 1;
  return {a, b};
}

void frame(std::ostringstream& o, double y0, const std::string& title) {
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop) << "\" width=\""
    << num(kWidth - kLeft - kRight) << "\" height=\"" << num(kPanelHeight - kTop - kBottom)
    << "\" fill=\"none\" stroke=\"#000\"/>\n";
  o << "<text x=\"" << num(kLeft) << "\" y=\"" << num(y0 + kTop - 12) << "\" font-size=\"14\">" << escape(title)
    << "</text>\n";
}

void x_ticks_log(std::ostringstream& o, const Axis& x, double ybase, const std::string& label) {
  for (int e = static_cast<int>(x.lo); e <= static_cast<int>(x.hi); ++e) {
    const double px = x.map(e);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(ybase) << "\" x2=\"" << num(px) << "\" y2=\""
      << num(ybase + 5) << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << num(px) << "\" y=\"" << num(ybase + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
      << decade_label(e) << "</text>\n";
  }
  o << "<text x=\"" << num(0.5 * (x.p0 + x.p1)) << "\" y=\"" << num(ybase + 36)
    << "\" font-size=\"12\" text-anchor=\"middle\">" << label << "</text>\n";
}

void x_ticks_theta(std::ostringstream& o, const Axis& x, double ybase) {
  for (long k = 0; k <= 8; ++k) {
    const double th = k * units::kPi / 4.0;
    if (th < x.lo - 1e-12 || th > x.hi + 1e-12) continue;
    const double px = x.map(th);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(ybase) << "\" x2=\"" << num(px) << "\" y2=\""
      << num(ybase + 5) << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << num(px) << "\" y=\"" << num(ybase + 18) << "\" font-size=\"11\" text-anchor=\"middle\">"
      << theta_label(th) << "</text>\n";
  }
  o << "<text x=\"" << num(0.5 * (x.p0 + x.p1)) << "\" y=\"" << num(ybase + 36)
    << "\" font-size=\"12\" text-anchor=\"middle\">theta (rad)</text>\n";
}

void y_ticks_log(std::ostringstream& o, const Axis& y, const std::string& label) {
  for (int e = static_cast<int>(y.lo); e <= static_cast<int>(y.hi); ++e) {
    const double py = y.map(e);
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft) << "\" y2=\""
      << num(py) << "\" stroke=\"#000\"/>\n";
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
      << decade_label(e) << "</text>\n";
  }
  const double cy = 0.5 * (y.p0 + y.p1);
  o << "<text x=\"" << num(18) << "\" y=\"" << num(cy) << "\" font-size=\"12\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 18 " << num(cy) << ")\">" << label << "</text>\n";
}

using GroupKey = std::tuple<QubitKind, GateKind, bool>;

std::vector<GroupKey> groups_in_order(const SweepResult& r) {
  std::vector<GroupKey> keys;
  for (const auto& row : r.rows) {
    const GroupKey k{row.qubit, row.gate, row.noise};
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  return keys;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Cell edges halfway between neighbouring centres.
std::vector<double> edges(const std::vector<double>& c, double single_halfwidth) {
  std::vector<double> e(c.size() + 1);
  if (c.size() == 1) {
    e[0] = c[0] - single_halfwidth;
    e[1] = c[0] + single_halfwidth;
    return e;
  }
  for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
  e.front() = c.front() - (e[1] - c.front());
  e.back() = c.back() + (c.back() - e[c.size() - 1]);
  return e;
}

std::string group_title(const GroupKey& k) {
  return std::string(to_string(std::get<0>(k))) + " " + std::string(to_string(std::get<1>(k))) +
         (std::get<2>(k) ? ", disturbed" : ", undisturbed");
}

std::string render_heatmap(const SweepResult& r) {
  const auto keys = groups_in_order(r);
  double zmin = 0.0, zmax = -16.0;
  for (const auto& row : r.rows) {
    zmin = std::min(zmin, log_infidelity(row));
    zmax = std::max(zmax, log_infidelity(row));
  }
  const auto [zlo, zhi] = decade_range(zmin, zmax);
  const double height = kPanelHeight * static_cast<double>(keys.size());

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
    << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(height) << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";

  for (std::size_t gi = 0; gi < keys.size(); ++gi) {
    const auto& [q, g, noise] = keys[gi];
    const double y0 = kPanelHeight * static_cast<double>(gi);
    std::vector<double> th, lt;
    for (const auto& row : r.rows) {
      if (row.qubit == q && row.gate == g && row.noise == noise) {
        th.push_back(row.theta);
        lt.push_back(std::log10(row.tau));
      }
    }
    th = sorted_unique(th);
    lt = sorted_unique(lt);
    const auto te = edges(th, units::kPi / 64.0);
    const auto le = edges(lt, 0.5);
    const Axis x{te.front(), te.back(), kLeft, kWidth - kRight};
    const auto [ylo, yhi] = decade_range(le.front(), le.back());
    const Axis y{ylo, yhi, y0 + kPanelHeight - kBottom, y0 + kTop};

    o << "<g>\n";
    for (const auto& row : r.rows) {
      if (row.qubit != q || row.gate != g || row.noise != noise) continue;
      const std::size_t i = std::lower_bound(th.begin(), th.end(), row.theta) - th.begin();
      const std::size_t j = std::lower_bound(lt.begin(), lt.end(), std::log10(row.tau)) - lt.begin();
      const double xa = x.map(te[i]), xb = x.map(te[i + 1]);
      const double ya = y.map(le[j + 1]), yb = y.map(le[j]);
      const double t = (log_infidelity(row) - zlo) / (zhi - zlo);
      o << "<rect class=\"cell\" x=\"" << num(xa) << "\" y=\"" << num(ya) << "\" width=\"" << num(xb - xa) << "\" height=\""
        << num(yb - ya) << "\" fill=\"" << color(t) << "\"/>\n";
    }
    o << "</g>\n";
    frame(o, y0, group_title(keys[gi]));
    x_ticks_theta(o, x, y0 + kPanelHeight - kBottom);
    y_ticks_log(o, y, "tau (ns)");

    // Colour bar.
    const double bx = kWidth - kRight + 30, btop = y0 + kTop, bbot = y0 + kPanelHeight - kBottom;
    const int steps = 32;
    for (int s = 0; s < steps; ++s) {
      const double ya = bbot - (bbot - btop) * (s + 1) / steps;
      o << "<rect x=\"" << num(bx) << "\" y=\"" << num(ya) << "\" width=\"16\" height=\""
        << num((bbot - btop) / steps) << "\" fill=\"" << color((s + 0.5) / steps) << "\"/>\n";
    }
    for (int e = static_cast<int>(zlo); e <= static_cast<int>(zhi); ++e) {
      const double py = bbot - (bbot - btop) * (e - zlo) / (zhi - zlo);
      o << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(py + 4) << "\" font-size=\"11\">" << decade_label(e)
        << "</text>\n";
    }
    o << "<text x=\"" << num(bx) << "\" y=\"" << num(btop - 8) << "\" font-size=\"11\">1-F</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

struct Series {
  std::string label;
  bool dashed;
  std::vector<const SweepRow*> points;
};

std::string render_lines(const SweepResult& r) {
  std::vector<double> all_tau;
  for (const auto& row : r.rows) all_tau.push_back(row.tau);
  const bool tau_axis = sorted_unique(all_tau).size() > 1;

  // One series per curve; the coordinate not on the x axis becomes part of the label.
  std::vector<Series> series;
  std::vector<std::tuple<QubitKind, GateKind, bool, double>> ids;
  for (const auto& row : r.rows) {
    const double fixed = tau_axis ? row.theta : row.tau;
    const auto id = std::make_tuple(row.qubit, row.gate, row.noise, fixed);
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) {
      ids.push_back(id);
      char buf[48];
      if (tau_axis) {
        std::snprintf(buf, sizeof buf, " theta=%.4g", fixed);
      } else {
        std::snprintf(buf, sizeof buf, " tau=%.4g ns", fixed);
      }
      series.push_back(Series{std::string(to_string(row.qubit)) + " " + std::string(to_string(row.gate)) +
                                  (row.noise ? " noisy" : "") + buf,
                              row.noise, {}});
      it = ids.end() - 1;
    }
    series[static_cast<std::size_t>(it - ids.begin())].points.push_back(&row);
  }
  for (auto& s : series) {
    std::stable_sort(s.points.begin(), s.points.end(), [&](const SweepRow* a, const SweepRow* b) {
      return tau_axis ? a->tau < b->tau : a->theta < b->theta;
    });
  }

  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -16.0;
  for (const auto& row : r.rows) {
    const double xv = tau_axis ? std::log10(row.tau) : row.theta;
    xmin = std::min(xmin, xv);
    xmax = std::max(xmax, xv);
    ymin = std::min(ymin, log_infidelity(row));
    ymax = std::max(ymax, log_infidelity(row));
  }
  Axis x{0, 0, kLeft, kWidth - kRight};
  if (tau_axis) {
    std::tie(x.lo, x.hi) = decade_range(xmin, xmax);
  } else {
    x.lo = 0.0;
    x.hi = std::max(xmax, units::kPi / 4.0);
  }
  const auto [ylo, yhi] = decade_range(ymin, ymax);
  const Axis y{ylo, yhi, kPanelHeight - kBottom, kTop};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kPanelHeight)
    << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kPanelHeight) << "\" font-family=\"sans-serif\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  frame(o, 0.0, tau_axis ? "infidelity vs tau" : "infidelity vs theta");
  if (tau_axis) {
    x_ticks_log(o, x, kPanelHeight - kBottom, "tau (ns)");
  } else {
    x_ticks_theta(o, x, kPanelHeight - kBottom);
  }
  y_ticks_log(o, y, "1-F");

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* c = kPalette[si % kPalette.size()];
    o << "<g stroke=\"" << c << "\" fill=\"" << c << "\">\n";
    if (s.points.size() > 1) {
      o << "<polyline fill=\"none\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const SweepRow& p = *s.points[i];
        o << (i ? " " : "") << num(x.map(tau_axis ? std::log10(p.tau) : p.theta)) << ","
          << num(y.map(log_infidelity(p)));
      }
      o << "\"/>\n";
    }
    for (const SweepRow* p : s.points) {
      o << "<circle cx=\"" << num(x.map(tau_axis ? std::log10(p->tau) : p->theta)) << "\" cy=\""
        << num(y.map(log_infidelity(*p))) << "\" r=\"2.5\"/>\n";
    }
    o << "</g>\n";
    const double ly = kTop + 14.0 * static_cast<double>(si);
    const double lx = kWidth - kRight + 10;
    o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 18) << "\" y2=\"" << num(ly)
      << "\" stroke=\"" << c << "\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    o << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(ly + 4) << "\" font-size=\"10\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::string render_svg(const SweepResult& result, PlotKind kind) {
  if (result.rows.empty()) throw std::invalid_argument("render_svg: empty result");
  return kind == PlotKind::heatmap ? render_heatmap(result) : render_lines(result);
}

}  // namespace spinsim
