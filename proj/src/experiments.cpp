#include "spinsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr double kInfidelityFloor = 1e-16;

bool same_value(double a, double b) {
  return a == b || std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void require_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw std::invalid_argument(std::string("sweep: ") + name + " grid is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) throw std::invalid_argument(std::string("sweep: non-finite ") + name);
    if (i > 0 && !(g[i] > g[i - 1])) {
      throw std::invalid_argument(std::string("sweep: ") + name + " grid must be strictly increasing");
    }
  }
}

std::size_t trials_for(const SimulationContext& ctx, const SweepSpec& spec, QubitKind q, bool noise) {
  return (noise && !ctx.noise(q).is_zero()) ? spec.trials : 1;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string curve_name(QubitKind q, GateKind g) {
  return std::string(to_string(q)) + " " + std::string(to_string(g));
}

std::vector<double> distinct(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), same_value), v.end());
  return v;
}

std::vector<double> thetas_of(const SweepResult& r, QubitKind q, GateKind g, bool noise) {
  std::vector<double> out;
  for (const auto& row : r.rows) {
    if (row.qubit == q && row.gate == g && row.noise == noise) out.push_back(row.theta);
  }
  return distinct(out);
}

std::vector<double> taus_of(const SweepResult& r, QubitKind q, GateKind g, bool noise) {
  std::vector<double> out;
  for (const auto& row : r.rows) {
    if (row.qubit == q && row.gate == g && row.noise == noise) out.push_back(row.tau);
  }
  return distinct(out);
}

const SweepRow* find_row(const SweepResult& r, QubitKind q, GateKind g, bool noise, double theta,
                         double tau) {
  for (const auto& row : r.rows) {
    if (row.qubit == q && row.gate == g && row.noise == noise && same_value(row.theta, theta) &&
        same_value(row.tau, tau)) {
      return &row;
    }
  }
  return nullptr;
}

// Index of the entry closest to `target` on a log scale.
std::size_t nearest_log(const std::vector<SweepRow>& s, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs(std::log10(s[i].tau / target)) < std::abs(std::log10(s[best].tau / target))) best = i;
  }
  return best;
}

double nearest_theta(const std::vector<double>& thetas, double target) {
  return *std::min_element(thetas.begin(), thetas.end(), [&](double a, double b) {
    return std::abs(a - target) < std::abs(b - target);
  });
}

CheckOutcome missing(std::string name, const std::string& what) {
  return CheckOutcome{std::move(name), false, "no data: " + what};
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) out[idx[k]] = avg;
    i = j + 1;
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace

void SweepSpec::validate() const {
  if (qubits.empty()) throw std::invalid_argument("sweep: no qubits selected");
  if (gates.empty()) throw std::invalid_argument("sweep: no gates selected");
  if (noise_settings.empty()) throw std::invalid_argument("sweep: no noise setting selected");
  require_grid(thetas, "theta");
  require_grid(taus, "tau");
  if (thetas.front() <= 0.0 || thetas.back() > units::kTwoPi) {
    throw std::invalid_argument("sweep: theta grid must lie in (0, 2pi]");
  }
  if (taus.front() <= 0.0) throw std::invalid_argument("sweep: tau must be > 0");
  if (trials == 0) throw std::invalid_argument("sweep: trials must be >= 1");
  if (hy_ez && !(*hy_ez > 0.0)) throw std::invalid_argument("sweep: hy E_z must be > 0");
}

std::size_t SweepSpec::row_count() const {
  return qubits.size() * gates.size() * noise_settings.size() * thetas.size() * taus.size();
}

std::vector<SweepRow> SweepResult::tau_series(QubitKind q, GateKind g, bool noise, double theta) const {
  std::vector<SweepRow> out;
  for (const auto& row : rows) {
    if (row.qubit == q && row.gate == g && row.noise == noise && same_value(row.theta, theta)) {
      out.push_back(row);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return out;
}

std::vector<SweepRow> SweepResult::theta_series(QubitKind q, GateKind g, bool noise, double tau) const {
  std::vector<SweepRow> out;
  for (const auto& row : rows) {
    if (row.qubit == q && row.gate == g && row.noise == noise && same_value(row.tau, tau)) {
      out.push_back(row);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  return out;
}

std::vector<double> uniform_theta_grid(std::size_t n, double theta_max) {
  if (n == 0) throw std::invalid_argument("theta grid needs at least one point");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = theta_max * static_cast<double>(k + 1) / static_cast<double>(n);
  return out;
}

std::vector<double> log_tau_grid(double lo, double hi, std::size_t n) {
  if (n == 0 || !(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("invalid tau grid");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

SweepResult run_sweep(const SimulationContext& ctx, const SweepSpec& spec, const SweepResult* previous,
                      const RowSink& sink) {
  spec.validate();
  SimulationContext local = ctx;
  if (spec.hy_ez) {
    HYParams p = ctx.hy.hy();
    p.ez = *spec.hy_ez;
    local.hy = QubitModel::hybrid(p);
    const std::vector<QubitModel> models{local.ss, local.st, local.hy};
    local.signs = calibrate_signs(models, local.t_min).table;
  }

  SweepResult result;
  result.rows.reserve(spec.row_count());
  for (QubitKind q : spec.qubits) {
    for (GateKind g : spec.gates) {
      for (bool noise : spec.noise_settings) {
        for (double theta : spec.thetas) {
          for (double tau : spec.taus) {
            SweepRow row;
            row.qubit = q;
            row.gate = g;
            row.theta = theta;
            row.tau = tau;
            row.noise = noise;
            row.trials = trials_for(local, spec, q, noise);
            row.seed = spec.seed;
            row.mode = spec.mode;
            result.rows.push_back(row);
          }
        }
      }
    }
  }

  std::vector<char> done(result.rows.size(), 0);
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    SweepRow& row = result.rows[i];
    const SweepRow* hit = nullptr;
    if (previous) {
      for (const auto& old : previous->rows) {
        if (old.qubit == row.qubit && old.gate == row.gate && old.theta == row.theta &&
            old.tau == row.tau && old.noise == row.noise && old.trials == row.trials &&
            old.seed == row.seed && old.mode == row.mode) {
          hit = &old;
          break;
        }
      }
    }
    if (hit) {
      row = *hit;
      done[i] = 1;
    } else {
      pending.push_back(i);
    }
  }

  std::mutex flush_mutex;
  std::size_t flushed = 0;
  auto flush = [&] {
    while (flushed < result.rows.size() && done[flushed]) {
      if (sink) sink(result.rows[flushed]);
      ++flushed;
    }
  };
  {
    std::lock_guard lock(flush_mutex);
    flush();
  }

  parallel_for(pending.size(), spec.workers, [&](std::size_t k) {
    const std::size_t i = pending[k];
    SweepRow& row = result.rows[i];
    GateRun run;
    run.qubit = row.qubit;
    run.gate = row.gate;
    run.theta = row.theta;
    run.tau = row.tau;
    run.mode = row.mode;
    run.noise = row.noise;
    run.trials = spec.trials;
    run.seed = spec.seed;
    run.workers = 1;
    const FidelityStats s = run_gate(local, run);
    row.fidelity_mean = s.mean;
    row.fidelity_stderr = s.standard_error;
    row.trials = s.trials;
    std::lock_guard lock(flush_mutex);
    done[i] = 1;
    flush();
  });
  return result;
}

SweepResult heatmap_theta_tau(const SimulationContext& ctx, SweepSpec spec, bool noisy,
                              const SweepResult* previous, const RowSink& sink) {
  spec.noise_settings = {noisy};
  return run_sweep(ctx, spec, previous, sink);
}

SweepResult linecut_theta(const SimulationContext& ctx, SweepSpec spec, double tau,
                          const SweepResult* previous, const RowSink& sink) {
  spec.taus = {tau};
  spec.noise_settings = {false, true};
  return run_sweep(ctx, spec, previous, sink);
}

SweepResult tau_compare(const SimulationContext& ctx, SweepSpec spec, GateKind gate, double theta,
                        const SweepResult* previous, const RowSink& sink) {
  spec.qubits = {QubitKind::ss, QubitKind::st, QubitKind::hy, QubitKind::noop};
  spec.gates = {gate};
  spec.thetas = {theta};
  return run_sweep(ctx, spec, previous, sink);
}

void write_csv_header(std::ostream& out) {
  out << "qubit,gate,theta_rad,tau_ns,noise,trials,seed,mode,fidelity_mean,fidelity_stderr,infidelity_mean\n";
}

void write_csv_row(std::ostream& out, const SweepRow& row) {
  out << to_string(row.qubit) << ',' << to_string(row.gate) << ',' << format_double(row.theta) << ','
      << format_double(row.tau) << ',' << (row.noise ? 1 : 0) << ',' << row.trials << ',' << row.seed << ','
      << to_string(row.mode) << ',' << format_double(row.fidelity_mean) << ','
      << format_double(row.fidelity_stderr) << ',' << format_double(row.infidelity()) << '\n';
}

void write_csv(std::ostream& out, const SweepResult& result) {
  write_csv_header(out);
  for (const auto& row : result.rows) write_csv_row(out, row);
}

SweepResult read_csv(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) lines.push_back(line);
  // A final line without its newline is the remnant of an interrupted write.
  if (!text.empty() && text.back() != '\n' && !lines.empty()) lines.pop_back();
  if (lines.empty()) return {};
  std::ostringstream header;
  write_csv_header(header);
  if (lines.front() + "\n" != header.str()) throw ValidationError("sweep CSV: unexpected header");

  SweepResult result;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split_csv(lines[i]);
    try {
      if (f.size() != 11) throw std::invalid_argument("expected 11 fields");
      SweepRow row;
      row.qubit = parse_qubit_kind(f[0]);
      row.gate = parse_gate_kind(f[1]);
      row.theta = parse_number(f[2]);
      row.tau = parse_number(f[3]);
      if (f[4] != "0" && f[4] != "1") throw std::invalid_argument("noise must be 0 or 1");
      row.noise = f[4] == "1";
      row.trials = static_cast<std::size_t>(std::stoull(f[5]));
      row.seed = std::stoull(f[6]);
      row.mode = parse_control_mode(f[7]);
      row.fidelity_mean = parse_number(f[8]);
      row.fidelity_stderr = parse_number(f[9]);
      result.rows.push_back(row);
    } catch (const std::exception& e) {
      throw ValidationError("sweep CSV line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return result;
}

void write_svg(const std::filesystem::path& path, const SweepResult& result, PlotKind kind) {
  const std::string doc = render_svg(result, kind);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CheckOutcome check_monotonic_tau(const SweepResult& r, QubitKind q, GateKind g, double tol) {
  CheckOutcome out{"monotonic-tau " + curve_name(q, g), true, {}};
  const auto thetas = thetas_of(r, q, g, false);
  if (thetas.empty()) return missing(out.name, "noise-free rows");
  double worst = 0.0, worst_theta = 0.0, worst_tau = 0.0;
  std::size_t bad = 0;
  for (double th : thetas) {
    const auto s = r.tau_series(q, g, false, th);
    bool theta_bad = false;
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double drop = s[i - 1].infidelity() - s[i].infidelity();
      if (drop > tol) theta_bad = true;
      if (drop > worst) {
        worst = drop;
        worst_theta = th;
        worst_tau = s[i].tau;
      }
    }
    bad += theta_bad;
  }
  out.passed = bad == 0;
  out.detail = std::to_string(bad) + "/" + std::to_string(thetas.size()) +
               " thetas decrease; largest drop " + fmt(worst) +
               (worst > 0 ? " at theta=" + fmt(worst_theta) + " tau=" + fmt(worst_tau) + " ns" : "");
  return out;
}

CheckOutcome check_small_tau_limit(const SweepResult& r, double bound) {
  CheckOutcome out{"small-tau limit", true, {}};
  double worst = 0.0;
  std::string where;
  std::size_t curves = 0;
  for (QubitKind q : {QubitKind::ss, QubitKind::st, QubitKind::hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      for (double th : thetas_of(r, q, g, false)) {
        const auto s = r.tau_series(q, g, false, th);
        if (s.empty()) continue;
        ++curves;
        if (s.front().infidelity() >= worst) {
          worst = s.front().infidelity();
          where = curve_name(q, g) + " theta=" + fmt(th) + " tau=" + fmt(s.front().tau) + " ns";
        }
      }
    }
  }
  if (curves == 0) return missing(out.name, "noise-free rows");
  out.passed = worst < bound;
  out.detail = "max 1-F at smallest tau " + fmt(worst) + " (" + where + "), bound " + fmt(bound);
  return out;
}

CheckOutcome check_hy_rx_reduction(const SweepResult& r) {
  CheckOutcome out{"hy rx reduction at theta=pi", false, {}};
  const auto thetas = thetas_of(r, QubitKind::hy, GateKind::rx, false);
  if (thetas.empty()) return missing(out.name, "hy rx rows");
  const double th = nearest_theta(thetas, units::kPi);
  const auto s = r.tau_series(QubitKind::hy, GateKind::rx, false, th);
  const std::size_t ref = nearest_log(s, 1.0);
  if (ref + 1 >= s.size()) return missing(out.name, "tau beyond 1 ns");
  std::size_t best = ref + 1;
  for (std::size_t i = ref + 1; i < s.size(); ++i) {
    if (s[i].infidelity() < s[best].infidelity()) best = i;
  }
  out.passed = s[best].infidelity() < s[ref].infidelity();
  out.detail = "theta=" + fmt(th) + ": 1-F(" + fmt(s[ref].tau) + " ns)=" + fmt(s[ref].infidelity()) +
               ", min beyond = " + fmt(s[best].infidelity()) + " at " + fmt(s[best].tau) + " ns";
  return out;
}

CheckOutcome check_hy_rz_local_minimum(const SweepResult& r, double lo, double hi) {
  CheckOutcome out{"hy rz local minimum in [" + fmt(lo) + ", " + fmt(hi) + "] ns", false, {}};
  const auto thetas = thetas_of(r, QubitKind::hy, GateKind::rz, false);
  if (thetas.empty()) return missing(out.name, "hy rz rows");
  std::size_t hits = 0;
  std::string first;
  std::size_t points = 0;
  for (double th : thetas) {
    const auto s = r.tau_series(QubitKind::hy, GateKind::rz, false, th);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i].tau < lo || s[i].tau > hi) continue;
      ++points;
      const double y = s[i].infidelity();
      if (y < s[i - 1].infidelity() - 1e-12 && y < s[i + 1].infidelity() - 1e-12) {
        if (hits++ == 0) first = "theta=" + fmt(th) + " tau=" + fmt(s[i].tau) + " ns 1-F=" + fmt(y);
      }
    }
  }
  if (points == 0) return missing(out.name, "interior tau points in range");
  out.passed = hits > 0;
  out.detail = hits ? std::to_string(hits) + " minima, first " + first
                    : "no interior minimum over " + std::to_string(thetas.size()) + " thetas (" +
                          std::to_string(points) + " interior points)";
  return out;
}

CheckOutcome check_hy_rz_no_saturation(const SweepResult& r, double margin) {
  CheckOutcome out{"hy rz no saturation to no-op", false, {}};
  const auto thetas = thetas_of(r, QubitKind::hy, GateKind::rz, false);
  if (thetas.empty()) return missing(out.name, "hy rz rows");
  double closest = 1.0;
  double at = 0.0, tau = 0.0;
  for (double th : thetas) {
    // Idle evolution leaves psi0 in place: 1-F = sin^2(theta/2), 0.5 at pi/2.
    const double idle = std::pow(std::sin(0.5 * th), 2);
    const auto s = r.tau_series(QubitKind::hy, GateKind::rz, false, th);
    const double d = std::abs(s.back().infidelity() - idle);
    if (d < closest) {
      closest = d;
      at = th;
      tau = s.back().tau;
    }
  }
  out.passed = closest > margin;
  out.detail = "min |1-F - (1-F)_noop| at largest tau " + fmt(closest) + " (theta=" + fmt(at) + ", tau=" + fmt(tau) +
               " ns), margin " + fmt(margin);
  return out;
}

CheckOutcome check_noise_gap(const SweepResult& r, QubitKind q, GateKind g, double k) {
  CheckOutcome out{"noise gap " + curve_name(q, g), false, {}};
  std::size_t n = 0, bad = 0;
  double min_z = std::numeric_limits<double>::infinity();
  for (const auto& d : r.rows) {
    if (d.qubit != q || d.gate != g || !d.noise) continue;
    const SweepRow* u = find_row(r, q, g, false, d.theta, d.tau);
    if (!u) continue;
    ++n;
    const double se = std::hypot(d.fidelity_stderr, u->fidelity_stderr);
    const double gap = d.infidelity() - u->infidelity();
    const double z = se > 0 ? gap / se : (gap > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    min_z = std::min(min_z, z);
    if (!(gap > k * se)) ++bad;
  }
  if (n == 0) return missing(out.name, "paired disturbed/undisturbed rows");
  out.passed = bad == 0;
  out.detail = std::to_string(n - bad) + "/" + std::to_string(n) + " points beyond " + fmt(k) +
               " stderr; min z " + fmt(min_z);
  return out;
}

CheckOutcome check_ss_rx_theta_trend(const SweepResult& r, double min_rho) {
  CheckOutcome out{"ss rx disturbed infidelity rises with theta", false, {}};
  const auto taus = taus_of(r, QubitKind::ss, GateKind::rx, true);
  if (taus.empty()) return missing(out.name, "disturbed ss rx rows");
  const auto s = r.theta_series(QubitKind::ss, GateKind::rx, true, taus.front());
  if (s.size() < 3) return missing(out.name, "at least three thetas");
  std::vector<double> x, y;
  for (const auto& row : s) {
    x.push_back(row.theta);
    y.push_back(row.infidelity());
  }
  const double rho = pearson(ranks(x), ranks(y));
  out.passed = rho > min_rho;
  out.detail = "Spearman rho " + fmt(rho) + " over " + std::to_string(s.size()) + " thetas, need > " + fmt(min_rho);
  return out;
}

CheckOutcome check_st_rz_flat(const SweepResult& r, double k) {
  CheckOutcome out{"st rz disturbed infidelity flat in theta", false, {}};
  const auto taus = taus_of(r, QubitKind::st, GateKind::rz, true);
  if (taus.empty()) return missing(out.name, "disturbed st rz rows");
  const auto s = r.theta_series(QubitKind::st, GateKind::rz, true, taus.front());
  if (s.size() < 3) return missing(out.name, "at least three thetas");
  double mx = 0, my = 0;
  for (const auto& row : s) {
    mx += row.theta;
    my += row.infidelity();
  }
  mx /= static_cast<double>(s.size());
  my /= static_cast<double>(s.size());
  double sxx = 0, sxy = 0, var = 0;
  for (const auto& row : s) {
    const double dx = row.theta - mx;
    sxx += dx * dx;
    sxy += dx * (row.infidelity() - my);
    var += dx * dx * row.fidelity_stderr * row.fidelity_stderr;
  }
  const double slope = sxy / sxx;
  const double se = std::sqrt(var) / sxx;
  out.passed = std::abs(slope) <= k * se;
  out.detail = "slope " + fmt(slope) + " per rad, stderr " + fmt(se);
  return out;
}

CheckOutcome check_hy_rx_smallest_gap(const SweepResult& r) {
  CheckOutcome out{"hy rx smallest disturbed/undisturbed gap", false, {}};
  std::vector<std::pair<std::string, double>> gaps;
  double hy_rx = std::numeric_limits<double>::quiet_NaN();
  for (QubitKind q : {QubitKind::ss, QubitKind::st, QubitKind::hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& d : r.rows) {
        if (d.qubit != q || d.gate != g || !d.noise) continue;
        const SweepRow* u = find_row(r, q, g, false, d.theta, d.tau);
        if (!u) continue;
        sum += std::log10(std::max(d.infidelity(), kInfidelityFloor) /
                          std::max(u->infidelity(), kInfidelityFloor));
        ++n;
      }
      if (n == 0) continue;
      gaps.emplace_back(curve_name(q, g), sum / static_cast<double>(n));
      if (q == QubitKind::hy && g == GateKind::rx) hy_rx = gaps.back().second;
    }
  }
  if (std::isnan(hy_rx) || gaps.size() < 2) return missing(out.name, "paired rows for hy rx and another gate");
  out.passed = true;
  for (const auto& [name, gap] : gaps) {
    if (name != "hy rx" && gap <= hy_rx) out.passed = false;
    out.detail += (out.detail.empty() ? "" : ", ") + name + "=" + fmt(gap);
  }
  out.detail = "mean log10 gap: " + out.detail;
  return out;
}

CheckOutcome check_disturbed_range(const SweepResult& r, double lo, double hi) {
  CheckOutcome out{"disturbed fidelity in [" + fmt(lo) + ", " + fmt(hi) + "]", false, {}};
  std::size_t n = 0, outside = 0;
  double fmin = 1.0, fmax = 0.0;
  std::map<std::string, std::pair<double, double>> per;
  for (const auto& row : r.rows) {
    if (!row.noise || row.qubit == QubitKind::noop) continue;
    ++n;
    fmin = std::min(fmin, row.fidelity_mean);
    fmax = std::max(fmax, row.fidelity_mean);
    auto [it, fresh] = per.try_emplace(curve_name(row.qubit, row.gate), row.fidelity_mean, row.fidelity_mean);
    if (!fresh) {
      it->second.first = std::min(it->second.first, row.fidelity_mean);
      it->second.second = std::max(it->second.second, row.fidelity_mean);
    }
    if (row.fidelity_mean < lo || row.fidelity_mean > hi) ++outside;
  }
  if (n == 0) return missing(out.name, "disturbed rows");
  out.passed = outside == 0;
  out.detail = std::to_string(outside) + "/" + std::to_string(n) + " outside; overall [" + fmt(fmin) + ", " +
               fmt(fmax) + "]";
  for (const auto& [name, range] : per) {
    out.detail += "; " + name + " [" + fmt(range.first) + ", " + fmt(range.second) + "]";
  }
  return out;
}

CheckOutcome check_noop_half(const SweepResult& r, double tol) {
  CheckOutcome out{"no-operation fidelity 1/2", false, {}};
  std::size_t n = 0;
  double worst = 0.0;
  for (const auto& row : r.rows) {
    if (row.qubit != QubitKind::noop) continue;
    ++n;
    worst = std::max(worst, std::abs(row.fidelity_mean - 0.5));
  }
  if (n == 0) return missing(out.name, "noop rows");
  out.passed = worst <= tol;
  out.detail = "max |F - 0.5| " + fmt(worst) + " over " + std::to_string(n) + " rows";
  return out;
}

CheckOutcome check_ss_lowest(const SweepResult& r, GateKind g, bool noise, double lo, double hi) {
  CheckOutcome out{std::string("ss lowest ") + std::string(to_string(g)) + (noise ? " disturbed" : "") +
                       " in [" + fmt(lo) + ", " + fmt(hi) + "] ns",
                   false, {}};
  const auto thetas = thetas_of(r, QubitKind::ss, g, noise);
  if (thetas.empty()) return missing(out.name, "ss rows");
  std::size_t n = 0, bad = 0;
  std::string first_bad;
  for (const auto& row : r.tau_series(QubitKind::ss, g, noise, thetas.front())) {
    if (row.tau < lo || row.tau > hi) continue;
    const SweepRow* st = find_row(r, QubitKind::st, g, noise, row.theta, row.tau);
    const SweepRow* hy = find_row(r, QubitKind::hy, g, noise, row.theta, row.tau);
    if (!st || !hy) continue;
    ++n;
    if (!(row.infidelity() < st->infidelity() && row.infidelity() < hy->infidelity())) {
      if (bad++ == 0) first_bad = " (first at tau=" + fmt(row.tau) + " ns)";
    }
  }
  if (n == 0) return missing(out.name, "matching st/hy rows in range");
  out.passed = bad == 0;
  out.detail = std::to_string(n - bad) + "/" + std::to_string(n) + " taus with ss below st and hy" + first_bad;
  return out;
}

CheckOutcome check_plateau(const SweepResult& r, QubitKind q, GateKind g, bool noise, double max_change) {
  CheckOutcome out{"plateau " + curve_name(q, g) + (noise ? " disturbed" : ""), false, {}};
  const auto thetas = thetas_of(r, q, g, noise);
  if (thetas.empty()) return missing(out.name, "rows");
  const auto s = r.tau_series(q, g, noise, thetas.front());
  if (s.size() < 3) return missing(out.name, "three taus");
  const double t0 = s.front().tau;
  const std::size_t i1 = nearest_log(s, 10.0 * t0), i2 = nearest_log(s, 100.0 * t0);
  if (std::abs(std::log10(s[i2].tau / (100.0 * t0))) > 0.1 || i1 == 0 || i2 == i1) {
    return missing(out.name, "grid covering two decades");
  }
  const double y0 = s.front().infidelity(), y1 = s[i1].infidelity(), y2 = s[i2].infidelity();
  const double c1 = std::abs(y1 - y0) / std::max(y0, kInfidelityFloor);
  const double c2 = std::abs(y2 - y1) / std::max(y1, kInfidelityFloor);
  out.passed = c1 < max_change && c2 < max_change;
  out.detail = "relative change per decade " + fmt(c1) + ", " + fmt(c2) + " (1-F " + fmt(y0) + " -> " + fmt(y1) +
               " -> " + fmt(y2) + ")";
  return out;
}

CheckOutcome check_noop_approach(const SweepResult& r, QubitKind q, GateKind g, double rel) {
  CheckOutcome out{"no-operation approach " + curve_name(q, g), false, {}};
  const auto thetas = thetas_of(r, q, g, false);
  if (thetas.empty()) return missing(out.name, "noise-free rows");
  const auto s = r.tau_series(q, g, false, thetas.front());
  const SweepRow* noop = find_row(r, QubitKind::noop, g, false, thetas.front(), s.back().tau);
  if (!noop) return missing(out.name, "noop row at the largest tau");
  const double d = std::abs(s.back().infidelity() - noop->infidelity()) / noop->infidelity();
  out.passed = d < rel;
  out.detail = "1-F " + fmt(s.back().infidelity()) + " vs " + fmt(noop->infidelity()) + " at tau=" +
               fmt(s.back().tau) + " ns (relative " + fmt(d) + ")";
  return out;
}

std::vector<CheckOutcome> verify(const SweepResult& r) {
  std::vector<CheckOutcome> out;
  auto has = [&](QubitKind q, GateKind g, bool noise) { return !thetas_of(r, q, g, noise).empty(); };
  auto multi_tau = [&](QubitKind q, GateKind g, bool noise) { return taus_of(r, q, g, noise).size() > 1; };
  const bool compare = std::any_of(r.rows.begin(), r.rows.end(), [](const auto& row) {
    return row.qubit == QubitKind::noop;
  });

  for (QubitKind q : {QubitKind::ss, QubitKind::st}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      if (multi_tau(q, g, false) && !compare) out.push_back(check_monotonic_tau(r, q, g));
    }
  }
  bool any_multi = false;
  for (QubitKind q : {QubitKind::ss, QubitKind::st, QubitKind::hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) any_multi = any_multi || multi_tau(q, g, false);
  }
  if (any_multi) out.push_back(check_small_tau_limit(r));
  if (multi_tau(QubitKind::hy, GateKind::rx, false) && !compare) out.push_back(check_hy_rx_reduction(r));
  if (multi_tau(QubitKind::hy, GateKind::rz, false)) {
    if (!compare) out.push_back(check_hy_rz_local_minimum(r));
    out.push_back(check_hy_rz_no_saturation(r));
  }

  bool paired = false;
  for (QubitKind q : {QubitKind::ss, QubitKind::st, QubitKind::hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      if (has(q, g, true) && has(q, g, false)) {
        out.push_back(check_noise_gap(r, q, g));
        paired = true;
      }
    }
  }
  if (paired && !compare) {
    if (has(QubitKind::ss, GateKind::rx, true)) out.push_back(check_ss_rx_theta_trend(r));
    if (has(QubitKind::st, GateKind::rz, true)) out.push_back(check_st_rz_flat(r));
    out.push_back(check_hy_rx_smallest_gap(r));
  }
  if (std::any_of(r.rows.begin(), r.rows.end(), [](const auto& row) { return row.noise; }) && !compare) {
    out.push_back(check_disturbed_range(r));
  }

  if (compare) {
    out.push_back(check_noop_half(r));
    for (bool noise : {false, true}) {
      if (multi_tau(QubitKind::ss, GateKind::rx, noise)) {
        out.push_back(check_ss_lowest(r, GateKind::rx, noise, 0.01, 10.0));
      }
    }
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      for (QubitKind q : {QubitKind::ss, QubitKind::st}) {
        if (multi_tau(q, g, true)) out.push_back(check_plateau(r, q, g, true));
        if (multi_tau(q, g, false) && has(QubitKind::noop, g, false)) out.push_back(check_noop_approach(r, q, g));
      }
    }
  }
  return out;
}

}  // namespace spinsim
