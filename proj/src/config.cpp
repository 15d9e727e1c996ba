#include "spinsim/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "spinsim/errors.hpp"
#include "spinsim/experiments.hpp"

namespace spinsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Located {
  std::string source;
  int line;
  std::string key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "': " + what);
  }
};

double to_double(const std::string& text, const Located& at) {
  if (text.empty()) at.fail("missing value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
    at.fail("not a finite number: '" + text + "'");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& text, const Located& at) {
  if (text.empty() || text[0] == '-' || text[0] == '+') at.fail("not a non-negative integer: '" + text + "'");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end != text.c_str() + text.size() || errno == ERANGE) {
    at.fail("not a non-negative integer: '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text, const Located& at) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  at.fail("not a boolean: '" + text + "'");
}

std::vector<double> to_list(const std::string& text, const Located& at) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), at));
  if (out.empty()) at.fail("empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Located&)>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v, const Located& at) { c.*field = to_double(v, at); };
}

// Range-checked at parse time so the error carries the line.
Setter nonnegative(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v, const Located& at) {
    const double x = to_double(v, at);
    if (x < 0.0) at.fail("must be >= 0, got " + v);
    c.*field = x;
  };
}

Setter positive(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v, const Located& at) {
    const double x = to_double(v, at);
    if (!(x > 0.0)) at.fail("must be > 0, got " + v);
    c.*field = x;
  };
}

Setter count(std::size_t RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v, const Located& at) {
    c.*field = static_cast<std::size_t>(to_unsigned(v, at));
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"ss.omega_over_2pi_hz", positive(&RunConfig::ss_omega_over_2pi_hz)},
      {"ss.delta_omega_z_over_2pi_hz", real(&RunConfig::ss_delta_omega_z_over_2pi_hz)},
      {"ss.sigma_omega_over_2pi_hz", nonnegative(&RunConfig::ss_sigma_omega_over_2pi_hz)},
      {"ss.sigma_delta_omega_z_over_2pi_hz", nonnegative(&RunConfig::ss_sigma_delta_omega_z_over_2pi_hz)},
      {"st.j_nev", positive(&RunConfig::st_j_nev)},
      {"st.delta_ez_nev", positive(&RunConfig::st_delta_ez_nev)},
      {"st.sigma_j_nev", nonnegative(&RunConfig::st_sigma_j_nev)},
      {"st.sigma_delta_ez_nev", nonnegative(&RunConfig::st_sigma_delta_ez_nev)},
      {"hy.jmax_uev", positive(&RunConfig::hy_jmax_uev)},
      {"hy.j_uev", positive(&RunConfig::hy_j_uev)},
      {"hy.ez_uev", positive(&RunConfig::hy_ez_uev)},
      {"hy.sigma_j_nev", nonnegative(&RunConfig::hy_sigma_j_nev)},
      {"hy.ez_scan_uev",
       [](RunConfig& c, const std::string& v, const Located& at) { c.hy_ez_scan_uev = to_list(v, at); }},
      {"simulation.t_min_ps", positive(&RunConfig::t_min_ps)},
      {"simulation.trials", count(&RunConfig::trials)},
      {"simulation.master_seed",
       [](RunConfig& c, const std::string& v, const Located& at) { c.master_seed = to_unsigned(v, at); }},
      {"simulation.dt_divisor", real(&RunConfig::dt_divisor)},
      {"simulation.mode",
       [](RunConfig& c, const std::string& v, const Located& at) {
         try {
           c.mode = parse_control_mode(v);
         } catch (const std::exception& e) {
           at.fail(e.what());
         }
       }},
      {"simulation.noise_when_off",
       [](RunConfig& c, const std::string& v, const Located& at) { c.noise_when_off = to_bool(v, at); }},
      {"simulation.tail_ns", nonnegative(&RunConfig::tail_ns)},
      {"simulation.convergence_tol", positive(&RunConfig::convergence_tol)},
      {"simulation.max_refinements",
       [](RunConfig& c, const std::string& v, const Located& at) {
         const auto n = to_unsigned(v, at);
         if (n > 20) at.fail("must be <= 20");
         c.max_refinements = static_cast<int>(n);
       }},
      {"sweep.theta_points", count(&RunConfig::theta_points)},
      {"sweep.theta_max_over_pi", real(&RunConfig::theta_max_over_pi)},
      {"sweep.tau_points", count(&RunConfig::tau_points)},
      {"sweep.tau_min_ns", positive(&RunConfig::tau_min_ns)},
      {"sweep.tau_max_ns", real(&RunConfig::tau_max_ns)},
      {"sweep.linecut_tau_ns", positive(&RunConfig::linecut_tau_ns)},
      {"sweep.compare_tau_points", count(&RunConfig::compare_tau_points)},
      {"sweep.compare_tau_min_ns", positive(&RunConfig::compare_tau_min_ns)},
      {"sweep.compare_tau_max_ns", real(&RunConfig::compare_tau_max_ns)},
      {"sweep.compare_theta_over_pi", real(&RunConfig::compare_theta_over_pi)},
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("key '" + key + "': " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(ss_omega_over_2pi_hz > 0.0, "ss.omega_over_2pi_hz", "must be > 0");
  require(ss_sigma_omega_over_2pi_hz >= 0.0, "ss.sigma_omega_over_2pi_hz", "must be >= 0");
  require(ss_sigma_delta_omega_z_over_2pi_hz >= 0.0, "ss.sigma_delta_omega_z_over_2pi_hz", "must be >= 0");
  require(st_j_nev > 0.0, "st.j_nev", "must be > 0");
  require(st_delta_ez_nev > 0.0, "st.delta_ez_nev", "must be > 0");
  require(st_sigma_j_nev >= 0.0, "st.sigma_j_nev", "must be >= 0");
  require(st_sigma_delta_ez_nev >= 0.0, "st.sigma_delta_ez_nev", "must be >= 0");
  require(hy_jmax_uev > 0.0, "hy.jmax_uev", "must be > 0");
  require(hy_j_uev > 0.0, "hy.j_uev", "must be > 0");
  require(hy_ez_uev > 0.0, "hy.ez_uev", "must be > 0");
  require(hy_sigma_j_nev >= 0.0, "hy.sigma_j_nev", "must be >= 0");
  for (double e : hy_ez_scan_uev) require(e > 0.0, "hy.ez_scan_uev", "entries must be > 0");
  require(t_min_ps > 0.0, "simulation.t_min_ps", "must be > 0");
  require(trials >= 1, "simulation.trials", "must be >= 1");
  require(dt_divisor >= 20.0, "simulation.dt_divisor", "must be >= 20");
  require(tail_ns >= 0.0, "simulation.tail_ns", "must be >= 0");
  require(convergence_tol > 0.0, "simulation.convergence_tol", "must be > 0");
  require(theta_points >= 1, "sweep.theta_points", "must be >= 1");
  require(theta_max_over_pi > 0.0 && theta_max_over_pi <= 2.0, "sweep.theta_max_over_pi",
          "must lie in (0, 2]");
  require(tau_points >= 1, "sweep.tau_points", "must be >= 1");
  require(tau_min_ns > 0.0, "sweep.tau_min_ns", "must be > 0");
  require(tau_max_ns >= tau_min_ns && (tau_points == 1 || tau_max_ns > tau_min_ns), "sweep.tau_max_ns",
          "must exceed sweep.tau_min_ns");
  require(linecut_tau_ns > 0.0, "sweep.linecut_tau_ns", "must be > 0");
  require(compare_tau_points >= 1, "sweep.compare_tau_points", "must be >= 1");
  require(compare_tau_min_ns > 0.0, "sweep.compare_tau_min_ns", "must be > 0");
  require(compare_tau_max_ns >= compare_tau_min_ns &&
              (compare_tau_points == 1 || compare_tau_max_ns > compare_tau_min_ns),
          "sweep.compare_tau_max_ns", "must exceed sweep.compare_tau_min_ns");
  require(compare_theta_over_pi > 0.0 && compare_theta_over_pi <= 2.0, "sweep.compare_theta_over_pi",
          "must lie in (0, 2]");
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "ss" && section != "st" && section != "hy" && section != "simulation" &&
          section != "sweep") {
        throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": key '" + key + "' outside any section");
    }
    const std::string full = section + "." + key;
    const Located at{source, line_no, full};
    const auto it = setters().find(full);
    if (it == setters().end()) at.fail("unknown key");
    if (!seen.insert(full).second) at.fail("duplicate key");
    it->second(config, value, at);
  }
  if (!seen.count("hy.ez_uev")) throw ConfigError(source + ": required key 'hy.ez_uev' is missing");
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const RunConfig& c) {
  auto num = [](double v) { return format_double(v); };
  out << "[ss]\n"
      << "omega_over_2pi_hz = " << num(c.ss_omega_over_2pi_hz) << "\n"
      << "delta_omega_z_over_2pi_hz = " << num(c.ss_delta_omega_z_over_2pi_hz) << "\n"
      << "sigma_omega_over_2pi_hz = " << num(c.ss_sigma_omega_over_2pi_hz) << "\n"
      << "sigma_delta_omega_z_over_2pi_hz = " << num(c.ss_sigma_delta_omega_z_over_2pi_hz) << "\n\n"
      << "[st]\n"
      << "j_nev = " << num(c.st_j_nev) << "\n"
      << "delta_ez_nev = " << num(c.st_delta_ez_nev) << "\n"
      << "sigma_j_nev = " << num(c.st_sigma_j_nev) << "\n"
      << "sigma_delta_ez_nev = " << num(c.st_sigma_delta_ez_nev) << "\n\n"
      << "[hy]\n"
      << "jmax_uev = " << num(c.hy_jmax_uev) << "\n"
      << "j_uev = " << num(c.hy_j_uev) << "\n"
      << "ez_uev = " << num(c.hy_ez_uev) << "\n"
      << "sigma_j_nev = " << num(c.hy_sigma_j_nev) << "\n"
      << "ez_scan_uev = ";
  for (std::size_t i = 0; i < c.hy_ez_scan_uev.size(); ++i) {
    out << (i ? ", " : "") << num(c.hy_ez_scan_uev[i]);
  }
  out << "\n\n[simulation]\n"
      << "t_min_ps = " << num(c.t_min_ps) << "\n"
      << "trials = " << c.trials << "\n"
      << "master_seed = " << c.master_seed << "\n"
      << "dt_divisor = " << num(c.dt_divisor) << "\n"
      << "mode = " << to_string(c.mode) << "\n"
      << "noise_when_off = " << (c.noise_when_off ? "true" : "false") << "\n"
      << "tail_ns = " << num(c.tail_ns) << "\n"
      << "convergence_tol = " << num(c.convergence_tol) << "\n"
      << "max_refinements = " << c.max_refinements << "\n\n"
      << "[sweep]\n"
      << "theta_points = " << c.theta_points << "\n"
      << "theta_max_over_pi = " << num(c.theta_max_over_pi) << "\n"
      << "tau_points = " << c.tau_points << "\n"
      << "tau_min_ns = " << num(c.tau_min_ns) << "\n"
      << "tau_max_ns = " << num(c.tau_max_ns) << "\n"
      << "linecut_tau_ns = " << num(c.linecut_tau_ns) << "\n"
      << "compare_tau_points = " << c.compare_tau_points << "\n"
      << "compare_tau_min_ns = " << num(c.compare_tau_min_ns) << "\n"
      << "compare_tau_max_ns = " << num(c.compare_tau_max_ns) << "\n"
      << "compare_theta_over_pi = " << num(c.compare_theta_over_pi) << "\n";
}

SimulationContext make_context(const RunConfig& c) {
  c.validate();
  SimulationContext ctx;
  ctx.ss = QubitModel::single_spin(SSParams{c.ss_omega_over_2pi_hz, c.ss_delta_omega_z_over_2pi_hz});
  ctx.st = QubitModel::singlet_triplet(
      STParams{units::neV_to_ueV(c.st_j_nev), units::neV_to_ueV(c.st_delta_ez_nev)});
  ctx.hy = QubitModel::hybrid(HYParams{c.hy_ez_uev, c.hy_j_uev, c.hy_jmax_uev});

  const double s_omega = units::hz_to_rad_per_ns(c.ss_sigma_omega_over_2pi_hz);
  const double s_dwz = units::hz_to_rad_per_ns(c.ss_sigma_delta_omega_z_over_2pi_hz);
  // Channel order follows QubitModel::channels().
  ctx.ss_noise = NoiseSpec{{s_omega, s_omega, s_dwz}, c.noise_when_off};
  ctx.st_noise = NoiseSpec{{units::neV_to_ueV(c.st_sigma_delta_ez_nev), units::neV_to_ueV(c.st_sigma_j_nev)},
                           c.noise_when_off};
  const double s_j = units::neV_to_ueV(c.hy_sigma_j_nev);
  ctx.hy_noise = NoiseSpec{{s_j, s_j, s_j}, c.noise_when_off};

  ctx.t_min = units::ps_to_ns(c.t_min_ps);
  ctx.tail = c.tail_ns;
  ctx.evolution.dt.divisor = c.dt_divisor;
  ctx.evolution.convergence_tol = c.convergence_tol;
  ctx.evolution.max_refinements = c.max_refinements;

  const std::vector<QubitModel> models{ctx.ss, ctx.st, ctx.hy};
  ctx.signs = calibrate_signs(models, ctx.t_min).table;
  return ctx;
}

std::vector<double> theta_grid(const RunConfig& c) {
  return uniform_theta_grid(c.theta_points, c.theta_max_over_pi * units::kPi);
}

std::vector<double> tau_grid(const RunConfig& c) { return log_tau_grid(c.tau_min_ns, c.tau_max_ns, c.tau_points); }

std::vector<double> compare_tau_grid(const RunConfig& c) {
  return log_tau_grid(c.compare_tau_min_ns, c.compare_tau_max_ns, c.compare_tau_points);
}

}  // namespace spinsim
