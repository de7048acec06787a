#include "nlpme/run_config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nlpme/verification_harness.hpp"

namespace nlpme {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& v, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& v, long& out) {
  try {
    size_t pos = 0;
    out = std::stol(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

std::string config_hash(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << hash;
  return ss.str();
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig cfg;
  cfg.config_text = buffer.str();

  std::vector<std::string> errors;
  std::map<std::string, bool> seen;

  // setters keyed by "section.key"
  auto set_str = [](std::string& field) {
    return [&field](const std::string& v, std::string* err) {
      (void)err;
      field = v;
    };
  };
  auto set_double = [](double& field) {
    return [&field](const std::string& v, std::string* err) {
      if (!parse_double(v, field)) *err = "expected a number, got '" + v + "'";
    };
  };
  auto set_int = [](int& field) {
    return [&field](const std::string& v, std::string* err) {
      long tmp;
      if (!parse_int(v, tmp))
        *err = "expected an integer, got '" + v + "'";
      else
        field = int(tmp);
    };
  };
  using Setter = std::function<void(const std::string&, std::string*)>;
  std::map<std::string, Setter> table;
  table["equation.dimension"] = set_int(cfg.dimension);
  table["equation.box_half"] = set_double(cfg.box_half);
  table["equation.alpha"] = set_double(cfg.alpha);
  table["equation.measure"] = set_str(cfg.measure);
  table["equation.phi1"] = set_str(cfg.phi1);
  table["equation.phi2"] = set_str(cfg.phi2);
  table["equation.phi1_m"] = set_double(cfg.phi1_m);
  table["equation.phi1_a"] = set_double(cfg.phi1_a);
  table["equation.phi1_b"] = set_double(cfg.phi1_b);
  table["equation.phi2_m"] = set_double(cfg.phi2_m);
  table["equation.phi2_a"] = set_double(cfg.phi2_a);
  table["equation.phi2_b"] = set_double(cfg.phi2_b);
  table["equation.operator1"] = set_str(cfg.operator1);
  table["equation.operator2"] = set_str(cfg.operator2);
  table["equation.r_rule"] = set_str(cfg.r_rule);
  table["equation.R_tail"] = set_double(cfg.R_tail);
  table["equation.lagrange_order"] = set_int(cfg.lagrange_order);
  table["equation.theta"] = set_double(cfg.theta);
  table["equation.sigma"] = set_str(cfg.sigma);
  table["equation.eta_rule"] = set_str(cfg.eta_rule);
  table["equation.initial"] = set_str(cfg.initial);
  table["discretization.h"] = set_double(cfg.h);
  table["discretization.dt_rule"] = set_str(cfg.dt_rule);
  table["discretization.T"] = set_double(cfg.T);
  table["output.directory"] = set_str(cfg.out_dir);
  table["output.snapshot_every"] = set_int(cfg.snapshot_every);
  table["tolerances.elliptic"] = set_double(cfg.tol);
  table["tolerances.cfl_policy"] = set_str(cfg.cfl_policy);
  table["study.levels"] = set_int(cfg.levels);
  table["study.seed"] = [&cfg](const std::string& v, std::string* err) {
    long tmp;
    if (!parse_int(v, tmp) || tmp < 0)
      *err = "expected a nonnegative integer, got '" + v + "'";
    else
      cfg.seed = (unsigned long)(tmp);
  };

  std::string section;
  std::string line;
  int lineno = 0;
  std::istringstream stream(cfg.config_text);
  while (std::getline(stream, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) +
                       ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const std::string full = section + "." + key;
    const auto it = table.find(full);
    if (it == table.end()) {
      errors.push_back("line " + std::to_string(lineno) + ": unknown key '" +
                       full + "'");
      continue;
    }
    std::string err;
    it->second(value, &err);
    if (!err.empty())
      errors.push_back("line " + std::to_string(lineno) + ": " + full + ": " +
                       err);
    seen[full] = true;
  }

  for (const char* req : {"equation.phi1", "equation.operator1",
                          "discretization.h", "discretization.T"})
    if (!seen.count(req))
      errors.push_back(std::string("missing required key '") + req + "'");

  // semantic validation
  if (cfg.dimension < 1 || cfg.dimension > kMaxDim)
    errors.push_back("equation.dimension out of range");
  if (cfg.h <= 0.0) errors.push_back("discretization.h must be positive");
  if (cfg.T <= 0.0) errors.push_back("discretization.T must be positive");
  for (const std::string* s : {&cfg.phi1, &cfg.phi2})
    if (*s != "identity" && *s != "power" && *s != "stefan")
      errors.push_back("unknown nonlinearity '" + *s + "'");
  for (const std::string* s : {&cfg.operator1, &cfg.operator2})
    if (*s != "zero" && *s != "local_laplacian" && *s != "midpoint" &&
        *s != "multilinear" && *s != "lagrange" &&
        *s != "vanishing_viscosity" && *s != "vv_midpoint" &&
        *s != "fractional_laplacian" && *s != "sigma")
      errors.push_back("unknown operator recipe '" + *s + "'");
  if (cfg.cfl_policy != "enforce" && cfg.cfl_policy != "warn" &&
      cfg.cfl_policy != "off")
    errors.push_back("tolerances.cfl_policy must be enforce|warn|off");
  if (cfg.measure != "fractional" && cfg.measure != "zero")
    errors.push_back("equation.measure must be fractional|zero");

  if (!errors.empty()) {
    std::string msg = "config " + path + " invalid:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return cfg;
}

Nonlinearity make_nonlinearity(const std::string& kind, double m, double a,
                               double b) {
  if (kind == "identity") return identity_nonlinearity();
  if (kind == "power") return power_nonlinearity(m);
  if (kind == "stefan") return stefan_nonlinearity(a, b);
  throw std::invalid_argument("unknown nonlinearity '" + kind + "'");
}

namespace {

double resolve_rule(const std::string& rule, double h,
                    const std::string& what) {
  if (rule == "h") return h;
  if (rule == "h2") return h * h;
  if (rule == "sqrt_h") return std::sqrt(h);
  if (rule.rfind("const:", 0) == 0) {
    double v;
    if (parse_double(rule.substr(6), v)) return v;
  }
  throw std::invalid_argument("bad " + what + " rule '" + rule + "'");
}

LevyMeasureSpec measure_of(const RunConfig& cfg) {
  if (cfg.measure == "zero") return zero_measure(cfg.dimension);
  return fractional_measure(cfg.alpha, cfg.dimension);
}

std::vector<Coord> parse_sigma(const std::string& text, int dim) {
  std::vector<Coord> cols;
  std::istringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ';')) {
    std::istringstream ps(piece);
    Coord col{};
    for (int i = 0; i < dim; ++i)
      if (!(ps >> col[i]))
        throw std::invalid_argument("sigma column needs " +
                                    std::to_string(dim) + " entries");
    cols.push_back(col);
  }
  if (cols.empty()) throw std::invalid_argument("sigma matrix is empty");
  return cols;
}

}  // namespace

double resolve_r(const std::string& rule, double h) {
  return resolve_rule(rule, h, "r");
}

DiscreteOperator make_operator(const RunConfig& cfg, const std::string& recipe,
                               double h) {
  const int dim = cfg.dimension;
  const double r = resolve_r(cfg.r_rule, h);
  if (recipe == "zero") return zero_operator(dim, h);
  if (recipe == "local_laplacian") return local_laplacian_operator(h, dim);
  if (recipe == "midpoint")
    return midpoint_operator(measure_of(cfg), r, h, dim, cfg.R_tail);
  if (recipe == "multilinear")
    return multilinear_operator(measure_of(cfg), r, h, dim, cfg.R_tail);
  if (recipe == "lagrange")
    return lagrange_operator(measure_of(cfg), cfg.lagrange_order, r, h, dim,
                             cfg.R_tail);
  if (recipe == "vanishing_viscosity")
    return vanishing_viscosity_operator(measure_of(cfg), r, h, dim);
  if (recipe == "vv_midpoint")
    return add(vanishing_viscosity_operator(measure_of(cfg), r, h, dim),
               midpoint_operator(measure_of(cfg), r, h, dim, cfg.R_tail));
  if (recipe == "fractional_laplacian")
    return discrete_fractional_laplacian(cfg.alpha, h, dim, 1e-11, cfg.R_tail);
  if (recipe == "sigma")
    return sigma_operator(parse_sigma(cfg.sigma, dim), h, dim,
                          resolve_rule(cfg.eta_rule, h, "eta"));
  throw std::invalid_argument("unknown operator recipe '" + recipe + "'");
}

Field initial_field(const RunConfig& cfg, const UniformGrid& grid) {
  if (cfg.initial == "gaussian")
    return cell_average(
        [&](const Coord& x) {
          double s = 0.0;
          for (int i = 0; i < grid.dim; ++i) s += x[i] * x[i];
          return std::exp(-s);
        },
        grid);
  if (cfg.initial == "bump")
    return cell_average(
        [&](const Coord& x) {
          double s = 0.0;
          for (int i = 0; i < grid.dim; ++i) s += x[i] * x[i];
          if (s >= 4.0 - 1e-14) return 0.0;
          return std::exp(-1.0 / (4.0 - s));
        },
        grid);
  if (cfg.initial == "box")
    return cell_average(
        [&](const Coord& x) {
          for (int i = 0; i < grid.dim; ++i)
            if (std::abs(x[i]) > 1.0) return 0.0;
          return 1.0;
        },
        grid);
  throw std::invalid_argument("unknown initial data '" + cfg.initial + "'");
}

SchemeConfig build_scheme(const RunConfig& cfg, double h) {
  SchemeConfig scheme;
  if (cfg.theta >= 0.0) {
    if (cfg.theta > 1.0)
      throw std::invalid_argument("theta split must lie in [0,1]");
    const DiscreteOperator L = make_operator(cfg, cfg.operator1, h);
    scheme.op1 = L.scaled(cfg.theta);
    scheme.op2 = L.scaled(1.0 - cfg.theta);
  } else {
    scheme.op1 = make_operator(cfg, cfg.operator1, h);
    scheme.op2 = make_operator(cfg, cfg.operator2, h);
  }
  scheme.phi1 = make_nonlinearity(cfg.phi1, cfg.phi1_m, cfg.phi1_a, cfg.phi1_b);
  scheme.phi2 = make_nonlinearity(cfg.phi2, cfg.phi2_m, cfg.phi2_a, cfg.phi2_b);
  scheme.tol = cfg.tol;
  scheme.cfl = cfg.cfl_policy == "enforce"  ? CflPolicy::kEnforce
               : cfg.cfl_policy == "warn"   ? CflPolicy::kWarn
                                            : CflPolicy::kOff;
  double dt;
  if (cfg.dt_rule == "cfl") {
    const UniformGrid grid(cfg.dimension, h, cfg.box_half);
    const double M = linf_norm(initial_field(cfg, grid));
    const double bound =
        cfl_bound(scheme.phi2, scheme.op2.total_mass(), M);
    dt = std::min(0.9 * bound, h);
  } else {
    dt = resolve_rule(cfg.dt_rule, h, "dt");
  }
  const int steps = std::max(1, int(std::ceil(cfg.T / dt - 1e-9)));
  scheme.times = TimeGrid::uniform(cfg.T, steps);
  return scheme;
}

namespace {

namespace fs = std::filesystem;

std::string resolve_out_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("NLPME_OUT"); env && *env) return env;
  return cfg.out_dir;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

void write_failure(const fs::path& dir, const std::string& command,
                   const std::string& error) {
  std::ofstream out(dir / "failure.json");
  out << "{\"command\": \"" << json_escape(command) << "\", \"error\": \""
      << json_escape(error) << "\"}\n";
}

void write_mass_ledger(const fs::path& path, const Trajectory& traj,
                       const std::string& provenance) {
  std::ofstream out(path);
  out << "# " << provenance << "\n";
  out << "t,mass\n";
  out.precision(17);
  for (size_t j = 0; j < traj.mass_ledger.size(); ++j)
    out << traj.times.knots[j] << ',' << traj.mass_ledger[j] << "\n";
}

void write_snapshots(const fs::path& dir, const Trajectory& traj, int every) {
  if (every <= 0) return;
  for (size_t j = 0; j < traj.fields.size(); j += every) {
    char name[32];
    std::snprintf(name, sizeof(name), "snapshot_%05zu.txt", j);
    write_snapshot_file((dir / name).string(), traj.fields[j],
                        traj.times.knots[j]);
  }
}

double predicted_lte_order(const RunConfig& cfg) {
  // from the truncation-order formulas of each rule at the configured r(h)
  const double gamma = cfg.r_rule == "sqrt_h"  ? 0.5
                       : cfg.r_rule == "h"     ? 1.0
                                               : 1.0;
  const double a = cfg.alpha;
  if (cfg.operator1 == "midpoint") return std::min((2.0 - a) * gamma, 1.0);
  if (cfg.operator1 == "fractional_laplacian") return 2.0;
  if (cfg.operator1 == "vanishing_viscosity")
    return std::min(2.0 * gamma, 2.0);
  // the viscosity correction cancels the leading small-ball truncation term,
  // leaving O(r^{4-alpha}) from the second-moment matching plus the
  // O(h^2 r^{-alpha}) interpolation error of the far part
  if (cfg.operator1 == "vv_midpoint")
    return std::min((4.0 - a) * gamma, 2.0 - a * gamma);
  if (cfg.operator1 == "multilinear") return 2.0 - a * gamma;
  return 0.0;
}

int run_command(const RunConfig& cfg, const fs::path& dir,
                const std::string& provenance) {
  const SchemeConfig scheme = build_scheme(cfg, cfg.h);
  const UniformGrid grid(cfg.dimension, cfg.h, cfg.box_half);
  const Trajectory traj = run(scheme, initial_field(cfg, grid));
  write_mass_ledger(dir / "mass_ledger.csv", traj, provenance);
  write_snapshots(dir, traj, cfg.snapshot_every);
  return 0;
}

int lte_command(const RunConfig& cfg, const fs::path& dir,
                const std::string& provenance) {
  const LevyMeasureSpec spec = measure_of(cfg);
  if (spec.dim != 1)
    throw std::runtime_error("lte: studies are 1D");
  std::vector<std::pair<double, double>> schedule;
  double h = cfg.h;
  for (int k = 0; k < cfg.levels; ++k) {
    schedule.emplace_back(h, resolve_r(cfg.r_rule, h));
    h *= 0.5;
  }
  const SpaceFn psi = [](const Coord& x) { return std::exp(-x[0] * x[0]); };
  const LteReport report = lte_study(
      cfg.operator1,
      [&](double hh, double rr) {
        RunConfig local = cfg;
        local.r_rule = "const:" + std::to_string(rr);
        return make_operator(local, cfg.operator1, hh);
      },
      spec, psi, schedule, predicted_lte_order(cfg));
  std::ofstream out(dir / "lte.csv");
  write_lte_csv(out, {report}, provenance);
  return 0;
}

int converge_command(const RunConfig& cfg, const fs::path& dir,
                     const std::string& provenance) {
  std::vector<double> hs;
  double h = cfg.h;
  for (int k = 0; k < std::max(2, std::min(cfg.levels, 6)); ++k) {
    hs.push_back(h);
    h *= 0.5;
  }
  const ConvergenceReport report = self_convergence_study(
      [&](double hh) {
        const UniformGrid grid(cfg.dimension, hh, cfg.box_half);
        return run(build_scheme(cfg, hh), initial_field(cfg, grid));
      },
      hs, 0.5 * cfg.box_half);
  std::ofstream out(dir / "convergence.csv");
  write_convergence_csv(out, report, provenance);
  return 0;
}

int properties_command(const RunConfig& cfg, const fs::path& dir,
                       const std::string& provenance) {
  const SchemeConfig scheme = build_scheme(cfg, cfg.h);
  const UniformGrid grid(cfg.dimension, cfg.h, cfg.box_half);
  std::mt19937_64 rng(cfg.seed);
  std::vector<PairedData> pairs;
  for (int k = 0; k < 20; ++k) {
    PairedData pair;
    pair.u0 = random_compact_field(grid, rng, 1.0, 0.5 * cfg.box_half);
    Field bump = random_compact_field(grid, rng, 0.5, 0.5 * cfg.box_half);
    pair.v0 = pair.u0;
    for (size_t i = 0; i < bump.values.size(); ++i)
      pair.v0.values[i] += std::abs(bump.values[i]);
    pairs.push_back(std::move(pair));
  }
  const PropertyReport report = property_suite(scheme, pairs);
  std::ofstream out(dir / "properties.csv");
  write_property_csv(out, report, provenance);
  if (!report.all_pass()) {
    write_failure(dir, "properties", "property violations above tolerance");
    return 1;
  }
  return 0;
}

int stefan_command(const RunConfig& cfg, const fs::path& dir,
                   const std::string& provenance) {
  const double dt = resolve_rule(cfg.dt_rule, cfg.h, "dt");
  const Trajectory traj =
      stefan_experiment(cfg.alpha, cfg.h, dt, cfg.T, cfg.box_half);
  write_mass_ledger(dir / "mass_ledger.csv", traj, provenance);
  write_snapshots(dir, traj, cfg.snapshot_every);
  double sup = 0.0;
  for (const Field& U : traj.fields) sup = std::max(sup, linf_norm(U));
  double drift = 0.0;
  for (double m : traj.mass_ledger)
    drift = std::max(drift, std::abs(m - traj.mass_ledger.front()));
  std::ofstream out(dir / "stefan_summary.csv");
  out << "# " << provenance << "\n";
  out << "quantity,value\n";
  out.precision(17);
  out << "sup_linf," << sup << "\n";
  out << "initial_linf," << linf_norm(traj.fields.front()) << "\n";
  out << "mass_drift_rel,"
      << drift / std::abs(traj.mass_ledger.front()) << "\n";
  return 0;
}

int heat_command(const RunConfig& cfg, const fs::path& dir,
                 const std::string& provenance) {
  std::vector<double> hs;
  double h = cfg.h;
  for (int k = 0; k < std::max(2, std::min(cfg.levels, 6)); ++k) {
    hs.push_back(h);
    h *= 0.5;
  }
  const double exponent = cfg.dt_rule == "h2" ? 2.0 : 1.0;
  const ConvergenceReport report =
      heat_kernel_check(hs, exponent, cfg.T, cfg.box_half);
  std::ofstream out(dir / "heat.csv");
  write_convergence_csv(out, report, provenance);
  return 0;
}

}  // namespace

int execute(const RunConfig& cfg) {
  const fs::path dir = resolve_out_dir(cfg);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << dir << "\n";
    return 2;
  }
  const std::string provenance = "config=" + config_hash(cfg.config_text) +
                                 " version=0.1.0 seed=" +
                                 std::to_string(cfg.seed);
  try {
    if (cfg.command == "run") return run_command(cfg, dir, provenance);
    if (cfg.command == "lte") return lte_command(cfg, dir, provenance);
    if (cfg.command == "converge")
      return converge_command(cfg, dir, provenance);
    if (cfg.command == "properties")
      return properties_command(cfg, dir, provenance);
    if (cfg.command == "stefan") return stefan_command(cfg, dir, provenance);
    if (cfg.command == "heat") return heat_command(cfg, dir, provenance);
    std::cerr << "error: unknown command '" << cfg.command << "'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_failure(dir, cfg.command, e.what());
    return 1;
  }
}

}  // namespace nlpme
