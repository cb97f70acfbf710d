#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "moyal/bridge.hpp"
#include "moyal/duality.hpp"
#include "moyal/gsanalysis.hpp"
#include "moyal/serialization.hpp"
#include "moyal/starproduct.hpp"

namespace moyal {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"star-compare", "trace",         "associativity", "bridge",
                                              "approx-id",    "norms",         "fourier-bound", "series-tail"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  ThetaMatrix theta;
  PhaseGrid grid;
  std::vector<Symbol> symbols;
  std::map<std::string, double> tolerances;
  std::string output;
  json parameters = json::object();

  double tolerance(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }
};

/// Command-line overrides applied after parsing.
struct ConfigOverrides {
  std::optional<int> grid_N;
  std::optional<double> grid_L;
  std::optional<double> theta0;
};

namespace detail {

inline const json& require_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j[key];
}

inline PhaseGrid grid_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object {L, N}");
  if (!j.contains("L") || !j["L"].is_number()) throw ConfigError(where + ".L: missing number");
  if (!j.contains("N") || !j["N"].is_number_integer()) throw ConfigError(where + ".N: missing integer");
  const int d = j.value("d", -1);
  return PhaseGrid(d, j["L"].get<double>(), j["N"].get<int>());
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig cfg;

  const json& exp = detail::require_field(j, "experiment");
  if (!exp.is_string()) throw ConfigError("experiment: expected a string");
  cfg.experiment = exp.get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
    std::string list;
    for (auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("experiment: unknown value '" + cfg.experiment + "' (expected one of " + list + ")");
  }

  cfg.theta = theta_from_json(detail::require_field(j, "theta"), "theta");
  const int d = cfg.theta.d();

  const json& g = detail::require_field(j, "grid");
  try {
    json gj = g;
    if (gj.is_object()) gj["d"] = d;
    cfg.grid = detail::grid_from_json(gj, "grid");
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  const json& syms = detail::require_field(j, "symbols");
  if (!syms.is_array()) throw ConfigError("symbols: expected an array");
  if (syms.empty()) throw ConfigError("symbols: empty list");
  for (std::size_t i = 0; i < syms.size(); ++i) {
    const std::string where = "symbols[" + std::to_string(i) + "]";
    json sj = syms[i];
    if (sj.is_object() && !sj.contains("d") && sj.value("type", "") == "gaussian") sj["d"] = d;
    Symbol s = symbol_from_json(sj, where);
    if (dimension(s) != d) throw ConfigError(where + ": dimension differs from theta");
    cfg.symbols.push_back(std::move(s));
  }

  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("tolerances: expected an object");
    for (auto& [key, val] : j["tolerances"].items()) {
      if (!val.is_number() || !(val.get<double>() > 0.0))
        throw ConfigError("tolerances." + key + ": must be a positive number");
      cfg.tolerances[key] = val.get<double>();
    }
  }

  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output: expected a path prefix string");
    cfg.output = j["output"].get<std::string>();
  } else {
    cfg.output = cfg.experiment;
  }
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw ConfigError("parameters: expected an object");
    cfg.parameters = j["parameters"];
  }
  return cfg;
}

/// Reads a config file; parse errors carry the line and column.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& o) {
  try {
    if (o.grid_N || o.grid_L) cfg.grid = PhaseGrid(cfg.grid.d, o.grid_L.value_or(cfg.grid.L), o.grid_N.value_or(cfg.grid.N));
    if (o.theta0) cfg.theta = make_theta(cfg.theta.d(), *o.theta0);
  } catch (const ConstructionError& e) {
    throw UsageError(std::string("override: ") + e.what());
  }
}

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  json tolerance;
  std::string note;
};

struct Report {
  std::string experiment;
  std::vector<Check> checks;
  json fields = json::object();
  std::vector<std::string> plot_header;
  std::vector<std::vector<double>> plot_rows;
  std::vector<std::string> warnings;

  bool passed() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  /// Pass when value <= tol.
  void below(const std::string& name, double value, double tol) {
    checks.push_back({name, std::isfinite(value) && value <= tol, value, tol, {}});
  }
  void within(const std::string& name, double value, double lo, double hi) {
    checks.push_back({name, std::isfinite(value) && value >= lo && value <= hi, value, json::array({lo, hi}), {}});
  }
  void fail(const std::string& name, const std::string& why) {
    checks.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), nullptr, why});
  }
  void warn(const Diagnostics& d) {
    for (auto& n : d.notes)
      if (std::find(warnings.begin(), warnings.end(), n) == warnings.end()) warnings.push_back(n);
  }

  json to_json() const {
    json cs = json::array();
    for (auto& c : checks) {
      json cj = {{"name", c.name}, {"passed", c.passed}, {"tolerance", c.tolerance}};
      cj["value"] = std::isfinite(c.value) ? json(c.value) : json(nullptr);
      if (!c.note.empty()) cj["note"] = c.note;
      cs.push_back(cj);
    }
    return {{"schema", 1},  {"experiment", experiment}, {"passed", passed()},
            {"checks", cs}, {"fields", fields},         {"warnings", warnings}};
  }

  std::string plot_csv() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < plot_header.size(); ++i) os << (i ? "," : "") << plot_header[i];
    os << "\n";
    for (auto& row : plot_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }
};

/// Writes {prefix}.report.json and {prefix}.plot.csv.
inline void write_report(const Report& r, const std::string& prefix) {
  const std::filesystem::path base(prefix);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  std::ofstream(prefix + ".report.json") << r.to_json().dump(2) << "\n";
  std::ofstream(prefix + ".plot.csv") << r.plot_csv();
}

namespace detail {

/// Runs body; library errors become a failed check named `name`.
inline void guarded(Report& r, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const ConfigError&) {
    throw;
  } catch (const MoyalError& e) {
    r.fail(name, e.what());
  }
}

inline double rel_sup(const GridSymbol& a, const GridSymbol& ref) {
  const double s = ref.sup();
  return s > 0.0 ? sup_diff(a, ref) / s : sup_diff(a, ref);
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  return sxy / sxx;
}

inline std::vector<double> param_list(const json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  return vector_from_json(p[key], std::string("parameters.") + key);
}

inline double param(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw ConfigError(std::string("parameters.") + key + ": expected a number");
  return p[key].get<double>();
}

inline std::string param_str(const json& p, const char* key, std::string fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_string()) throw ConfigError(std::string("parameters.") + key + ": expected a string");
  return p[key].get<std::string>();
}

inline Side param_side(const json& p) {
  const std::string s = param_str(p, "side", "right");
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw ConfigError("parameters.side: expected 'left' or 'right'");
}

inline const Gaussian& need_gaussian(const Symbol& s, const std::string& where) {
  auto* g = std::get_if<Gaussian>(&s);
  if (!g) throw ConfigError(where + ": this experiment needs a Gaussian symbol");
  return *g;
}

inline void need_symbols(const ExperimentConfig& c, std::size_t n) {
  if (c.symbols.size() < n)
    throw ConfigError("symbols: " + c.experiment + " needs at least " + std::to_string(n) + " symbols");
}

/// int f g dx, in closed form for two Gaussians.
inline cplx product_integral(const Symbol& f, const Symbol& g, const PhaseGrid& grid) {
  auto* a = std::get_if<Gaussian>(&f);
  auto* b = std::get_if<Gaussian>(&g);
  if (a && b) return (*a * *b).integral();
  return pointwise(sample(f, grid), sample(g, grid)).integral();
}

inline std::string pair_name(std::size_t i, std::size_t j) { return std::to_string(i) + "," + std::to_string(j); }

inline ThetaMatrix scaled_theta(const ThetaMatrix& t, double eps) { return make_theta(Eigen::MatrixXd(t.entries() * eps)); }

// ---------------------------------------------------------------------------

inline void run_trace(const ExperimentConfig& c, Report& r) {
  const double tol = c.tolerance("rel_err", 1e-8);
  double worst = 0.0;
  json per = json::array();
  for (std::size_t i = 0; i < c.symbols.size(); ++i)
    for (std::size_t j = i; j < c.symbols.size(); ++j) {
      const std::string name = "trace " + pair_name(i, j);
      guarded(r, name, [&] {
        const GridSymbol fg = star_integral(c.symbols[i], c.symbols[j], c.theta, c.grid);
        r.warn(fg.diag);
        const cplx ref = product_integral(c.symbols[i], c.symbols[j], c.grid);
        const double e = std::abs(fg.integral() - ref) / std::abs(ref);
        worst = std::max(worst, e);
        per.push_back({{"pair", {i, j}}, {"rel_err", e}});
        r.below(name, e, tol);
        r.plot_rows.push_back({double(i), double(j), e});
      });
    }
  r.fields["rel_err"] = worst;
  r.fields["pairs"] = per;
  r.plot_header = {"i", "j", "rel_err"};
}

inline void run_star_compare(const ExperimentConfig& c, Report& r) {
  need_symbols(c, 2);
  const Symbol& f = c.symbols[0];
  const Symbol& g = c.symbols[1];
  const json& p = c.parameters;

  GridSymbol ref;
  guarded(r, "star_integral", [&] {
    ref = star_integral(f, g, c.theta, c.grid);
    r.warn(ref.diag);
  });
  if (ref.size() == 0) return;

  const int order = static_cast<int>(param(p, "series_order", std::min(16, c.grid.N / 4)));
  guarded(r, "series vs integral", [&] {
    const SeriesResult s = star_series(f, g, c.theta, order, c.grid);
    const GridSymbol v = std::holds_alternative<GridSymbol>(s.value) ? std::get<GridSymbol>(s.value)
                                                                     : sample(s.value, c.grid);
    const double e = rel_sup(v, ref);
    r.fields["series_rel_err"] = e;
    r.fields["series_order"] = order;
    r.below("series vs integral", e, c.tolerance("series", 1e-6));
  });

  if (c.theta.invertible() && std::holds_alternative<Gaussian>(g)) {
    guarded(r, "bridge vs integral", [&] {
      const GridSymbol b = star_via_twisted(Operand(f), g, c.theta, Side::left, c.grid);
      const double e = rel_sup(b, ref);
      r.fields["bridge_rel_err"] = e;
      r.below("bridge vs integral", e, c.tolerance("bridge", 1e-7));
    });
  }

  // theta -> 0: the remainder after the first-order term should fall as eps^2
  const std::vector<double> eps = param_list(p, "epsilons", {0.1, 0.05, 0.025});
  std::vector<double> dev;
  guarded(r, "semiclassical slope", [&] {
    for (double e : eps) {
      const ThetaMatrix t = scaled_theta(c.theta, e);
      const GridSymbol full = star_integral(f, g, t, c.grid);
      const SeriesResult s1 = star_series(f, g, t, 1, c.grid);
      const GridSymbol first = std::holds_alternative<GridSymbol>(s1.value) ? std::get<GridSymbol>(s1.value)
                                                                            : sample(s1.value, c.grid);
      dev.push_back(sup_diff(full, first));
      r.plot_rows.push_back({e, dev.back()});
    }
    const double slope = loglog_slope(eps, dev);
    r.fields["semiclassical_slope"] = slope;
    r.fields["semiclassical_deviation"] = dev;
    const double w = c.tolerance("slope", 0.2);
    r.within("semiclassical slope", slope, 2.0 - w, 2.0 + w);
  });
  r.plot_header = {"epsilon", "deviation"};
}

inline void run_associativity(const ExperimentConfig& c, Report& r) {
  need_symbols(c, 3);
  const std::size_t n = c.symbols.size();
  const double tol = c.tolerance("associativity", 1e-6);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol& f = c.symbols[i];
    const Symbol& g = c.symbols[(i + 1) % n];
    const Symbol& h = c.symbols[(i + 2) % n];
    const std::string name = "associativity " + std::to_string(i);
    guarded(r, name, [&] {
      const GridSymbol fg_h = star_integral(Symbol(star_integral(f, g, c.theta, c.grid)), h, c.theta, c.grid);
      const GridSymbol f_gh = star_integral(f, Symbol(star_integral(g, h, c.theta, c.grid)), c.theta, c.grid);
      r.warn(fg_h.diag);
      const double e = rel_sup(fg_h, f_gh);
      worst = std::max(worst, e);
      r.below(name, e, tol);
      r.plot_rows.push_back({double(i), e});
    });
  }
  r.fields["associativity_rel_err"] = worst;

  const double id_tol = c.tolerance("identity", 1e-8);
  const int d = c.grid.d;
  guarded(r, "one is the identity", [&] {
    const Symbol& f = c.symbols[0];
    const GridSymbol out = star_via_twisted(Operand(Functional::one(d)), f, c.theta, Side::left, c.grid);
    const double e = rel_sup(out, sample(f, c.grid));
    r.fields["one_star_rel_err"] = e;
    r.below("one is the identity", e, id_tol);
  });
  guarded(r, "delta is the twisted identity", [&] {
    const Symbol& g = c.symbols[0];
    const GridSymbol out =
        twisted_conv_functional(Functional::delta(std::vector<double>(d, 0.0)), g, c.theta, Side::left, c.grid);
    const double e = rel_sup(out, sample(g, c.grid));
    r.fields["delta_twisted_rel_err"] = e;
    r.below("delta is the twisted identity", e, id_tol);
  });
  r.plot_header = {"triple", "rel_err"};
}

inline void run_bridge(const ExperimentConfig& c, Report& r) {
  need_symbols(c, 2);
  const std::size_t n = c.symbols.size();
  const int d = c.grid.d;
  const double tol = c.tolerance("bridge", 1e-7);
  double worst = 0.0, worst37 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const Symbol& u = c.symbols[i];
    const Symbol& g = c.symbols[j];
    const std::string tag = pair_name(i, j);
    guarded(r, "bridge left " + tag, [&] {
      const GridSymbol ref = star_integral(u, g, c.theta, c.grid);
      r.warn(ref.diag);
      const double e = rel_sup(star_via_twisted(Operand(u), g, c.theta, Side::left, c.grid), ref);
      worst = std::max(worst, e);
      r.below("bridge left " + tag, e, tol);
      r.plot_rows.push_back({double(i), double(j), e});
    });
    guarded(r, "bridge right " + tag, [&] {
      const GridSymbol ref = star_integral(g, u, c.theta, c.grid);
      const double e = rel_sup(star_via_twisted(Operand(u), g, c.theta, Side::right, c.grid), ref);
      worst = std::max(worst, e);
      r.below("bridge right " + tag, e, tol);
    });
    // transform of f * g against (2 pi)^{-d} f^ *^ g^
    guarded(r, "fourier bridge " + tag, [&] {
      const PhaseGrid dual = c.grid.dual();
      const GridSymbol lhs = fourier(star_integral(u, g, c.theta, c.grid), true);
      GridSymbol rhs = twisted_convolution(fourier(u, true), fourier(g, true), c.theta, dual);
      rhs *= std::pow(2.0 * std::numbers::pi, -d);
      const double e = rel_sup(lhs, rhs);
      worst37 = std::max(worst37, e);
      r.below("fourier bridge " + tag, e, c.tolerance("fourier_bridge", 1e-8));
    });
  }
  r.fields["bridge_rel_err"] = worst;
  r.fields["fourier_bridge_rel_err"] = worst37;

  // conjF_theta F_theta g = pi^d det(theta) g(-x)
  double worst_inv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "symplectic inversion " + std::to_string(i);
    guarded(r, name, [&] {
      const Symbol& g = c.symbols[i];
      const Symbol back = symplectic_fourier(symplectic_fourier(g, c.theta, -1), c.theta, 1);
      const GridSymbol lhs = sample(back, c.grid);
      GridSymbol rhs(c.grid);
      const double k = std::pow(std::numbers::pi, d) * c.theta.det();
      for_each_node(c.grid, [&](const std::vector<double>& x, std::size_t idx) {
        std::vector<double> mx(x);
        for (auto& v : mx) v = -v;
        rhs.values[idx] = k * evaluate(g, mx);
      });
      const double e = rel_sup(lhs, rhs);
      worst_inv = std::max(worst_inv, e);
      r.below(name, e, c.tolerance("inversion", 1e-10));
    });
  }
  r.fields["symplectic_inversion_rel_err"] = worst_inv;

  // at theta = 0 the twisted convolution is the ordinary convolution
  guarded(r, "zero theta convolution", [&] {
    const Gaussian& a = need_gaussian(c.symbols[0], "symbols[0]");
    const Gaussian& b = need_gaussian(c.symbols[1], "symbols[1]");
    const ThetaMatrix zero = make_theta(Eigen::MatrixXd(Eigen::MatrixXd::Zero(d, d)));
    const GridSymbol tw = twisted_convolution(c.symbols[0], c.symbols[1], zero, c.grid);
    const Gaussian conv = (a.fourier(true) * b.fourier(true)).fourier(false);
    const double e = rel_sup(tw, sample(Symbol(conv), c.grid));
    r.fields["zero_theta_rel_err"] = e;
    r.below("zero theta convolution", e, c.tolerance("convolution", 1e-10));
  });
  r.plot_header = {"i", "j", "left_rel_err"};
}

inline void run_approx_id(const ExperimentConfig& c, Report& r) {
  need_symbols(c, 2);
  const Symbol& f = c.symbols[0];
  const Gaussian& e = need_gaussian(c.symbols[1], "symbols[1]");
  const json& p = c.parameters;
  const Side side = param_side(p);
  const int qn = static_cast<int>(param(p, "q_points", 64));
  std::vector<double> nus = param_list(p, "nus", {4, 8, 16, 32});
  std::vector<double> errs;
  const double om_tol = c.tolerance("omega", 1e-10);
  for (double nu : nus) {
    const std::string name = "omega nu=" + std::to_string(static_cast<int>(nu));
    guarded(r, name, [&] {
      const ApproxIdentityResult a = approx_identity_error(f, e, static_cast<int>(nu), c.theta, side, c.grid, qn);
      r.warn(a.diag);
      errs.push_back(a.err);
      r.below(name, a.omega_check, om_tol);
      r.plot_rows.push_back({nu, a.err, a.omega_check});
    });
  }
  r.plot_header = {"nu", "err", "omega_check"};
  r.fields["err"] = errs;
  if (errs.size() != nus.size() || errs.size() < 2) {
    r.fail("rate slope", "not enough successful nu values");
    return;
  }
  // first nu from which the error falls monotonically
  std::size_t onset = errs.size() - 1;
  while (onset > 0 && errs[onset - 1] > errs[onset]) --onset;
  r.fields["decay_onset_nu"] = nus[onset];
  const double slope = loglog_slope(nus, errs);
  r.fields["slope"] = slope;
  r.within("rate slope", slope, param(p, "slope_min", -1.3), param(p, "slope_max", -0.8));
}

inline GSParams params_from(const json& p) {
  try {
    return GSParams(param(p, "alpha", 0.5), param(p, "beta", 0.5), param(p, "A", 1.0), param(p, "B", 1.0),
                    static_cast<int>(param(p, "weight_sign", 1)));
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("parameters: ") + e.what());
  }
}

inline void run_norms(const ExperimentConfig& c, Report& r) {
  const json& p = c.parameters;
  const GSParams gp = params_from(p);
  const int n_max = static_cast<int>(param(p, "n_max", 8));
  const PhaseGrid fine(c.grid.d, c.grid.L, 2 * c.grid.N);
  json records = json::array();
  for (std::size_t i = 0; i < c.symbols.size(); ++i) {
    const std::string tag = std::to_string(i);
    guarded(r, "norm " + tag, [&] {
      const Symbol& f = c.symbols[i];
      const NormEstimate a = gs_norm(f, gp, n_max, c.grid);
      const NormEstimate b = gs_norm(f, gp, n_max, fine);
      records.push_back(norm_to_json(a, gp));
      for (int k = 0; k <= n_max; ++k) r.plot_rows.push_back({double(i), double(k), a.per_order[k]});
      r.checks.push_back({"norm unsaturated " + tag, !a.saturated, a.value, nullptr, {}});
      r.below("norm grid stability " + tag, std::abs(a.value - b.value) / b.value, c.tolerance("stability", 1e-6));
    });
  }
  r.fields["norms"] = records;
  r.plot_header = {"symbol", "order", "per_order"};
}

inline void run_fourier_bound(const ExperimentConfig& c, Report& r) {
  const json& p = c.parameters;
  const GSParams gp = params_from(p);
  if (gp.weight_sign != 1) throw ConfigError("parameters.weight_sign: the Fourier bound uses +1");
  const int n_max = static_cast<int>(param(p, "n_max", 8));
  const double pL = param(p, "p_L", c.grid.L);
  const int d = c.grid.d;
  auto ratios_at = [&](int N, std::vector<double>& out) {
    const PhaseGrid xg(d, c.grid.L, N), pg(d, pL, N);
    for (std::size_t i = 0; i < c.symbols.size(); ++i) {
      const FourierBoundResult fb = fourier_bound_check(c.symbols[i], gp, n_max, xg, pg);
      out.push_back(fb.ratio);
      r.fields["r_used"] = fb.r_used;
    }
  };
  std::vector<double> coarse, fine;
  guarded(r, "ratio finite", [&] {
    ratios_at(c.grid.N, coarse);
    ratios_at(2 * c.grid.N, fine);
    const double m1 = *std::max_element(coarse.begin(), coarse.end());
    const double m2 = *std::max_element(fine.begin(), fine.end());
    r.fields["ratios"] = coarse;
    r.fields["ratios_refined"] = fine;
    r.fields["max_ratio"] = m1;
    r.checks.push_back({"ratio finite", std::isfinite(m1) && std::isfinite(m2), m1, nullptr, {}});
    r.below("max ratio refinement change", std::abs(m2 - m1) / m1, c.tolerance("refinement", 0.05));
    r.checks.push_back({"r above the strict bound", r.fields["r_used"].get<double>() > 2.0 * std::pow(std::numbers::e / gp.beta, gp.beta),
                        r.fields["r_used"].get<double>(), nullptr, {}});
    for (std::size_t i = 0; i < coarse.size(); ++i) r.plot_rows.push_back({double(i), coarse[i], fine[i]});
  });
  r.plot_header = {"symbol", "ratio", "ratio_refined"};
}

inline void run_series_tail(const ExperimentConfig& c, Report& r) {
  need_symbols(c, 2);
  const Symbol& f = c.symbols[0];
  const Symbol& g = c.symbols[1];
  const json& p = c.parameters;
  const int max_order = static_cast<int>(param(p, "max_order", c.grid.N / 4));
  const int from = static_cast<int>(param(p, "ratio_from", 5));
  const double floor_rel = param(p, "noise_floor", 1e-13);
  const std::vector<double> tols = param_list(p, "tols", {1e-4, 1e-6, 1e-8, 1e-10});

  // the coefficients of exp((i/2) theta s.t) carry the series
  const EntireCoeffResult ec = entire_coeff_check(series_kernel_coefficients(c.theta, max_order));
  r.fields["b_fit"] = ec.b_fit;
  r.fields["C_fit"] = ec.C_fit;
  r.checks.push_back({"coefficients entire of order two", ec.satisfies, ec.superlinear, nullptr, {}});

  guarded(r, "term ratio bound", [&] {
    const GrowthFit gf = derivative_growth_fit(f, max_order, c.grid);
    const GrowthFit gg = derivative_growth_fit(g, max_order, c.grid);
    const double B = std::max(gf.B, gg.B);
    const double q = B * std::sqrt(2.0 * ec.b_fit);
    const double C_pref = ec.C_fit * gf.C * gg.C;
    r.fields["B"] = B;
    r.fields["q"] = q;
    r.fields["C_pref"] = C_pref;

    const SeriesResult s = star_series(f, g, c.theta, max_order, c.grid);
    const double floor = floor_rel * s.term_norms[0];
    double worst = 0.0;
    for (int n = 0; n <= max_order; ++n) {
      r.plot_rows.push_back({double(n), s.term_norms[n], C_pref * std::pow(q, n)});
      if (n > from && s.term_norms[n] > floor && s.term_norms[n - 1] > floor)
        worst = std::max(worst, s.term_norms[n] / s.term_norms[n - 1]);
    }
    r.fields["term_norms"] = s.term_norms;
    r.fields["max_ratio"] = worst;
    r.below("term ratio bound", worst, q * (1.0 + c.tolerance("ratio_slack", 0.1)));

    const GridSymbol ref = star_integral(f, g, c.theta, c.grid);
    r.warn(ref.diag);
    json tails = json::array();
    for (double tol : tols) {
      std::ostringstream name;
      name << "tail bound tol=" << tol;
      guarded(r, name.str(), [&] {
        const int M = truncation_order(B, ec.b_fit, C_pref, tol);
        if (M > max_order) throw SpectralOrderError("truncation order " + std::to_string(M) + " beyond max_order");
        const SeriesResult sM = star_series(f, g, c.theta, M, c.grid);
        const double rem = sup_diff(std::get<GridSymbol>(sM.value), ref);
        const double pred = C_pref * std::pow(q, M + 1) / (1.0 - q);
        tails.push_back({{"tol", tol}, {"M", M}, {"remainder", rem}, {"predicted", pred}});
        r.below(name.str(), rem, pred);
      });
    }
    r.fields["tails"] = tails;
  });
  r.plot_header = {"order", "term_norm", "geometric_bound"};
}

}  // namespace detail

/// Runs one suite. Library errors inside a suite turn into failed checks;
/// configuration problems raise ConfigError.
inline Report run_experiment(const ExperimentConfig& c) {
  if (c.symbols.empty()) throw ConfigError("symbols: empty list");
  Report r;
  r.experiment = c.experiment;
  r.fields["grid"] = {{"d", c.grid.d}, {"L", c.grid.L}, {"N", c.grid.N}};
  r.fields["theta"] = theta_to_json(c.theta)["entries"];
  if (c.experiment == "trace") detail::run_trace(c, r);
  else if (c.experiment == "star-compare") detail::run_star_compare(c, r);
  else if (c.experiment == "associativity") detail::run_associativity(c, r);
  else if (c.experiment == "bridge") detail::run_bridge(c, r);
  else if (c.experiment == "approx-id") detail::run_approx_id(c, r);
  else if (c.experiment == "norms") detail::run_norms(c, r);
  else if (c.experiment == "fourier-bound") detail::run_fourier_bound(c, r);
  else if (c.experiment == "series-tail") detail::run_series_tail(c, r);
  else throw ConfigError("experiment: unknown value '" + c.experiment + "'");
  return r;
}

// ---------------------------------------------------------------------------
// describe

inline const std::map<std::string, std::string>& describe_topics() {
  static const std::map<std::string, std::string> topics{
      {"star-series",
       "Moyal product as a bidifferential series, Eq. (1.1):\n"
       "  (f * g)(x) = sum_n (i/2)^n / n! (d_x theta d_y)^n f(x) g(y) |_{y=x}\n"
       "Polynomials: exact, stops at min(deg f, deg g). Grids: spectral derivatives up to order N/4.\n"
       "Gaussians on a grid: exact derivatives.\n"},
      {"star-integral",
       "Moyal product as an integral, Eqs. (1.2)-(1.3), second form:\n"
       "  (f * g)(x) = (2 pi)^{-d} int f(x - theta q / 2) g^(q) e^{iqx} dq\n"
       "Trapezoid rule over the dual grid, exact shifts of f.\n"},
      {"commutator", "[f, g]_* = f * g - g * f; x^1, x^2 with theta = theta0 J give i theta0, Eq. (1.1).\n"},
      {"tracial", "Tracial property, Eq. (3.*):\n  int (f * g)(x) dx = int f(x) g(x) dx\n"},
      {"twisted-convolution",
       "Twisted convolution, Eq. (3.6):\n"
       "  (F *^_theta G)(q) = int F(p) G(q - p) e^{(i/2) q theta p} dp\n"
       "Fourier bridge, Eq. (3.7): F(f * g) = (2 pi)^{-d} f^ *^ g^.\n"},
      {"symplectic-fourier",
       "Symplectic transforms (proof of Theorem 7):\n"
       "  (F_theta g)(xi) = int g(x) e^{-2i x theta^{-1} xi} dx,  conjF_theta with e^{+2i x theta^{-1} xi}\n"
       "  conjF_theta F_theta g = pi^d det(theta) g(-.)\n"},
      {"bridge",
       "Theorem 7 bridge, Eq. (6.6):\n"
       "  u * g = (pi^d det theta)^{-1} u *^_{-4 theta^{-1}} F_theta g\n"
       "  g * u = (pi^d det theta)^{-1} conjF_theta g *^_{-4 theta^{-1}} u\n"},
      {"functionals",
       "Duality extension, Eq. (3.1): <u * f, g> = <u, f * g>, <f * u, g> = <u, g * f>.\n"
       "Functional twisted convolution, Eq. (5.2): (v *^ g)(q) = <v, g(q - .) e^{(i/2) q theta .}>.\n"
       "Involution, Eq. (3.5): <u*, f> = conj <u, f*>.\n"
       "Variants: delta(xi), plane_wave(k) = e^{ikx}, one (f -> int f), poly_gaussian (f -> int p G f).\n"},
      {"approx-identity",
       "Approximation of the identity, Lemma 1 with Eq. (4.1):\n"
       "  e_nu(x) = e(x / nu),  omega_nu(q) = (nu / 2 pi)^d e^(nu q),  int omega_nu = e(0) = 1\n"
       "  sup |f * e_nu - f| = O(1/nu), Eqs. (4.6)-(4.7)\n"},
      {"gs-norm",
       "Gel'fand-Shilov norms, Eqs. (2.2) and (2.4):\n"
       "  ||f||_{A,B} = sup_{x,n} |d^n f(x)| e^{+-|x/A|^{1/alpha}} / (B^|n| n^{beta n})\n"
       "Decay norm, Eq. (7.5): sup (1 + |x|)^N |d^n f(x)| / (B^|n| n^{n/2}).\n"},
      {"fourier-bound",
       "Fourier bound, Eq. (5.1): ||f^||_{rB, rA} <= C ||f||_{A,B} with alpha, beta swapped,\n"
       "  r = 1.01 max{(alpha d / e)^alpha, 2 (e / beta)^beta}\n"
       "Appendix inequality (A1): int |d^k x^n| |f| <= sqrt(2) int |x^n| |d^k f|.\n"},
      {"series-tail",
       "Absolute convergence, Eqs. (7.2)-(7.4):\n"
       "  |c_n| <= C (b / n)^{n/2},  ||c_n d^n f|| <= C ||f|| (B sqrt(2b))^{|n|}\n"
       "Truncation: smallest M with C q^{M+1} / (1 - q) <= tol, q = B sqrt(2b) < 1.\n"},
  };
  return topics;
}

inline std::string describe(const std::string& topic) {
  const auto& topics = describe_topics();
  auto it = topics.find(topic);
  if (it == topics.end()) {
    std::string list;
    for (auto& [k, v] : topics) list += (list.empty() ? "" : ", ") + k;
    throw UsageError("unknown topic '" + topic + "'; topics: " + list);
  }
  return it->second +
         "\nConventions:\n"
         "  Fourier transform f^(p) = int f(x) e^{-ipx} dx, inverse (2 pi)^{-d} int f^(p) e^{ipx} dp\n"
         "  multiindex powers n^{beta n} = prod_j n_j^{beta n_j} with 0^0 = 1\n"
         "  |x| = max_j |x_j|; theta = theta0 J by default\n";
}

}  // namespace moyal
