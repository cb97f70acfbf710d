// One line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <moyal/moyal.hpp>

#include "oracles.hpp"

using namespace moyal;

namespace {

const PhaseGrid kGrid(2, 8.0, 128);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
  void below(const std::string& what, double v, double tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g < %.0e", what.c_str(), v, tol);
    require(v < tol, buf);
  }
  void within(const std::string& what, double v, double lo, double hi) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3f in [%.2f, %.2f]", what.c_str(), v, lo, hi);
    require(v >= lo && v <= hi, buf);
  }
};

json gauss(double s, std::vector<double> c, std::vector<double> amp = {1.0, 0.0}) {
  return {{"type", "gaussian"}, {"s", s}, {"center", c}, {"amplitude", amp}};
}

json base_config(const std::string& experiment, double theta0, json symbols) {
  return {{"experiment", experiment},
          {"theta", {{"d", 2}, {"theta0", theta0}}},
          {"grid", {{"L", 8.0}, {"N", 128}}},
          {"symbols", symbols},
          {"output", "acceptance-" + experiment}};
}

Report run(const json& j) { return run_experiment(parse_config(j)); }

// copies the named checks of a report into the outcome
void take(Outcome& o, const Report& r, const std::function<bool(const std::string&)>& select) {
  int n = 0;
  for (auto& c : r.checks) {
    if (!select(c.name)) continue;
    ++n;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %.3g", c.name.c_str(), c.value);
    o.require(c.passed, buf);
  }
  if (n == 0) o.require(false, "no matching checks in " + r.experiment);
}

bool starts(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

double rel(const GridSymbol& a, const GridSymbol& ref) { return sup_diff(a, ref) / ref.sup(); }

// ---------------------------------------------------------------------------

Outcome commutator() {
  Outcome o;
  const Polynomial x1 = Polynomial::coordinate(2, 0), x2 = Polynomial::coordinate(2, 1);
  const Gaussian w = Gaussian::isotropic(2, 0.4);
  for (double th0 : {0.5, 1.0, 2.0}) {
    const ThetaMatrix t = make_theta(2, th0);
    const Polynomial c = std::get<Polynomial>(moyal_commutator(x1, x2, t, ProductMode::series));
    o.require(c.terms().size() == 1 && c.coeff({0, 0}) == cplx(0.0, th0),
              "series [x1,x2] == i*" + std::to_string(th0).substr(0, 3));
    // integral mode: [x1, x2] acting on a window
    const GridSymbol a = star_integral(x1, Symbol(star_integral(x2, w, t, kGrid)), t, kGrid);
    const GridSymbol b = star_integral(x2, Symbol(star_integral(x1, w, t, kGrid)), t, kGrid);
    GridSymbol ref = sample(w, kGrid);
    ref *= cplx(0.0, th0);
    o.below("integral theta0=" + std::to_string(th0).substr(0, 3), sup_diff(a - b, ref), 1e-6);
  }
  return o;
}

Outcome tracial() {
  Outcome o;
  const json syms = {gauss(0.6, {1.0, 0.0}), gauss(1.1, {0.0, -0.5}, {0.5, 0.5}), gauss(0.8, {-0.4, 0.7})};
  const Report r = run(base_config("trace", 1.0, syms));
  take(o, r, [](const std::string& n) { return starts(n, "trace"); });
  o.require(r.checks.size() == 6, "6 pairs");
  return o;
}

Outcome representations() {
  Outcome o;
  // double-quadrature oracle at N = 32
  const PhaseGrid g32(2, 8.0, 32);
  const ThetaMatrix t = make_theta(2, 1.0);
  const GridSymbol v = star_integral(Gaussian::isotropic(2, 0.5, {0.5, -0.3}),
                                     Gaussian::isotropic(2, 0.7, {-0.4, 0.6}), t, g32);
  const auto q = oracle::star_double_quadrature(oracle::Gauss::isotropic(2, 0.5, {0.5, -0.3}),
                                                oracle::Gauss::isotropic(2, 0.7, {-0.4, 0.6}), t.entries(), 8.0, 32,
                                                0.25, 6.0);
  double e = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) e = std::max(e, std::abs(q[i] - v.values[i]));
  o.below("integral vs double quadrature", e, 1e-5);

  // truncated series against the integral for a small-type pair
  const ThetaMatrix ts = make_theta(2, 0.2);
  const Gaussian f = Gaussian::isotropic(2, 0.5, {0.5, -0.3});
  const Gaussian g = Gaussian::isotropic(2, 0.5, {-0.4, 0.6});
  const int top = kGrid.N / 4;
  const EntireCoeffResult ec = entire_coeff_check(series_kernel_coefficients(ts, top));
  const GrowthFit gf = derivative_growth_fit(f, top, kGrid), gg = derivative_growth_fit(g, top, kGrid);
  const int M = truncation_order(std::max(gf.B, gg.B), ec.b_fit, ec.C_fit * gf.C * gg.C, 1e-8);
  const GridSymbol ser = std::get<GridSymbol>(star_series(f, g, ts, M, kGrid).value);
  o.below("series(M=" + std::to_string(M) + ") vs integral", rel(ser, star_integral(f, g, ts, kGrid)), 1e-6);
  return o;
}

Outcome fourier_bridge() {
  Outcome o;
  const json syms = {gauss(0.7, {0.4, -0.2}), gauss(1.3, {-0.1, 0.5})};
  const Report r = run(base_config("bridge", 1.0, syms));
  take(o, r, [](const std::string& n) { return starts(n, "fourier bridge") || n == "zero theta convolution"; });
  return o;
}

Outcome symplectic_bridge() {
  Outcome o;
  const json syms = {gauss(0.7, {0.4, -0.2}), gauss(1.3, {-0.1, 0.5}), gauss(0.9, {0.3, 0.3}),
                     gauss(0.6, {-0.5, 0.1})};
  for (double th0 : {1.0, 2.0}) {
    const Report r = run(base_config("bridge", th0, syms));
    take(o, r, [](const std::string& n) { return starts(n, "bridge left") || starts(n, "symplectic inversion"); });
  }
  return o;
}

Outcome semiclassical() {
  Outcome o;
  const Gaussian f = Gaussian::isotropic(2, 0.5, {0.5, -0.3});
  const Gaussian g = Gaussian::isotropic(2, 0.7, {-0.4, 0.6});
  std::vector<double> eps{0.1, 0.05, 0.025}, dev;
  for (double e : eps) {
    const ThetaMatrix t = make_theta(2, e);
    const GridSymbol first = std::get<GridSymbol>(star_series(f, g, t, 1, kGrid).value);
    dev.push_back(sup_diff(star_integral(f, g, t, kGrid), first));
  }
  o.within("slope", oracle::loglog_slope(eps, dev), 1.8, 2.2);
  return o;
}

Outcome approx_identity() {
  Outcome o;
  json j = base_config("approx-id", 1.0,
                       {gauss(0.7, {0.3, -0.2}),
                        {{"type", "gaussian"}, {"M", {{1.0, 0.0}, {0.0, 1.0}}}, {"b", {1.0, 0.5}}, {"c", 0.0}}});
  j["parameters"] = {{"nus", {4, 8, 16, 32}}, {"side", "left"}};
  const Report r = run(j);
  take(o, r, [](const std::string& n) { return starts(n, "omega") || n == "rate slope"; });
  return o;
}

Outcome weighted_derivative() {
  Outcome o;
  // a Gaussian family plus one grid symbol that is not Gaussian
  std::vector<Symbol> real_family{Gaussian::isotropic(2, 1.0), Gaussian::isotropic(2, 0.5, {0.7, -0.4}),
                                  Gaussian::isotropic(2, 2.0, {-0.3, 0.2})};
  CMat M(2, 2);
  M << cplx(0.8, 0.5), 0.2, 0.2, cplx(1.2, -0.3);
  CVec b(2);
  b << cplx(0.3, 1.0), cplx(-0.2, 0.4);
  const Symbol chirp = Gaussian(M, b, 0.0);
  GridSymbol mixed(kGrid);
  for_each_node(kGrid, [&](const std::vector<double>& x, std::size_t i) {
    mixed.values[i] = std::exp(-x[0] * x[0] - 0.5 * x[1] * x[1]) * cplx(1.0 + x[0] * x[1], x[0]);
  });
  std::vector<Symbol> family = real_family;
  family.push_back(chirp);
  family.push_back(Symbol(mixed));

  int total = 0, held = 0, total_real = 0, held_real = 0;
  for (const Symbol& f : family)
    for (auto& e : lemma_A1_sweep(f, 4, kGrid)) {
      ++total;
      held += e.result.holds;
    }
  for (const Symbol& f : real_family)
    for (auto& e : lemma_A1_sweep(f, 4, kGrid, 1.0)) {
      ++total_real;
      held_real += e.result.holds;
    }
  o.require(held == total, std::to_string(held) + "/" + std::to_string(total) + " with sqrt2");
  o.require(held_real == total_real,
            std::to_string(held_real) + "/" + std::to_string(total_real) + " real without sqrt2");
  return o;
}

Outcome fourier_bound() {
  Outcome o;
  const json syms = {gauss(0.5, {0.0, 0.0}), gauss(1.0, {0.0, 0.0}), gauss(2.0, {0.0, 0.0})};
  const Report r = run(base_config("fourier-bound", 1.0, syms));
  take(o, r, [](const std::string& n) { return n == "ratio finite" || n == "max ratio refinement change"; });
  return o;
}

Outcome series_tail() {
  Outcome o;
  json j = base_config("series-tail", 0.2, {gauss(0.5, {0.5, -0.3}), gauss(0.5, {-0.4, 0.6})});
  j["parameters"] = {{"max_order", 32}, {"tols", {1e-4, 1e-6, 1e-8, 1e-10}}};
  const Report r = run(j);
  take(o, r, [](const std::string& n) { return n == "term ratio bound" || starts(n, "tail bound"); });
  return o;
}

Outcome associativity() {
  Outcome o;
  const json syms = {gauss(0.6, {0.5, 0.0}), gauss(0.8, {0.0, 0.5}), gauss(1.0, {-0.5, -0.2})};
  const Report r = run(base_config("associativity", 1.0, syms));
  take(o, r, [](const std::string&) { return true; });
  return o;
}

Outcome duality_paths() {
  Outcome o;
  const ThetaMatrix t = make_theta(2, 1.0);
  Polynomial p(2);
  p.add_term({0, 0}, 1.0);
  p.add_term({1, 0}, cplx(0.5, 0.2));
  p.add_term({0, 2}, -0.3);
  const Functional v = Functional::poly_gaussian(p, Gaussian::isotropic(2, 0.8, {0.2, -0.1}));
  const Gaussian f = Gaussian::isotropic(2, 0.9, {-0.3, 0.2});
  const DualityPaths paths = left_product_paths(v, f, t, kGrid);
  o.below("fourier vs regular", rel(paths.fourier_path, paths.regular), 1e-7);
  o.below("bridge vs regular", rel(paths.bridge_path, paths.regular), 1e-7);
  o.below("fourier vs bridge", rel(paths.fourier_path, paths.bridge_path), 1e-7);
  // the pairing <v, f * g> against each grid route paired with the probe
  const Gaussian g = Gaussian::isotropic(2, 1.1, {0.2, 0.2});
  const cplx ref = star_functional(v, f, t, Side::left, g, kGrid);
  const GridSymbol gs = sample(g, kGrid);
  double worst = 0.0;
  for (const GridSymbol* s : {&paths.regular, &paths.fourier_path, &paths.bridge_path})
    worst = std::max(worst, std::abs(pointwise(*s, gs).integral() - ref) / std::abs(ref));
  o.below("pairing vs grid routes", worst, 1e-7);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"commutator exactness", commutator},
      {"tracial property", tracial},
      {"representation equivalence", representations},
      {"fourier bridge", fourier_bridge},
      {"symplectic bridge", symplectic_bridge},
      {"semiclassical slope", semiclassical},
      {"approximate identity rate", approx_identity},
      {"weighted derivative inequality", weighted_derivative},
      {"fourier bound surrogate", fourier_bound},
      {"series tail", series_tail},
      {"associativity and identities", associativity},
      {"duality consistency", duality_paths},
  };
  int failed = 0, i = 0;
  for (auto& [name, fn] : criteria) {
    ++i;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d  %-30s (%.1fs)  %s\n", o.pass ? "PASS" : "FAIL", i, name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
