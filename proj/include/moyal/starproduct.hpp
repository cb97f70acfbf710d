#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "moyal/errors.hpp"
#include "moyal/fft.hpp"
#include "moyal/parallel.hpp"
#include "moyal/spectral.hpp"
#include "moyal/symbol.hpp"
#include "moyal/theta.hpp"

namespace moyal {

// ---------------------------------------------------------------------------
// power series

struct SeriesResult {
  Symbol value;
  int terms_used = 0;
  std::vector<double> term_norms;  // sup norm per order (largest coefficient for polynomials)
  std::optional<double> truncation_bound;
};

namespace detail {

/// (sum_ab theta_ab X_a Y_b)^n as a polynomial in 2d variables (X, Y).
inline std::vector<Polynomial> contraction_powers(const ThetaMatrix& theta, int max_order) {
  const int d = theta.d();
  Polynomial c1(2 * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (theta(a, b) == 0.0) continue;
      Multiindex n(2 * d, 0);
      n[a] = 1;
      n[d + b] = 1;
      c1.add_term(n, theta(a, b));
    }
  std::vector<Polynomial> out{Polynomial::constant(2 * d, 1.0)};
  for (int k = 1; k <= max_order; ++k) out.push_back(out.back() * c1);
  return out;
}

inline void split_index(const Multiindex& n, int d, Multiindex& alpha, Multiindex& beta) {
  alpha.assign(n.begin(), n.begin() + d);
  beta.assign(n.begin() + d, n.end());
}

inline cplx series_prefactor(int n) {
  return std::pow(cplx(0.0, 0.5), n) / std::tgamma(n + 1.0);
}

}  // namespace detail

namespace detail {

inline SeriesResult series_on_grid(const DerivativeSource& sf, const DerivativeSource& sg, const ThetaMatrix& theta,
                                   int max_order) {
  const PhaseGrid& grid = sf.grid();
  const int d = grid.d;
  if (max_order > grid.N / 4)
    throw SpectralOrderError("series order " + std::to_string(max_order) + " exceeds N/4 = " +
                             std::to_string(grid.N / 4));
  SeriesResult res;
  Multiindex alpha, beta;
  const auto powers = contraction_powers(theta, max_order);
  DerivativeSource::Stepper stf(sf), stg(sg);
  GridSymbol total(grid);
  for (int n = 0; n <= max_order; ++n) {
    if (n > 0) {
      stf.advance();
      stg.advance();
    }
    GridSymbol term(grid);
    for (auto& [idx, c] : powers[n].terms()) {
      split_index(idx, d, alpha, beta);
      const GridSymbol& da = DerivativeSource::find(stf.stratum(), alpha);
      const GridSymbol& db = DerivativeSource::find(stg.stratum(), beta);
      const cplx w = c * series_prefactor(n);
      for (std::size_t i = 0; i < term.size(); ++i) term.values[i] += w * da.values[i] * db.values[i];
    }
    res.term_norms.push_back(term.sup());
    total += term;
  }
  total.diag.merge(sf.base().diag);
  total.diag.merge(sg.base().diag);
  res.value = std::move(total);
  res.terms_used = max_order + 1;
  return res;
}

}  // namespace detail

/// f *_theta g as sum_n (i/2)^n / n! (d_x theta d_y)^n f(x) g(y) at y = x.
///
/// Polynomials are differentiated exactly and the sum stops where it
/// terminates; grid symbols on a common grid are differentiated spectrally,
/// with max_order at most N/4.
inline SeriesResult star_series(const Symbol& f, const Symbol& g, const ThetaMatrix& theta, int max_order) {
  if (max_order < 0) throw UsageError("max_order must be nonnegative");
  const int d = theta.d();
  if (dimension(f) != d || dimension(g) != d) throw RepresentationError("symbol and theta dimensions differ");
  SeriesResult res;
  Multiindex alpha, beta;

  if (auto* pf = std::get_if<Polynomial>(&f)) {
    auto* pg = std::get_if<Polynomial>(&g);
    if (!pg) throw RepresentationError("series mode needs two polynomials or two grid symbols");
    const int stop = std::max(0, std::min(pf->degree(), pg->degree()));
    const int top = std::min(max_order, stop);
    const auto powers = detail::contraction_powers(theta, top);
    std::map<Multiindex, Polynomial> df, dg;
    Polynomial total(d);
    for (int n = 0; n <= top; ++n) {
      Polynomial term(d);
      for (auto& [idx, c] : powers[n].terms()) {
        detail::split_index(idx, d, alpha, beta);
        auto itf = df.find(alpha);
        if (itf == df.end()) itf = df.emplace(alpha, pf->derivative(alpha)).first;
        auto itg = dg.find(beta);
        if (itg == dg.end()) itg = dg.emplace(beta, pg->derivative(beta)).first;
        term += (itf->second * itg->second) * c;
      }
      term *= detail::series_prefactor(n);
      double norm = 0.0;
      for (auto& [m, c] : term.terms()) norm = std::max(norm, std::abs(c));
      res.term_norms.push_back(norm);
      total += term;
    }
    res.value = total;
    res.terms_used = top + 1;
    if (top == stop) res.truncation_bound = 0.0;
    return res;
  }

  auto* gf = std::get_if<GridSymbol>(&f);
  auto* gg = std::get_if<GridSymbol>(&g);
  if (!gf || !gg) throw RepresentationError("series mode needs two polynomials or two grid symbols");
  require_same_grid(gf->grid, gg->grid);
  return detail::series_on_grid(DerivativeSource(f, gf->grid), DerivativeSource(g, gf->grid), theta, max_order);
}

/// Series mode on a grid where Gaussian factors keep their closed form, so
/// their derivatives are exact rather than spectral.
inline SeriesResult star_series(const Symbol& f, const Symbol& g, const ThetaMatrix& theta, int max_order,
                                const PhaseGrid& grid) {
  if (std::holds_alternative<Polynomial>(f) && std::holds_alternative<Polynomial>(g))
    return star_series(f, g, theta, max_order);
  if (dimension(f) != theta.d() || dimension(g) != theta.d())
    throw RepresentationError("symbol and theta dimensions differ");
  return detail::series_on_grid(DerivativeSource(f, grid), DerivativeSource(g, grid), theta, max_order);
}

// ---------------------------------------------------------------------------
// integral form

namespace detail {

/// Adds coef * prod_a t[a][idx_a] to acc for the rows [r0, r1) of the
/// leading axis.
inline void rank_one_update(cplx* acc, const std::vector<std::vector<cplx>>& t, int d, int N, cplx coef, int r0,
                            int r1) {
  if (d == 1) {
    for (int j = r0; j < r1; ++j) acc[j] += coef * t[0][j];
    return;
  }
  std::size_t stride = 1;
  for (int a = 1; a < d; ++a) stride *= N;
  auto rec = [&](auto&& self, int axis, std::size_t offset, cplx w) -> void {
    const cplx* ta = t[axis].data();
    if (axis == d - 1) {
      cplx* out = acc + offset;
      for (int j = 0; j < N; ++j) out[j] += w * ta[j];
      return;
    }
    std::size_t sub = 1;
    for (int a = axis + 1; a < d; ++a) sub *= N;
    for (int j = 0; j < N; ++j) self(self, axis + 1, offset + j * sub, w * ta[j]);
  };
  for (int j0 = r0; j0 < r1; ++j0) rec(rec, 1, j0 * stride, coef * t[0][j0]);
}

/// out(x) = sum_q w_q f(x - theta q / 2) e^{iqx} over the nodes q of qgrid,
/// for x on xgrid. The shifted factor is evaluated exactly: in closed form
/// for Gaussians, by Taylor shift for polynomials, and by Fourier shift for
/// grid symbols.
inline GridSymbol shift_sum(const Symbol& f, const std::vector<cplx>& w, const PhaseGrid& qgrid,
                            const ThetaMatrix& theta, const PhaseGrid& xgrid) {
  const int d = xgrid.d;
  const int N = xgrid.N;
  if (qgrid.d != d || theta.d() != d) throw GridMismatchError("grid and theta dimensions differ");
  double wmax = 0.0;
  for (auto& z : w) wmax = std::max(wmax, std::abs(z));
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (wmax > 0.0 && std::abs(w[i]) > kNegligible * wmax) kept.push_back(i);

  const std::vector<double> xs = xgrid.axis();
  const std::vector<double> qs = qgrid.axis();
  const Eigen::MatrixXd& th = theta.entries();
  auto shift_of = [&](const int* kq, std::vector<double>& q, std::vector<double>& s) {
    for (int a = 0; a < d; ++a) q[a] = qs[kq[a]];
    for (int a = 0; a < d; ++a) {
      s[a] = 0.0;
      for (int b = 0; b < d; ++b) s[a] += 0.5 * th(a, b) * q[b];
    }
  };

  GridSymbol out(xgrid);

  if (auto* gauss = std::get_if<Gaussian>(&f)) {
    const CMat& M = gauss->M();
    const CVec& b = gauss->b();
    // f(x - s) = f(x) exp(x.(2Ms) - s.Ms - b.s), separable in x apart from f(x)
    std::vector<cplx> logf(xgrid.size());
    double min_re = std::numeric_limits<double>::infinity();
    for_each_node(xgrid, [&](const std::vector<double>& x, std::size_t i) {
      logf[i] = gauss->log_value(x);
      min_re = std::min(min_re, logf[i].real());
    });
    struct Term {
      cplx logc;
      CVec v;
      std::vector<double> q;
    };
    std::vector<Term> terms;
    terms.reserve(kept.size());
    double worst = -std::numeric_limits<double>::infinity();
    {
      std::vector<int> kq(d);
      std::vector<double> q(d), s(d);
      CVec sv(d);
      for (std::size_t i : kept) {
        qgrid.unravel(i, kq.data());
        shift_of(kq.data(), q, s);
        for (int a = 0; a < d; ++a) sv(a) = s[a];
        CVec v = 2.0 * (M * sv);
        cplx K = -(sv.transpose() * M * sv)(0, 0) - (b.transpose() * sv)(0, 0);
        cplx logc = K + std::log(w[i]);
        double bound = logc.real();
        for (int a = 0; a < d; ++a) bound += xgrid.L * std::abs(v(a).real());
        worst = std::max(worst, bound);
        terms.push_back({logc, std::move(v), q});
      }
    }
    const bool separable = min_re > -600.0 && worst < 600.0;
    if (separable) {
      parallel_blocks(N, [&](std::size_t r0, std::size_t r1) {
        std::vector<std::vector<cplx>> t(d, std::vector<cplx>(N));
        for (const Term& term : terms) {
          for (int a = 0; a < d; ++a) {
            const cplx rate = term.v(a) + cplx(0.0, term.q[a]);
            for (int j = 0; j < N; ++j) t[a][j] = std::exp(rate * xs[j]);
          }
          rank_one_update(out.values.data(), t, d, N, std::exp(term.logc), static_cast<int>(r0),
                          static_cast<int>(r1));
        }
      });
      for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= std::exp(logf[i]);
    } else {
      // exponents out of range for the factored form: evaluate every pair
      parallel_blocks(xgrid.size(), [&](std::size_t i0, std::size_t i1) {
        std::vector<int> kx(d);
        std::vector<double> shifted(d);
        for (std::size_t i = i0; i < i1; ++i) {
          xgrid.unravel(i, kx.data());
          cplx acc = 0.0;
          for (const Term& term : terms) {
            cplx e = term.logc + logf[i];
            for (int a = 0; a < d; ++a) e += (term.v(a) + cplx(0.0, term.q[a])) * xs[kx[a]];
            acc += std::exp(e);
          }
          out.values[i] = acc;
        }
      });
    }
    return out;
  }

  if (auto* poly = std::get_if<Polynomial>(&f)) {
    if (!(qgrid == xgrid.dual())) throw RepresentationError("polynomial shift sums need the dual grid");
    // f(x - s) = sum_m a_m(s) x^m; the q sum of each coefficient is an FFT
    std::map<Multiindex, std::vector<cplx>> coeff;
    std::vector<int> kq(d);
    std::vector<double> q(d), s(d);
    std::vector<cplx> ms(d);
    for (std::size_t i : kept) {
      qgrid.unravel(i, kq.data());
      shift_of(kq.data(), q, s);
      for (int a = 0; a < d; ++a) ms[a] = -s[a];
      const Polynomial sp = poly->shifted(ms);
      for (auto& [m, c] : sp.terms()) {
        auto it = coeff.find(m);
        if (it == coeff.end()) it = coeff.emplace(m, std::vector<cplx>(qgrid.size(), cplx(0.0))).first;
        it->second[i] = w[i] * c;
      }
    }
    const double unscale = std::pow(2.0 * std::numbers::pi / qgrid.spacing(), d);
    for (auto& [m, spec] : coeff) {
      std::vector<cplx> sum = detail::centered_transform(spec, qgrid, false);
      Polynomial mono(d);
      mono.add_term(m, 1.0);
      for_each_node(xgrid, [&](const std::vector<double>& x, std::size_t i) {
        out.values[i] += unscale * sum[i] * mono(x);
      });
    }
    return out;
  }

  const GridSymbol& gf = std::get<GridSymbol>(f);
  require_same_grid(gf.grid, xgrid);
  const SpectralField field(gf);
  // fixed chunking keeps the reduction order independent of the thread count
  constexpr std::size_t kChunks = 16;
  std::vector<std::vector<cplx>> partial(kChunks);
  parallel_chunks(kept.size(), kChunks, [&](std::size_t c, std::size_t lo, std::size_t hi) {
    std::vector<cplx>& acc = partial[c];
    acc.assign(xgrid.size(), cplx(0.0));
    std::vector<int> kq(d), kx(d);
    std::vector<double> q(d), s(d);
    std::vector<std::vector<cplx>> e(d, std::vector<cplx>(N));
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = kept[k];
      qgrid.unravel(i, kq.data());
      shift_of(kq.data(), q, s);
      const std::vector<cplx> sh = field.shifted(s);
      for (int a = 0; a < d; ++a)
        for (int j = 0; j < N; ++j) e[a][j] = std::polar(1.0, q[a] * xs[j]);
      for (std::size_t x = 0; x < acc.size(); ++x) {
        xgrid.unravel(x, kx.data());
        cplx ph = w[i];
        for (int a = 0; a < d; ++a) ph *= e[a][kx[a]];
        acc[x] += ph * sh[x];
      }
    }
  });
  for (auto& acc : partial)
    if (!acc.empty())
      for (std::size_t x = 0; x < acc.size(); ++x) out.values[x] += acc[x];
  return out;
}

inline int shift_preference(const Symbol& s) {
  if (std::holds_alternative<Polynomial>(s)) return 0;
  if (std::holds_alternative<Gaussian>(s)) return 1;
  return 2;
}

inline void check_finite(const GridSymbol& s, const char* what) {
  for (auto& z : s.values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError(std::string("NaN in ") + what);
}

/// Edge diagnostics for an integrable-class input.
inline void note_edges(const Symbol& s, const PhaseGrid& grid, Diagnostics& diag) {
  if (auto* g = std::get_if<Gaussian>(&s)) {
    const double ratio = std::exp(g->log_boundary_peak(grid.L) - g->log_peak());
    if (ratio > kGridWarnRatio) diag.flag_grid_too_small("Gaussian edge/peak ratio " + std::to_string(ratio));
  } else if (auto* gs = std::get_if<GridSymbol>(&s)) {
    diag.merge(gs->diag);
    const double ratio = gs->boundary_ratio();
    if (ratio > 1e-10) diag.flag_grid_too_small("grid symbol edge/peak ratio " + std::to_string(ratio));
  }
}

}  // namespace detail

/// f *_theta g = (2 pi)^{-d} int f(x - theta q / 2) g^(q) e^{iqx} dq by
/// quadrature over the dual grid.
///
/// The factor that is easier to shift exactly takes the role of f; when that
/// is g the identity f *_theta g = g *_{-theta} f swaps them.
inline GridSymbol star_integral(const Symbol& f, const Symbol& g, const ThetaMatrix& theta, const PhaseGrid& grid) {
  if (dimension(f) != grid.d || dimension(g) != grid.d || theta.d() != grid.d)
    throw GridMismatchError("symbol, theta and grid dimensions differ");
  if (std::holds_alternative<Polynomial>(f) && std::holds_alternative<Polynomial>(g))
    throw RepresentationError("integral mode cannot multiply two polynomials");
  if (detail::shift_preference(g) < detail::shift_preference(f)) return star_integral(g, f, theta.negated(), grid);

  const PhaseGrid dual = grid.dual();
  std::vector<cplx> w;
  if (auto* gg = std::get_if<Gaussian>(&g)) {
    w = sample(Symbol(gg->fourier(true)), dual).values;
  } else {
    const GridSymbol& gs = std::get<GridSymbol>(g);
    require_same_grid(gs.grid, grid);
    w = fourier(gs, true).values;
  }
  const double scale = std::pow(dual.spacing() / (2.0 * std::numbers::pi), grid.d);
  for (auto& z : w) z *= scale;
  GridSymbol out = detail::shift_sum(f, w, dual, theta, grid);
  detail::note_edges(f, grid, out.diag);
  detail::note_edges(g, grid, out.diag);
  detail::check_finite(out, "star_integral");
  return out;
}

enum class ProductMode { series, integral };

/// Taylor coefficients of exp((i/2) s.theta.t) in the 2d variables (s, t),
/// up to total order 2 * max_order.
inline std::map<Multiindex, cplx> series_kernel_coefficients(const ThetaMatrix& theta, int max_order) {
  std::map<Multiindex, cplx> out;
  const auto powers = detail::contraction_powers(theta, max_order);
  for (int n = 0; n <= max_order; ++n)
    for (auto& [m, v] : powers[n].terms()) out[m] = v * detail::series_prefactor(n);
  return out;
}

/// f * g - g * f in the requested representation. In series mode
/// max_order < 0 means "to termination" for polynomials and N/4 for grids.
inline Symbol moyal_commutator(const Symbol& f, const Symbol& g, const ThetaMatrix& theta, ProductMode mode,
                               const std::optional<PhaseGrid>& grid = std::nullopt, int max_order = -1) {
  if (mode == ProductMode::series) {
    auto run = [&](const Symbol& a, const Symbol& b) {
      int order = max_order;
      if (order < 0) {
        if (std::holds_alternative<Polynomial>(a)) {
          order = std::max(0, std::get<Polynomial>(a).degree());
        } else {
          const PhaseGrid& gr = grid ? *grid : std::get<GridSymbol>(a).grid;
          order = gr.N / 4;
        }
      }
      return grid ? star_series(a, b, theta, order, *grid) : star_series(a, b, theta, order);
    };
    SeriesResult fg = run(f, g);
    SeriesResult gf = run(g, f);
    if (auto* p = std::get_if<Polynomial>(&fg.value)) return *p - std::get<Polynomial>(gf.value);
    return std::get<GridSymbol>(fg.value) - std::get<GridSymbol>(gf.value);
  }
  if (!grid) throw UsageError("integral mode needs a grid");
  return star_integral(f, g, theta, *grid) - star_integral(g, f, theta, *grid);
}

}  // namespace moyal
