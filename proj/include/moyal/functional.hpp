#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "moyal/errors.hpp"
#include "moyal/gaussian.hpp"
#include "moyal/parallel.hpp"
#include "moyal/polynomial.hpp"
#include "moyal/spectral.hpp"
#include "moyal/symbol.hpp"
#include "moyal/theta.hpp"

namespace moyal {

struct Delta {
  std::vector<double> xi;
};
/// The regular functional of the function e^{ik.x}.
struct PlaneWave {
  std::vector<double> k;
};
/// f -> int f dx.
struct One {};
/// f -> int p G f dx.
struct PolyGaussianDensity {
  Polynomial p;
  Gaussian G;
};

/// A dual-space element with a closed-form pairing rule, times a scale.
class Functional {
 public:
  using Kind = std::variant<Delta, PlaneWave, One, PolyGaussianDensity>;

  Functional(int d, Kind kind, cplx scale = 1.0) : d_(d), kind_(std::move(kind)), scale_(scale) {
    if (d < 1) throw ConstructionError("functional dimension must be positive");
    if (auto* dl = std::get_if<Delta>(&kind_); dl && static_cast<int>(dl->xi.size()) != d)
      throw ConstructionError("delta point has the wrong dimension");
    if (auto* pw = std::get_if<PlaneWave>(&kind_); pw && static_cast<int>(pw->k.size()) != d)
      throw ConstructionError("plane wave vector has the wrong dimension");
    if (auto* pg = std::get_if<PolyGaussianDensity>(&kind_); pg && (pg->p.d() != d || pg->G.d() != d))
      throw ConstructionError("density has the wrong dimension");
  }

  static Functional delta(std::vector<double> xi) {
    const int d = static_cast<int>(xi.size());
    return Functional(d, Delta{std::move(xi)});
  }
  static Functional plane_wave(std::vector<double> k) {
    const int d = static_cast<int>(k.size());
    return Functional(d, PlaneWave{std::move(k)});
  }
  static Functional one(int d) { return Functional(d, One{}); }
  static Functional poly_gaussian(Polynomial p, Gaussian G) {
    const int d = p.d();
    return Functional(d, PolyGaussianDensity{std::move(p), std::move(G)});
  }

  int d() const { return d_; }
  const Kind& kind() const { return kind_; }
  cplx scale() const { return scale_; }
  Functional scaled(cplx s) const { return Functional(d_, kind_, scale_ * s); }

  const char* type_name() const {
    switch (kind_.index()) {
      case 0: return "delta";
      case 1: return "plane_wave";
      case 2: return "one";
      default: return "poly_gaussian";
    }
  }

  /// Samples of the density p G, for the variants that have one.
  GridSymbol density(const PhaseGrid& grid) const {
    auto* pg = std::get_if<PolyGaussianDensity>(&kind_);
    if (!pg) throw RepresentationError(std::string(type_name()) + " has no density on a grid");
    GridSymbol out = sample(Symbol(pg->G), grid);
    for_each_node(grid, [&](const std::vector<double>& x, std::size_t i) { out.values[i] *= scale_ * pg->p(x); });
    return out;
  }

 private:
  int d_;
  Kind kind_;
  cplx scale_;
};

/// <u, f>.
inline cplx pair(const Functional& u, const Symbol& f, Diagnostics* diag = nullptr) {
  if (dimension(f) != u.d()) throw GridMismatchError("functional and symbol dimensions differ");
  const cplx s = u.scale();
  auto edge_check = [&](const GridSymbol& g) {
    if (diag && g.boundary_ratio() > 1e-10)
      diag->flag_grid_too_small("grid symbol does not decay at the box edge; pairing truncated");
  };

  if (auto* dl = std::get_if<Delta>(&u.kind())) {
    if (auto* gs = std::get_if<GridSymbol>(&f)) return s * SpectralField(*gs)(dl->xi);
    return s * evaluate(f, dl->xi);
  }
  if (auto* pw = std::get_if<PlaneWave>(&u.kind())) {
    if (auto* g = std::get_if<Gaussian>(&f)) return s * g->modulated(pw->k).integral();
    if (auto* gs = std::get_if<GridSymbol>(&f)) {
      edge_check(*gs);
      cplx acc = 0.0;
      for_each_node(gs->grid, [&](const std::vector<double>& x, std::size_t i) {
        double ph = 0.0;
        for (int a = 0; a < u.d(); ++a) ph += pw->k[a] * x[a];
        acc += gs->values[i] * std::polar(1.0, ph);
      });
      return s * acc * gs->grid.cell_volume();
    }
    throw RepresentationError("a plane wave cannot be paired with a polynomial");
  }
  if (std::holds_alternative<One>(u.kind())) {
    if (auto* g = std::get_if<Gaussian>(&f)) return s * g->integral();
    if (auto* gs = std::get_if<GridSymbol>(&f)) {
      edge_check(*gs);
      return s * gs->integral();
    }
    throw RepresentationError("the functional 1 cannot be paired with a polynomial");
  }
  const auto& pg = std::get<PolyGaussianDensity>(u.kind());
  if (auto* g = std::get_if<Gaussian>(&f)) return s * (pg.G * *g).integral_with(pg.p);
  if (auto* p = std::get_if<Polynomial>(&f)) return s * pg.G.integral_with(pg.p * *p);
  const GridSymbol& gs = std::get<GridSymbol>(f);
  const GridSymbol rho = u.density(gs.grid);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) acc += rho.values[i] * gs.values[i];
  return acc * gs.grid.cell_volume();
}

/// Transform of a functional, defined by <u^, phi> = <u, phi^> (forward) and
/// <u-check, phi> = <u, phi-check> (inverse), matching the function
/// convention on regular functionals.
inline Functional fourier(const Functional& u, bool forward = true) {
  const int d = u.d();
  const double two_pi_d = std::pow(2.0 * std::numbers::pi, d);
  const cplx s = u.scale();
  auto neg = [](std::vector<double> v) {
    for (auto& x : v) x = -x;
    return v;
  };
  if (auto* dl = std::get_if<Delta>(&u.kind())) {
    if (forward) return Functional(d, PlaneWave{neg(dl->xi)}, s);
    return Functional(d, PlaneWave{dl->xi}, s / two_pi_d);
  }
  if (auto* pw = std::get_if<PlaneWave>(&u.kind())) {
    if (forward) return Functional(d, Delta{pw->k}, s * two_pi_d);
    return Functional(d, Delta{neg(pw->k)}, s);
  }
  if (std::holds_alternative<One>(u.kind())) {
    if (forward) return Functional(d, Delta{std::vector<double>(d, 0.0)}, s * two_pi_d);
    return Functional(d, Delta{std::vector<double>(d, 0.0)}, s);
  }
  // x^n e^{-iqx} = (i d_q)^n e^{-iqx}, and p^n e^{ipx} = (-i d_x)^n e^{ipx}
  const auto& pg = std::get<PolyGaussianDensity>(u.kind());
  const Gaussian Ghat = pg.G.fourier(forward);
  const cplx unit = forward ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  Polynomial q(d);
  for (auto& [n, c] : pg.p.terms()) q += Ghat.derivative_factor(n) * (c * ipow(unit, order(n)));
  return Functional(d, PolyGaussianDensity{q, Ghat}, s);
}

/// <u*, f> = conj <u, f*>.
inline Functional involute(const Functional& u) {
  const int d = u.d();
  const cplx s = std::conj(u.scale());
  if (auto* dl = std::get_if<Delta>(&u.kind())) return Functional(d, *dl, s);
  if (auto* pw = std::get_if<PlaneWave>(&u.kind())) {
    std::vector<double> k = pw->k;
    for (auto& x : k) x = -x;
    return Functional(d, PlaneWave{k}, s);
  }
  if (std::holds_alternative<One>(u.kind())) return Functional(d, One{}, s);
  const auto& pg = std::get<PolyGaussianDensity>(u.kind());
  return Functional(d, PolyGaussianDensity{pg.p.conj(), pg.G.conj()}, s);
}

inline Symbol involute(const Symbol& f) { return conj(f); }

enum class Side { left, right };

/// (v *^ g)(q) = <v, g(q - .) e^{+-(i/2) q.theta(.)}> at every node q, with
/// the + sign for the left product. g must be a closed-form Gaussian, so the
/// test function inside the pairing is again a Gaussian.
inline GridSymbol twisted_conv_functional(const Functional& v, const Symbol& g, const ThetaMatrix& theta, Side side,
                                          const PhaseGrid& grid) {
  const auto* gp = std::get_if<Gaussian>(&g);
  if (!gp) throw RepresentationError("functional twisted convolution needs a Gaussian partner");
  const int d = grid.d;
  if (v.d() != d || gp->d() != d || theta.d() != d) throw GridMismatchError("dimensions differ");
  const CMat& M = gp->M();
  const CVec& b = gp->b();
  const cplx c = gp->c();
  const double sgn = side == Side::left ? 1.0 : -1.0;
  const Eigen::MatrixXcd thT = theta.entries().transpose().cast<cplx>();
  const cplx half_i(0.0, 0.5 * sgn);
  const cplx s = v.scale();

  // as a function of p: exp(-p.Mp + beta_q.p + gamma_q)
  //   beta_q = 2Mq - b + (+-i/2) theta^T q,  gamma_q = -q.Mq + b.q + c
  FixedQuadratic fq;
  const PolyGaussianDensity* pg = std::get_if<PolyGaussianDensity>(&v.kind());
  if (pg)
    fq = FixedQuadratic(CMat(M + pg->G.M()));
  else if (!std::holds_alternative<Delta>(v.kind()))
    fq = FixedQuadratic(M);

  GridSymbol out(grid);
  parallel_blocks(grid.size(), [&](std::size_t i0, std::size_t i1) {
    CVec q(d), beta(d);
    std::vector<double> x(d);
    std::vector<int> idx(d);
    for (std::size_t i = i0; i < i1; ++i) {
      grid.unravel(i, idx.data());
      for (int a = 0; a < d; ++a) q(a) = grid.coord(idx[a]);
      const CVec Mq = M * q;
      beta = 2.0 * Mq - b + half_i * (thT * q);
      const cplx gamma = -(q.transpose() * Mq)(0, 0) + (b.transpose() * q)(0, 0) + c;
      cplx val;
      if (auto* dl = std::get_if<Delta>(&v.kind())) {
        CVec xi(d);
        for (int a = 0; a < d; ++a) xi(a) = dl->xi[a];
        val = std::exp(-(xi.transpose() * M * xi)(0, 0) + (beta.transpose() * xi)(0, 0) + gamma);
      } else if (auto* pw = std::get_if<PlaneWave>(&v.kind())) {
        CVec bk = beta;
        for (int a = 0; a < d; ++a) bk(a) += cplx(0.0, pw->k[a]);
        val = fq.integral(bk, gamma);
      } else if (std::holds_alternative<One>(v.kind())) {
        val = fq.integral(beta, gamma);
      } else {
        val = fq.integral_with(pg->p, CVec(beta + pg->G.b()), gamma + pg->G.c());
      }
      out.values[i] = s * val;
    }
  });
  for (auto& z : out.values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalError("NaN in functional twisted convolution");
  return out;
}

}  // namespace moyal
