#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "moyal/bridge.hpp"
#include "moyal/functional.hpp"
#include "moyal/starproduct.hpp"

namespace moyal {

/// <u * f, g> = <u, f * g> (left) or <f * u, g> = <u, g * f> (right), with
/// the star products computed in integral mode on `grid`.
inline cplx star_functional(const Functional& u, const Symbol& f, const ThetaMatrix& theta, Side side,
                            const Symbol& g_probe, const PhaseGrid& grid, Diagnostics* diag = nullptr) {
  const GridSymbol prod =
      side == Side::left ? star_integral(f, g_probe, theta, grid) : star_integral(g_probe, f, theta, grid);
  if (diag) diag->merge(prod.diag);
  return pair(u, prod, diag);
}

/// v * f for a density functional by three grid routes: the density as an
/// ordinary symbol, the transformed functional twisted convolution, and the
/// -4 theta^{-1} bridge. The fourth route, the defining pairing, depends on
/// a probe and is star_functional.
struct DualityPaths {
  GridSymbol regular;
  GridSymbol fourier_path;
  GridSymbol bridge_path;
};

inline DualityPaths left_product_paths(const Functional& v, const Symbol& f, const ThetaMatrix& theta,
                                       const PhaseGrid& grid) {
  DualityPaths out;
  out.regular = star_integral(Symbol(v.density(grid)), f, theta, grid);
  // F(v * f) = (2 pi)^{-d} v^ *^ f^ on the dual grid
  const Symbol fhat = fourier(f, true);
  GridSymbol spec = twisted_conv_functional(fourier(v, true), fhat, theta, Side::left, grid.dual());
  spec *= 1.0 / std::pow(2.0 * std::numbers::pi, grid.d);
  out.fourier_path = fourier(spec, false);
  out.bridge_path = star_via_twisted(Operand(v), f, theta, Side::left, grid);
  return out;
}

struct ApproxIdentityResult {
  double err = 0.0;
  double omega_check = 0.0;
  Diagnostics diag;
};

/// sup |f * e_nu - f| (right) or sup |e_nu * f - f| (left) on `grid`, with
/// e_nu(x) = e(x / nu) and
///
///   (f * e_nu)(x) = int omega_nu(q) f(x - theta q / 2) e^{iqx} dq,
///   omega_nu(q) = (nu / 2 pi)^d e^(nu q),
///
/// integrated on a q grid fitted to omega_nu. omega_check is
/// |sum omega_nu h_q^d - 1|.
inline ApproxIdentityResult approx_identity_error(const Symbol& f, const Gaussian& e, int nu, const ThetaMatrix& theta,
                                                  Side side, const PhaseGrid& grid, int q_points = 64) {
  if (nu < 1) throw UsageError("nu must be a positive integer");
  const int d = grid.d;
  if (e.d() != d || dimension(f) != d) throw GridMismatchError("dimensions differ");
  const cplx e0 = e(std::vector<double>(d, 0.0));
  if (std::abs(e0 - 1.0) > 1e-12) throw NormalizationError("e(0) must equal 1");

  ApproxIdentityResult res;
  // omega_nu is (2 pi)^{-d} times the transform of e_nu
  const Gaussian omega = e.dilated(nu).fourier(true).scaled(std::pow(2.0 * std::numbers::pi, -d));
  const Eigen::MatrixXd A = omega.M().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lam = es.eigenvalues().minCoeff();
  const Eigen::VectorXd centre = 0.5 * A.ldlt().solve(Eigen::VectorXd(omega.b().real()));
  // 45 e-folds below the peak of |omega_nu|
  const double Q = centre.cwiseAbs().maxCoeff() + std::sqrt(45.0 / lam);
  const PhaseGrid qgrid(d, Q, q_points);
  const GridSymbol w_grid = sample(Symbol(omega), qgrid);
  std::vector<cplx> w = w_grid.values;
  const double hq = qgrid.cell_volume();
  cplx total = 0.0;
  for (auto& z : w) {
    total += z * hq;
    z *= hq;
  }
  res.omega_check = std::abs(total - 1.0);

  const ThetaMatrix th = side == Side::right ? theta : theta.negated();
  const GridSymbol prod = detail::shift_sum(f, w, qgrid, th, grid);
  detail::check_finite(prod, "approx_identity_error");
  const GridSymbol fs = sample(f, grid);
  res.diag.merge(fs.diag);
  res.err = sup_diff(prod, fs);
  return res;
}

}  // namespace moyal
