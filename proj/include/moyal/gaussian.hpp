#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "moyal/errors.hpp"
#include "moyal/multiindex.hpp"
#include "moyal/polynomial.hpp"

namespace moyal {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// log sqrt(det M) for complex symmetric M whose real part is positive
/// definite. Every eigenvalue then has positive real part, and the product
/// of principal square roots is the branch continuous from the real case,
/// which is the one the Gaussian integral needs.
inline cplx log_sqrt_det(const CMat& M) {
  Eigen::ComplexEigenSolver<CMat> es(M, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
  cplx acc = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) acc += 0.5 * std::log(es.eigenvalues()(i));
  return acc;
}

/// Integrals of exp(-x.Mx + b.x + c) for one fixed M and many (b, c).
///
/// Inverting M and taking its determinant once makes per-point pairings
/// in the functional kernels cheap.
class FixedQuadratic {
 public:
  FixedQuadratic() = default;
  explicit FixedQuadratic(const CMat& M) : M_(M), Minv_(M.inverse()), lsd_(moyal::log_sqrt_det(M)) {
    log_norm_ = 0.5 * static_cast<double>(M.rows()) * std::log(std::numbers::pi) - lsd_;
  }

  const CMat& M() const { return M_; }
  const CMat& inverse() const { return Minv_; }
  cplx log_sqrt_det() const { return lsd_; }

  cplx log_integral(const CVec& b, cplx c) const {
    return c + 0.25 * (b.transpose() * Minv_ * b)(0, 0) + log_norm_;
  }
  cplx integral(const CVec& b, cplx c) const { return std::exp(log_integral(b, c)); }

  /// The integral of p(x) exp(-x.Mx + b.x + c).
  ///
  /// Uses E[x_i x^n] = mu_i E[x^n] + sum_j Sigma_ij n_j E[x^{n-e_j}] with
  /// mu = M^{-1} b / 2 and Sigma = M^{-1} / 2 (formal complex moments).
  cplx integral_with(const Polynomial& p, const CVec& b, cplx c) const {
    if (p.empty()) return 0.0;
    const int d = static_cast<int>(M_.rows());
    const CVec mu = 0.5 * (Minv_ * b);
    std::map<Multiindex, cplx> memo;
    memo[Multiindex(d, 0)] = 1.0;
    auto rec = [&](auto&& self, const Multiindex& n) -> cplx {
      auto it = memo.find(n);
      if (it != memo.end()) return it->second;
      int i = 0;
      while (n[i] == 0) ++i;
      Multiindex m = n;
      m[i] -= 1;
      cplx v = mu(i) * self(self, m);
      for (int j = 0; j < d; ++j) {
        if (m[j] == 0) continue;
        Multiindex k = m;
        k[j] -= 1;
        v += 0.5 * Minv_(i, j) * static_cast<double>(m[j]) * self(self, k);
      }
      memo[n] = v;
      return v;
    };
    cplx acc = 0.0;
    for (auto& [n, coef] : p.terms()) acc += coef * rec(rec, n);
    return acc * integral(b, c);
  }

 private:
  CMat M_, Minv_;
  cplx lsd_ = 0.0;
  cplx log_norm_ = 0.0;
};

/// exp(-x.Mx + b.x + c) with M complex symmetric and Re M positive definite.
class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(CMat M, CVec b, cplx c) : M_(std::move(M)), b_(std::move(b)), c_(c) { validate(); }

  /// exp(-s|x - center|^2) times `amplitude`.
  static Gaussian isotropic(int d, double s, const std::vector<double>& center = {}, cplx amplitude = 1.0) {
    CMat M = CMat::Identity(d, d) * s;
    Gaussian g(M, CVec::Zero(d), std::log(amplitude));
    if (!center.empty()) g = g.translated(center);
    return g;
  }

  int d() const { return static_cast<int>(M_.rows()); }
  const CMat& M() const { return M_; }
  const CVec& b() const { return b_; }
  cplx c() const { return c_; }

  template <class Vec>
  cplx log_value(const Vec& x) const {
    const int n = d();
    cplx q = c_;
    for (int i = 0; i < n; ++i) {
      q += b_(i) * x[i];
      cplx row = 0.0;
      for (int j = 0; j < n; ++j) row += M_(i, j) * x[j];
      q -= x[i] * row;
    }
    return q;
  }

  template <class Vec>
  cplx operator()(const Vec& x) const {
    return std::exp(log_value(x));
  }

  /// Forward transform (kernel e^{-ipx}, no prefactor) or inverse transform
  /// (kernel e^{ipx}, prefactor (2 pi)^{-d}); both are again Gaussians.
  Gaussian fourier(bool forward = true) const {
    const CMat Minv = M_.inverse();
    const cplx i(0.0, 1.0);
    CMat M2 = 0.25 * Minv;
    M2 = 0.5 * (M2 + M2.transpose()).eval();
    CVec b2 = (forward ? -0.5 : 0.5) * i * (Minv * b_);
    cplx c2 = c_ + 0.25 * (b_.transpose() * Minv * b_)(0, 0);
    c2 += 0.5 * d() * std::log(std::numbers::pi) - log_sqrt_det(M_);
    if (!forward) c2 -= d() * std::log(2.0 * std::numbers::pi);
    return Gaussian(M2, b2, c2);
  }

  /// g(x - a).
  Gaussian translated(const std::vector<double>& a) const {
    CVec av(d());
    for (int i = 0; i < d(); ++i) av(i) = a.at(i);
    CVec b2 = b_ + 2.0 * (M_ * av);
    cplx c2 = c_ - (av.transpose() * M_ * av)(0, 0) - (b_.transpose() * av)(0, 0);
    return Gaussian(M_, b2, c2);
  }

  /// e^{i k.x} g(x).
  Gaussian modulated(const std::vector<double>& k) const {
    CVec b2 = b_;
    for (int i = 0; i < d(); ++i) b2(i) += cplx(0.0, k.at(i));
    return Gaussian(M_, b2, c_);
  }

  /// lambda * g.
  Gaussian scaled(cplx lambda) const {
    if (lambda == cplx(0.0)) throw DegenerateInputError("cannot scale a Gaussian by zero");
    return Gaussian(M_, b_, c_ + std::log(lambda));
  }

  /// g(S x) for a real invertible matrix S.
  Gaussian substituted(const Eigen::MatrixXd& S) const {
    const CMat Sc = S.cast<cplx>();
    CMat M2 = Sc.transpose() * M_ * Sc;
    M2 = 0.5 * (M2 + M2.transpose()).eval();
    return Gaussian(M2, Sc.transpose() * b_, c_);
  }

  /// g(x / nu).
  Gaussian dilated(double nu) const {
    return substituted(Eigen::MatrixXd::Identity(d(), d()) / nu);
  }

  Gaussian conj() const { return Gaussian(M_.conjugate(), b_.conjugate(), std::conj(c_)); }

  /// Pointwise product of two Gaussians.
  friend Gaussian operator*(const Gaussian& f, const Gaussian& g) {
    if (f.d() != g.d()) throw ConstructionError("Gaussian dimensions differ");
    return Gaussian(f.M_ + g.M_, f.b_ + g.b_, f.c_ + g.c_);
  }

  /// The integral of g over R^d.
  cplx integral() const { return FixedQuadratic(M_).integral(b_, c_); }

  /// The integral of p(x) g(x).
  cplx integral_with(const Polynomial& p) const { return FixedQuadratic(M_).integral_with(p, b_, c_); }

  /// Polynomial P with d^n g = P g.
  Polynomial derivative_factor(const Multiindex& n) const {
    const int dd = d();
    Polynomial P = Polynomial::constant(dd, 1.0);
    for (int a = 0; a < dd; ++a) {
      // d_a of exp(q(x)) is (b_a - 2 (M x)_a) exp(q(x))
      Polynomial ell = Polynomial::constant(dd, b_(a));
      for (int j = 0; j < dd; ++j) ell += Polynomial::coordinate(dd, j) * (-2.0 * M_(a, j));
      for (int k = 0; k < n.at(a); ++k) P = P.derivative(a) + P * ell;
    }
    return P;
  }

  /// max over real x of Re log g, attained at x* = (Re M)^{-1} Re b / 2.
  double log_peak() const {
    const Eigen::MatrixXd A = M_.real();
    const Eigen::VectorXd br = b_.real();
    return c_.real() + 0.25 * br.dot(A.ldlt().solve(br));
  }

  /// max of Re log g over the faces |x_a| = L of the box [-L, L]^d, with the
  /// other coordinates left free (an upper bound for the box faces).
  double log_boundary_peak(double L) const {
    const int n = d();
    const Eigen::MatrixXd A = M_.real();
    const Eigen::VectorXd br = b_.real();
    double worst = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
      for (double side : {-L, L}) {
        // maximize -x.Ax + br.x with x_a fixed
        std::vector<int> rest;
        for (int j = 0; j < n; ++j)
          if (j != a) rest.push_back(j);
        double val = c_.real() - A(a, a) * side * side + br(a) * side;
        if (!rest.empty()) {
          const int m = static_cast<int>(rest.size());
          Eigen::MatrixXd Ar(m, m);
          Eigen::VectorXd lin(m);
          for (int i = 0; i < m; ++i) {
            lin(i) = br(rest[i]) - 2.0 * A(rest[i], a) * side;
            for (int j = 0; j < m; ++j) Ar(i, j) = A(rest[i], rest[j]);
          }
          val += 0.25 * lin.dot(Ar.ldlt().solve(lin));
        }
        worst = std::max(worst, val);
      }
    return worst;
  }

 private:
  void validate() {
    const int n = static_cast<int>(M_.rows());
    if (n < 1 || M_.cols() != n) throw ConstructionError("Gaussian M must be square");
    if (b_.size() != n) throw ConstructionError("Gaussian b has the wrong length");
    if (!M_.allFinite() || !b_.allFinite() || !std::isfinite(c_.real()) || !std::isfinite(c_.imag()))
      throw ConstructionError("Gaussian parameters must be finite");
    const double scale = M_.cwiseAbs().maxCoeff();
    if ((M_ - M_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ConstructionError("Gaussian M must be symmetric");
    M_ = 0.5 * (M_ + M_.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(M_.real());
    if (llt.info() != Eigen::Success) throw ConstructionError("Gaussian Re M must be positive definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M_.real(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) throw ConstructionError("Gaussian Re M must be positive definite");
  }

  CMat M_;
  CVec b_;
  cplx c_ = 0.0;
};

}  // namespace moyal
