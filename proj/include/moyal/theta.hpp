#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Dense>

#include "moyal/errors.hpp"

namespace moyal {

class ThetaMatrix;
ThetaMatrix make_theta(const Eigen::MatrixXd& entries, bool require_inverse = false);
ThetaMatrix make_theta(int d, double theta0, bool require_inverse = false);

/// Real antisymmetric noncommutativity matrix theta^{ij}.
class ThetaMatrix {
 public:
  ThetaMatrix() = default;

  int d() const { return d_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }
  double det() const { return det_; }
  bool invertible() const { return inverse_.has_value(); }
  bool is_zero() const { return entries_.cwiseAbs().maxCoeff() == 0.0; }

  const Eigen::MatrixXd& inverse() const {
    if (!inverse_) throw SingularThetaError("theta is singular");
    return *inverse_;
  }

  /// The matrix -4 theta^{-1} that links the star product to the twisted
  /// convolution.
  ThetaMatrix bridged() const;

  /// -theta, which generates the opposite product f *_{-theta} g = g *_theta f.
  ThetaMatrix negated() const;

  /// theta0 if the entries are theta0 times the standard block form, else
  /// nothing.
  std::optional<double> canonical_scale() const {
    if (d_ < 2) return std::nullopt;
    const double s = entries_(0, 1);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j) {
        double want = 0.0;
        if (i % 2 == 0 && j == i + 1) want = s;
        if (i % 2 == 1 && j == i - 1) want = -s;
        if (entries_(i, j) != want) return std::nullopt;
      }
    return s;
  }

  /// Operator norm |theta| (largest singular value).
  double norm() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(entries_);
    return svd.singularValues()(0);
  }

  friend ThetaMatrix make_theta(const Eigen::MatrixXd& entries, bool require_inverse);
  friend ThetaMatrix make_theta(int d, double theta0, bool require_inverse);

 private:
  int d_ = 0;
  Eigen::MatrixXd entries_;
  std::optional<Eigen::MatrixXd> inverse_;
  double det_ = 0.0;
};

/// Validates explicit entries. Antisymmetry is checked exactly; the inverse
/// is attached whenever the matrix is numerically nonsingular.
inline ThetaMatrix make_theta(const Eigen::MatrixXd& entries, bool require_inverse) {
  const int d = static_cast<int>(entries.rows());
  if (entries.cols() != d) throw ConstructionError("theta must be square");
  if (d < 2 || d % 2 != 0) throw ConstructionError("theta dimension must be even and >= 2");
  if (!entries.allFinite()) throw ConstructionError("theta entries must be finite");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (entries(i, j) != -entries(j, i))
        throw ConstructionError("theta is not antisymmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");

  ThetaMatrix t;
  t.d_ = d;
  t.entries_ = entries;
  t.det_ = entries.determinant();
  const double scale = entries.cwiseAbs().maxCoeff();
  const bool singular = scale == 0.0 || std::abs(t.det_) <= 1e-13 * std::pow(scale, d);
  if (singular) {
    t.det_ = 0.0;
    if (require_inverse) throw SingularThetaError("theta is singular but an inverse was requested");
    return t;
  }
  Eigen::MatrixXd inv = entries.fullPivLu().inverse();
  // the inverse of an antisymmetric matrix is antisymmetric; remove roundoff
  inv = 0.5 * (inv - inv.transpose());
  const double resid = (entries * inv - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (resid > 1e-12 || t.det_ <= 0.0) {
    if (require_inverse) throw SingularThetaError("theta is too ill-conditioned to invert");
    t.det_ = std::max(t.det_, 0.0);
    return t;
  }
  t.inverse_ = inv;
  return t;
}

/// Standard symplectic block matrix J with blocks [[0,1],[-1,0]].
inline Eigen::MatrixXd symplectic_j(int d) {
  if (d < 2 || d % 2 != 0) throw ConstructionError("theta dimension must be even and >= 2");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; k += 2) {
    j(k, k + 1) = 1.0;
    j(k + 1, k) = -1.0;
  }
  return j;
}

/// Canonical theta = theta0 * J. For theta0 != 0 the inverse is -J/theta0
/// and det = theta0^d, both set exactly.
inline ThetaMatrix make_theta(int d, double theta0, bool require_inverse) {
  if (!std::isfinite(theta0)) throw ConstructionError("theta0 must be finite");
  ThetaMatrix t = make_theta(Eigen::MatrixXd(theta0 * symplectic_j(d)), require_inverse);
  if (theta0 != 0.0) {
    t.det_ = std::pow(theta0, d);
    t.inverse_ = Eigen::MatrixXd(-symplectic_j(d) / theta0);
  }
  return t;
}

inline ThetaMatrix ThetaMatrix::negated() const {
  if (auto s = canonical_scale()) return make_theta(d_, -*s, false);
  return make_theta(Eigen::MatrixXd(-entries_), false);
}

inline ThetaMatrix ThetaMatrix::bridged() const {
  if (auto s = canonical_scale(); s && *s != 0.0) return make_theta(d_, 4.0 / *s, true);
  const Eigen::MatrixXd b = -4.0 * inverse();
  return make_theta(Eigen::MatrixXd(0.5 * (b - b.transpose())), true);
}

}  // namespace moyal
