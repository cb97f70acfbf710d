#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "moyal/errors.hpp"
#include "moyal/multiindex.hpp"

namespace moyal {

using cplx = std::complex<double>;

template <class T>
T ipow(T x, int k) {
  T r = T(1);
  for (; k > 0; --k) r *= x;
  return r;
}

/// Finite multivariate polynomial sum_n c_n x^n with complex coefficients.
class Polynomial {
 public:
  using Terms = std::map<Multiindex, cplx>;

  Polynomial() = default;
  explicit Polynomial(int d) : d_(d) {
    if (d < 1) throw ConstructionError("polynomial dimension must be positive");
  }
  Polynomial(int d, Terms terms) : Polynomial(d) {
    for (auto& [n, c] : terms) add_term(n, c);
  }

  static Polynomial constant(int d, cplx c) {
    Polynomial p(d);
    p.add_term(Multiindex(d, 0), c);
    return p;
  }
  /// The coordinate function x^axis.
  static Polynomial coordinate(int d, int axis) {
    Multiindex n(d, 0);
    n.at(axis) = 1;
    Polynomial p(d);
    p.add_term(n, 1.0);
    return p;
  }

  int d() const { return d_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(const Multiindex& n, cplx c) {
    if (static_cast<int>(n.size()) != d_) throw ConstructionError("multiindex length does not match dimension");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ConstructionError("polynomial coefficient is not finite");
    for (int k : n)
      if (k < 0) throw ConstructionError("negative exponent");
    if (c == cplx(0.0)) return;
    auto [it, fresh] = terms_.emplace(n, c);
    if (!fresh) {
      it->second += c;
      if (it->second == cplx(0.0)) terms_.erase(it);
    }
  }

  cplx coeff(const Multiindex& n) const {
    auto it = terms_.find(n);
    return it == terms_.end() ? cplx(0.0) : it->second;
  }

  int degree() const {
    int deg = -1;
    for (auto& [n, c] : terms_) deg = std::max(deg, order(n));
    return deg;
  }

  /// Largest exponent of each axis over all terms.
  Multiindex max_exponents() const {
    Multiindex m(d_, 0);
    for (auto& [n, c] : terms_)
      for (int a = 0; a < d_; ++a) m[a] = std::max(m[a], n[a]);
    return m;
  }

  template <class Vec>
  cplx operator()(const Vec& x) const {
    cplx acc = 0.0;
    for (auto& [n, c] : terms_) {
      cplx t = c;
      for (int a = 0; a < d_; ++a)
        for (int k = 0; k < n[a]; ++k) t *= x[a];
      acc += t;
    }
    return acc;
  }

  /// d^k/dx^k along one axis.
  Polynomial derivative(int axis, int k = 1) const {
    Polynomial out(d_);
    for (auto& [n, c] : terms_) {
      if (n[axis] < k) continue;
      double f = 1.0;
      for (int j = 0; j < k; ++j) f *= n[axis] - j;
      Multiindex m = n;
      m[axis] -= k;
      out.add_term(m, c * f);
    }
    return out;
  }

  Polynomial derivative(const Multiindex& k) const {
    Polynomial out = *this;
    for (int a = 0; a < d_; ++a)
      if (k[a] > 0) out = out.derivative(a, k[a]);
    return out;
  }

  Polynomial conj() const {
    Polynomial out(d_);
    for (auto& [n, c] : terms_) out.add_term(n, std::conj(c));
    return out;
  }

  /// p(x + s) expanded in powers of x.
  Polynomial shifted(const std::vector<cplx>& s) const {
    Polynomial out(d_);
    for (auto& [n, c] : terms_) {
      // product over axes of (x_a + s_a)^{n_a}
      std::vector<std::pair<Multiindex, cplx>> partial{{Multiindex(d_, 0), c}};
      for (int a = 0; a < d_; ++a) {
        std::vector<std::pair<Multiindex, cplx>> next;
        double binom = 1.0;
        for (int j = 0; j <= n[a]; ++j) {
          const cplx w = binom * ipow(s[a], n[a] - j);
          for (auto& [m, v] : partial) {
            Multiindex mm = m;
            mm[a] = j;
            next.emplace_back(mm, v * w);
          }
          binom = binom * (n[a] - j) / (j + 1);
        }
        partial = std::move(next);
      }
      for (auto& [m, v] : partial) out.add_term(m, v);
    }
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_dim(o);
    for (auto& [n, c] : o.terms_) add_term(n, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_dim(o);
    for (auto& [n, c] : o.terms_) add_term(n, -c);
    return *this;
  }
  Polynomial& operator*=(cplx s) {
    if (s == cplx(0.0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [n, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, cplx s) { return a *= s; }
  friend Polynomial operator*(cplx s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_dim(b);
    Polynomial out(a.d_);
    for (auto& [n, c] : a.terms_)
      for (auto& [m, e] : b.terms_) {
        Multiindex k(a.d_);
        for (int i = 0; i < a.d_; ++i) k[i] = n[i] + m[i];
        out.add_term(k, c * e);
      }
    return out;
  }

  /// Largest coefficient difference; the exact-comparison primitive.
  friend double max_coeff_diff(const Polynomial& a, const Polynomial& b) {
    double worst = 0.0;
    for (auto& [n, c] : a.terms_) worst = std::max(worst, std::abs(c - b.coeff(n)));
    for (auto& [n, c] : b.terms_) worst = std::max(worst, std::abs(c - a.coeff(n)));
    return worst;
  }

 private:
  void check_dim(const Polynomial& o) const {
    if (o.d_ != d_) throw ConstructionError("polynomial dimensions differ");
  }

  int d_ = 0;
  Terms terms_;
};

}  // namespace moyal
