#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "moyal/errors.hpp"
#include "moyal/fft.hpp"
#include "moyal/parallel.hpp"
#include "moyal/symbol.hpp"
#include "moyal/theta.hpp"

namespace moyal {

/// Forward transform f^(p) = int f(x) e^{-ipx} dx, or the inverse with
/// kernel (2 pi)^{-d} e^{ipx}. Grid symbols map to the dual grid.
inline GridSymbol fourier(const GridSymbol& f, bool forward = true) {
  GridSymbol out(f.grid.dual(), detail::centered_transform(f.values, f.grid, forward));
  out.diag = f.diag;
  out.adequate = f.adequate;
  return out;
}

inline Symbol fourier(const Symbol& f, bool forward = true) {
  if (auto* g = std::get_if<Gaussian>(&f)) return g->fourier(forward);
  if (auto* gs = std::get_if<GridSymbol>(&f)) return fourier(*gs, forward);
  throw RepresentationError("the Fourier transform of a polynomial is not a function");
}

/// Modes below this fraction of the largest mode are treated as roundoff
/// and dropped before differentiating.
inline constexpr double kSpectralFloor = 1e-15;

/// A grid symbol held in frequency space, for repeated differentiation and
/// off-grid evaluation.
class SpectralField {
 public:
  explicit SpectralField(const GridSymbol& f) : grid_(f.grid), hat_(detail::centered_transform(f.values, f.grid, true)) {
    double peak = 0.0;
    for (auto& z : hat_) peak = std::max(peak, std::abs(z));
    for (auto& z : hat_)
      if (std::abs(z) < kSpectralFloor * peak) z = 0.0;
  }

  const PhaseGrid& grid() const { return grid_; }
  const std::vector<cplx>& hat() const { return hat_; }

  /// d^n f on the grid. Orders above N/4 on any axis are refused; the
  /// Nyquist mode is dropped along axes with odd order.
  GridSymbol derivative(const Multiindex& n) const {
    const int d = grid_.d;
    const int N = grid_.N;
    if (static_cast<int>(n.size()) != d) throw SpectralOrderError("multiindex length does not match grid");
    for (int k : n)
      if (k > N / 4)
        throw SpectralOrderError("derivative order " + std::to_string(k) + " exceeds N/4 = " + std::to_string(N / 4));
    const PhaseGrid dual = grid_.dual();
    std::vector<std::vector<cplx>> factor(d, std::vector<cplx>(N));
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < N; ++k)
        factor[a][k] = (k == 0 && n[a] % 2 == 1) ? cplx(0.0) : ipow(cplx(0.0, dual.coord(k)), n[a]);
    std::vector<cplx> spec(hat_.size());
    std::vector<int> idx(d);
    for (std::size_t i = 0; i < hat_.size(); ++i) {
      grid_.unravel(i, idx.data());
      cplx m = hat_[i];
      for (int a = 0; a < d && m != cplx(0.0); ++a) m *= factor[a][idx[a]];
      spec[i] = m;
    }
    return GridSymbol(grid_, detail::centered_transform(spec, dual, false));
  }

  /// Band-limited interpolant at an arbitrary point; the Nyquist mode
  /// contributes its cosine part.
  cplx operator()(const std::vector<double>& x) const {
    const int d = grid_.d;
    const int N = grid_.N;
    const PhaseGrid dual = grid_.dual();
    std::vector<std::vector<cplx>> e(d, std::vector<cplx>(N));
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < N; ++k) {
        const double p = dual.coord(k);
        e[a][k] = k == 0 ? cplx(std::cos(p * x[a])) : std::polar(1.0, p * x[a]);
      }
    // contract the last axis first; it is contiguous
    std::vector<cplx> cur = hat_;
    for (int a = d - 1; a >= 0; --a) {
      std::vector<cplx> next(cur.size() / N);
      for (std::size_t o = 0; o < next.size(); ++o) {
        const cplx* row = cur.data() + o * N;
        cplx t = 0.0;
        for (int k = 0; k < N; ++k) t += row[k] * e[a][k];
        next[o] = t;
      }
      cur = std::move(next);
    }
    return cur[0] * std::pow(dual.spacing() / (2.0 * std::numbers::pi), d);
  }

  /// Samples of f(x - s) on the same grid.
  std::vector<cplx> shifted(const std::vector<double>& s) const {
    const int d = grid_.d;
    const int N = grid_.N;
    const PhaseGrid dual = grid_.dual();
    std::vector<std::vector<cplx>> e(d, std::vector<cplx>(N));
    for (int a = 0; a < d; ++a)
      for (int k = 0; k < N; ++k) {
        const double p = dual.coord(k);
        e[a][k] = k == 0 ? cplx(std::cos(p * s[a])) : std::polar(1.0, -p * s[a]);
      }
    std::vector<cplx> spec(hat_.size());
    std::vector<int> idx(d);
    for (std::size_t i = 0; i < hat_.size(); ++i) {
      grid_.unravel(i, idx.data());
      cplx t = hat_[i];
      for (int a = 0; a < d && t != cplx(0.0); ++a) t *= e[a][idx[a]];
      spec[i] = t;
    }
    return detail::centered_transform(spec, dual, false);
  }

 private:
  PhaseGrid grid_;
  std::vector<cplx> hat_;
};

/// Derivatives of a Gaussian or grid symbol on a grid, one order at a time.
///
/// Gaussians are differentiated exactly through
///   d^{n+e_a} G = l_a d^n G - 2 sum_j M_aj n_j d^{n-e_j} G,  l_a = b_a - 2 (Mx)_a,
/// which keeps relative accuracy in the tails; grid symbols spectrally.
class DerivativeSource {
 public:
  using Stratum = std::vector<std::pair<Multiindex, GridSymbol>>;

  DerivativeSource(const Symbol& f, const PhaseGrid& grid) : grid_(grid) {
    if (dimension(f) != grid.d) throw GridMismatchError("symbol and grid dimensions differ");
    if (auto* g = std::get_if<Gaussian>(&f)) {
      gauss_ = *g;
      base_ = sample(f, grid);
      ell_.assign(grid.d, std::vector<cplx>(grid.size()));
      for_each_node(grid, [&](const std::vector<double>& x, std::size_t i) {
        for (int a = 0; a < grid.d; ++a) {
          cplx v = g->b()(a);
          for (int j = 0; j < grid.d; ++j) v -= 2.0 * g->M()(a, j) * x[j];
          ell_[a][i] = v;
        }
      });
    } else if (auto* gs = std::get_if<GridSymbol>(&f)) {
      require_same_grid(gs->grid, grid);
      base_ = *gs;
      field_.emplace(*gs);
    } else {
      throw RepresentationError("derivatives on a grid need a Gaussian or grid symbol");
    }
  }

  const GridSymbol& base() const { return base_; }
  const PhaseGrid& grid() const { return grid_; }
  bool exact() const { return gauss_.has_value(); }
  const std::optional<Gaussian>& gaussian() const { return gauss_; }

  /// Walks the derivative strata |n| = 0, 1, 2, ... keeping only two alive.
  class Stepper {
   public:
    explicit Stepper(const DerivativeSource& src) : src_(src), cur_{{Multiindex(src.grid_.d, 0), src.base_}} {}
    int order() const { return k_; }
    const Stratum& stratum() const { return cur_; }
    void advance() {
      const int d = src_.grid_.d;
      Stratum next;
      for (const Multiindex& n : multiindices_of_order(d, k_ + 1)) {
        if (!src_.gauss_) {
          next.emplace_back(n, src_.field_->derivative(n));
          continue;
        }
        // step along the first nonzero axis
        int a = 0;
        while (n[a] == 0) ++a;
        Multiindex m = n;
        m[a] -= 1;
        const GridSymbol& dm = find(cur_, m);
        GridSymbol out(src_.grid_);
        const std::vector<cplx>& ell = src_.ell_[a];
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = ell[i] * dm.values[i];
        for (int j = 0; j < d; ++j) {
          if (m[j] == 0) continue;
          Multiindex mm = m;
          mm[j] -= 1;
          const GridSymbol& dmm = find(prev_, mm);
          const cplx w = -2.0 * src_.gauss_->M()(a, j) * static_cast<double>(m[j]);
          for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += w * dmm.values[i];
        }
        next.emplace_back(n, std::move(out));
      }
      prev_ = std::move(cur_);
      cur_ = std::move(next);
      ++k_;
    }

   private:
    const DerivativeSource& src_;
    Stratum prev_, cur_;
    int k_ = 0;
  };

  /// Calls fn(k, stratum) for k = 0..n_max, where the stratum holds d^n f
  /// for every |n| = k.
  template <class Fn>
  void for_each_order(int n_max, Fn&& fn) const {
    Stepper st(*this);
    fn(0, st.stratum());
    for (int k = 1; k <= n_max; ++k) {
      st.advance();
      fn(k, st.stratum());
    }
  }

  static const GridSymbol& find(const Stratum& s, const Multiindex& n) {
    for (auto& [m, g] : s)
      if (m == n) return g;
    throw NumericalError("missing derivative stratum entry");
  }

  /// A single derivative d^n f.
  GridSymbol derivative(const Multiindex& n) const {
    if (!gauss_) return order(n) == 0 ? base_ : field_->derivative(n);
    for (int k : n)
      if (k > grid_.N / 4) throw SpectralOrderError("derivative order exceeds N/4 = " + std::to_string(grid_.N / 4));
    GridSymbol result;
    for_each_order(order(n), [&](int k, const Stratum& s) {
      if (k == order(n)) result = find(s, n);
    });
    return result;
  }

 private:
  PhaseGrid grid_;
  std::optional<Gaussian> gauss_;
  std::optional<SpectralField> field_;
  std::vector<std::vector<cplx>> ell_;
  GridSymbol base_;
};

namespace detail {

/// Tables exp(i * scale * m_ab * y_i * z_j) for each nonzero entry m_ab,
/// with y, z the node coordinates of two axes.
struct BilinearPhase {
  struct Entry {
    int a, b;
    std::vector<cplx> table;  // N*N, row index from the first argument
  };
  int N = 0;
  std::vector<Entry> entries;

  BilinearPhase(const Eigen::MatrixXd& m, double scale, const std::vector<double>& y, const std::vector<double>& z)
      : N(static_cast<int>(y.size())) {
    for (int a = 0; a < m.rows(); ++a)
      for (int b = 0; b < m.cols(); ++b) {
        if (m(a, b) == 0.0) continue;
        Entry e{a, b, std::vector<cplx>(static_cast<std::size_t>(N) * N)};
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) e.table[i * N + j] = std::polar(1.0, scale * m(a, b) * y[i] * z[j]);
        entries.push_back(std::move(e));
      }
  }
};

}  // namespace detail

/// Relative threshold below which integrand weights are skipped.
inline constexpr double kNegligible = 1e-17;

/// (F *^_theta G)(q) = int F(p) G(q - p) e^{(i/2) q.theta p} dp by direct
/// quadrature on `grid`, with G extended by zero outside the box.
inline GridSymbol twisted_convolution(const Symbol& F, const Symbol& G, const ThetaMatrix& theta,
                                      const PhaseGrid& grid) {
  if (theta.d() != grid.d) throw GridMismatchError("theta and grid dimensions differ");
  const GridSymbol f = sample(F, grid);
  const GridSymbol g = sample(G, grid);
  const int d = grid.d;
  const int N = grid.N;
  const int last = d - 1;
  const std::vector<double> axis = grid.axis();
  // q.theta p = sum_ab q_a theta_ab p_b
  const detail::BilinearPhase phase(theta.entries(), 0.5, axis, axis);

  const std::size_t rows = grid.size() / N;
  double peak = f.sup();
  // support of F per row along the last axis
  struct Row {
    std::size_t row;
    int lo, hi;
  };
  std::vector<Row> support;
  for (std::size_t r = 0; r < rows; ++r) {
    int lo = N, hi = -1;
    for (int j = 0; j < N; ++j)
      if (std::abs(f.values[r * N + j]) > kNegligible * peak) {
        lo = std::min(lo, j);
        hi = j;
      }
    if (hi >= 0) support.push_back({r, lo, hi});
  }

  GridSymbol out(grid);
  const double vol = grid.cell_volume();
  parallel_blocks(grid.size(), [&](std::size_t q0, std::size_t q1) {
    std::vector<int> kq(d), kp(d);
    std::vector<cplx> lastphase(N);
    for (std::size_t q = q0; q < q1; ++q) {
      grid.unravel(q, kq.data());
      std::fill(lastphase.begin(), lastphase.end(), cplx(1.0));
      for (auto& e : phase.entries)
        if (e.b == last)
          for (int j = 0; j < N; ++j) lastphase[j] *= e.table[kq[e.a] * N + j];
      cplx acc = 0.0;
      for (const Row& row : support) {
        // leading indices of p
        std::size_t r = row.row;
        for (int a = last - 1; a >= 0; --a) {
          kp[a] = static_cast<int>(r % N);
          r /= N;
        }
        std::size_t grow = 0;
        bool inside = true;
        for (int a = 0; a < last; ++a) {
          const int t = kq[a] - kp[a] + N / 2;
          if (t < 0 || t >= N) {
            inside = false;
            break;
          }
          grow = grow * N + t;
        }
        if (!inside) continue;
        cplx rowphase = 1.0;
        for (auto& e : phase.entries)
          if (e.b != last) rowphase *= e.table[kq[e.a] * N + kp[e.b]];
        // q_last - p_last + N/2 must stay in [0, N)
        const int lo = std::max(row.lo, kq[last] + N / 2 - (N - 1));
        const int hi = std::min(row.hi, kq[last] + N / 2);
        const cplx* fr = &f.values[row.row * N];
        const cplx* gr = &g.values[grow * N];
        cplx s = 0.0;
        for (int j = lo; j <= hi; ++j) s += fr[j] * gr[kq[last] - j + N / 2] * lastphase[j];
        acc += s * rowphase;
      }
      out.values[q] = acc * vol;
    }
  });
  out.diag.merge(f.diag);
  out.diag.merge(g.diag);
  for (auto& z : out.values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError("NaN in twisted convolution");
  return out;
}

namespace detail {

/// If m has exactly one nonzero entry per row and column, all of the same
/// magnitude, returns that magnitude.
inline std::optional<double> signed_permutation_scale(const Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  double mag = 0.0;
  for (int i = 0; i < d; ++i) {
    int count = 0;
    for (int j = 0; j < d; ++j)
      if (m(i, j) != 0.0) {
        ++count;
        if (mag == 0.0) mag = std::abs(m(i, j));
        if (std::abs(std::abs(m(i, j)) - mag) > 1e-14 * mag) return std::nullopt;
      }
    if (count != 1) return std::nullopt;
  }
  for (int j = 0; j < d; ++j) {
    int count = 0;
    for (int i = 0; i < d; ++i) count += m(i, j) != 0.0;
    if (count != 1) return std::nullopt;
  }
  return mag;
}

}  // namespace detail

/// Symplectic Fourier transforms with kernel e^{-2i x.theta^{-1} xi}
/// (sign = -1, F_theta) or e^{+2i x.theta^{-1} xi} (sign = +1, conjugate).
///
/// Equivalently g^(2 sign' theta^{-1} xi): Gaussians map in closed form,
/// grid symbols through the FFT followed by a relabelling of the dual grid.
inline Symbol symplectic_fourier(const Symbol& g, const ThetaMatrix& theta, int sign) {
  if (sign != 1 && sign != -1) throw UsageError("symplectic_fourier sign must be +1 or -1");
  const Eigen::MatrixXd& inv = theta.inverse();
  // the transform is g^(S xi), S = 2 theta^{-1} for F_theta and -2 theta^{-1} for its conjugate
  const Eigen::MatrixXd S = (sign == -1 ? 2.0 : -2.0) * inv;
  if (auto* gg = std::get_if<Gaussian>(&g)) return gg->fourier(true).substituted(S);
  if (std::holds_alternative<Polynomial>(g))
    throw RepresentationError("the symplectic transform of a polynomial is not a function");
  const GridSymbol& f = std::get<GridSymbol>(g);
  const GridSymbol hat = fourier(f, true);
  const int d = f.grid.d;
  const int N = f.grid.N;
  auto perm = detail::signed_permutation_scale(S);
  if (perm) {
    // p_b = sum_a S_ba xi_a lands on the dual lattice when the xi spacing is
    // (pi/L) / |S entry|
    const PhaseGrid out_grid(d, hat.grid.L / *perm, N);
    GridSymbol out(out_grid);
    std::vector<int> src(d), sign_of(d);
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a)
        if (S(b, a) != 0.0) {
          src[b] = a;
          sign_of[b] = S(b, a) > 0 ? 1 : -1;
        }
    std::vector<int> kx(d);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out_grid.unravel(i, kx.data());
      std::size_t flat = 0;
      for (int b = 0; b < d; ++b) {
        int k = N / 2 + sign_of[b] * (kx[src[b]] - N / 2);
        k = ((k % N) + N) % N;  // periodic wrap for the unpaired Nyquist node
        flat = flat * N + k;
      }
      out.values[i] = hat.values[flat];
    }
    out.diag = f.diag;
    return out;
  }
  // general theta: direct quadrature onto a grid of comparable resolution
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  const double smax = svd.singularValues()(0);
  const PhaseGrid out_grid(d, hat.grid.L / smax, N);
  // g^(S xi) = sum_x g(x) e^{-i x.S xi} h^d
  const detail::BilinearPhase phase(S, -1.0, f.grid.axis(), out_grid.axis());
  GridSymbol out(out_grid);
  const double vol = f.grid.cell_volume();
  parallel_blocks(out.size(), [&](std::size_t i0, std::size_t i1) {
    std::vector<int> kx(d), kxi(d);
    for (std::size_t i = i0; i < i1; ++i) {
      out_grid.unravel(i, kxi.data());
      cplx acc = 0.0;
      for (std::size_t j = 0; j < f.size(); ++j) {
        if (f.values[j] == cplx(0.0)) continue;
        f.grid.unravel(j, kx.data());
        cplx ph = 1.0;
        // entry (r, c) of S pairs x_r with xi_c
        for (auto& e : phase.entries) ph *= e.table[kx[e.a] * N + kxi[e.b]];
        acc += f.values[j] * ph;
      }
      out.values[i] = acc * vol;
    }
  });
  out.diag = f.diag;
  return out;
}

}  // namespace moyal
