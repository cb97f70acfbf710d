#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "moyal/errors.hpp"

namespace moyal {

/// Uniform periodic grid on [-L, L)^d with N points per axis.
///
/// Node j on an axis sits at -L + j*h, h = 2L/N. Flat indices are row-major
/// with axis 0 slowest. The FFT dual grid uses the same centered layout:
/// frequency k sits at (k - N/2)*pi/L, which is dual().coord(k).
struct PhaseGrid {
  int d = 2;
  double L = 8.0;
  int N = 128;

  PhaseGrid() = default;
  PhaseGrid(int d_, double L_, int N_) : d(d_), L(L_), N(N_) {
    if (d < 1) throw ConstructionError("grid dimension must be positive");
    if (!(L > 0.0) || !std::isfinite(L)) throw ConstructionError("grid half-extent must be positive");
    if (N < 2 || (N & (N - 1)) != 0) throw ConstructionError("grid N must be a power of two >= 2");
  }

  double spacing() const { return 2.0 * L / N; }
  double coord(int j) const { return -L + j * spacing(); }
  double cell_volume() const { return std::pow(spacing(), d); }
  double nyquist() const { return std::numbers::pi * N / (2.0 * L); }

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(N);
    return s;
  }

  /// Frequency grid: spacing pi/L, same point count and centered layout.
  PhaseGrid dual() const { return PhaseGrid(d, nyquist(), N); }

  std::vector<double> axis() const {
    std::vector<double> x(N);
    for (int j = 0; j < N; ++j) x[j] = coord(j);
    return x;
  }

  void unravel(std::size_t flat, int* idx) const {
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % N);
      flat /= N;
    }
  }

  std::vector<double> point(std::size_t flat) const {
    std::vector<int> idx(d);
    unravel(flat, idx.data());
    std::vector<double> x(d);
    for (int a = 0; a < d; ++a) x[a] = coord(idx[a]);
    return x;
  }

  bool operator==(const PhaseGrid& o) const {
    return d == o.d && N == o.N && std::abs(L - o.L) <= 1e-12 * L;
  }
};

inline void require_same_grid(const PhaseGrid& a, const PhaseGrid& b) {
  if (!(a == b)) throw GridMismatchError("operands live on different grids");
}

}  // namespace moyal
