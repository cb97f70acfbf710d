#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "moyal/errors.hpp"
#include "moyal/gaussian.hpp"
#include "moyal/grid.hpp"
#include "moyal/polynomial.hpp"

namespace moyal {

/// Samples of a symbol on a PhaseGrid, plus what was learned while sampling.
struct GridSymbol {
  PhaseGrid grid;
  std::vector<cplx> values;
  Diagnostics diag;
  // true when the symbol has decayed below 1e-14 of its peak at the box edge
  bool adequate = false;

  GridSymbol() = default;
  explicit GridSymbol(const PhaseGrid& g) : grid(g), values(g.size(), cplx(0.0)) {}
  GridSymbol(const PhaseGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw ConstructionError("grid symbol has the wrong number of values");
    for (auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NumericalError("grid symbol contains NaN or Inf");
  }

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  GridSymbol& operator+=(const GridSymbol& o) {
    require_same_grid(grid, o.grid);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    diag.merge(o.diag);
    return *this;
  }
  GridSymbol& operator-=(const GridSymbol& o) {
    require_same_grid(grid, o.grid);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    diag.merge(o.diag);
    return *this;
  }
  GridSymbol& operator*=(cplx s) {
    for (auto& z : values) z *= s;
    return *this;
  }
  friend GridSymbol operator+(GridSymbol a, const GridSymbol& b) { return a += b; }
  friend GridSymbol operator-(GridSymbol a, const GridSymbol& b) { return a -= b; }
  friend GridSymbol operator*(GridSymbol a, cplx s) { return a *= s; }
  friend GridSymbol operator*(cplx s, GridSymbol a) { return a *= s; }

  /// Pointwise product.
  friend GridSymbol pointwise(const GridSymbol& a, const GridSymbol& b) {
    require_same_grid(a.grid, b.grid);
    GridSymbol out(a.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    out.diag.merge(a.diag);
    out.diag.merge(b.diag);
    return out;
  }

  GridSymbol conj() const {
    GridSymbol out = *this;
    for (auto& z : out.values) z = std::conj(z);
    return out;
  }

  double sup() const {
    double m = 0.0;
    for (auto& z : values) m = std::max(m, std::abs(z));
    return m;
  }

  /// Trapezoid (= rectangle, periodic) quadrature of the samples.
  cplx integral() const {
    cplx acc = 0.0;
    for (auto& z : values) acc += z;
    return acc * grid.cell_volume();
  }

  /// Largest magnitude on the outermost layer of nodes, relative to the peak.
  double boundary_ratio() const {
    const double peak = sup();
    if (peak == 0.0) return 0.0;
    double edge = 0.0;
    std::vector<int> idx(grid.d);
    for (std::size_t i = 0; i < values.size(); ++i) {
      grid.unravel(i, idx.data());
      bool on_edge = false;
      for (int a : idx) on_edge = on_edge || a == 0 || a == grid.N - 1;
      if (on_edge) edge = std::max(edge, std::abs(values[i]));
    }
    return edge / peak;
  }
};

using Symbol = std::variant<GridSymbol, Polynomial, Gaussian>;

inline int dimension(const Symbol& f) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GridSymbol>)
          return s.grid.d;
        else
          return s.d();
      },
      f);
}

inline const char* variant_name(const Symbol& f) {
  switch (f.index()) {
    case 0: return "grid";
    case 1: return "polynomial";
    default: return "gaussian";
  }
}

/// Calls fn(x, flat) for every node, with x the coordinate vector.
template <class Fn>
void for_each_node(const PhaseGrid& grid, Fn&& fn) {
  const std::vector<double> axis = grid.axis();
  std::vector<int> idx(grid.d, 0);
  std::vector<double> x(grid.d, axis[0]);
  const std::size_t n = grid.size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    fn(x, flat);
    for (int a = grid.d - 1; a >= 0; --a) {
      if (++idx[a] < grid.N) {
        x[a] = axis[idx[a]];
        break;
      }
      idx[a] = 0;
      x[a] = axis[0];
    }
  }
}

/// Point evaluation of the closed-form variants.
template <class Vec>
cplx evaluate(const Symbol& f, const Vec& x) {
  if (auto* p = std::get_if<Polynomial>(&f)) return (*p)(x);
  if (auto* g = std::get_if<Gaussian>(&f)) return (*g)(x);
  throw RepresentationError("point evaluation of a grid symbol needs spectral interpolation");
}

/// Gaussians are flagged when their edge value exceeds this fraction of the peak.
inline constexpr double kGridWarnRatio = 1e-6;
inline constexpr double kGridAdequateRatio = 1e-14;

/// Pointwise evaluation of f at every node of `grid`.
inline GridSymbol sample(const Symbol& f, const PhaseGrid& grid) {
  if (dimension(f) != grid.d) throw GridMismatchError("symbol and grid dimensions differ");
  if (auto* gs = std::get_if<GridSymbol>(&f)) {
    require_same_grid(gs->grid, grid);
    return *gs;
  }
  GridSymbol out(grid);
  if (auto* p = std::get_if<Polynomial>(&f)) {
    for_each_node(grid, [&](const std::vector<double>& x, std::size_t i) { out.values[i] = (*p)(x); });
    out.diag.notes.push_back("polynomial symbol: no decay at the box edge");
    return out;
  }
  const Gaussian& g = std::get<Gaussian>(f);
  for_each_node(grid, [&](const std::vector<double>& x, std::size_t i) { out.values[i] = g(x); });
  const double ratio = std::exp(g.log_boundary_peak(grid.L) - g.log_peak());
  out.adequate = ratio < kGridAdequateRatio;
  if (ratio > kGridWarnRatio)
    out.diag.flag_grid_too_small("Gaussian edge/peak ratio " + std::to_string(ratio) + " at L=" +
                                 std::to_string(grid.L));
  return out;
}

/// sup |a - b| over the nodes.
inline double sup_diff(const GridSymbol& a, const GridSymbol& b) {
  require_same_grid(a.grid, b.grid);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

/// Complex conjugate of a symbol of any variant.
inline Symbol conj(const Symbol& f) {
  return std::visit([](const auto& s) -> Symbol { return s.conj(); }, f);
}

}  // namespace moyal
