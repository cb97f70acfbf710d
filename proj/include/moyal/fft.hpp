#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "moyal/errors.hpp"
#include "moyal/grid.hpp"

namespace moyal::detail {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per shape under a lock and then shared.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int d, int N, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_tuple(d, N, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<int> dims(d, N);
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(N);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(d, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p) throw NumericalError("FFTW could not create a plan");
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// In-place unnormalized DFT: sum_j a_j e^{sign 2 pi i jk/N} per axis.
inline void dft_inplace(std::vector<std::complex<double>>& a, int d, int N, int sign) {
  fftw_plan p = PlanCache::instance().get(d, N, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(p, ptr, ptr);
}

/// (-1)^{sum of indices} for each flat index of an N^d array.
inline std::vector<signed char> checkerboard(int d, int N) {
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(N);
  std::vector<signed char> s(total);
  std::vector<int> idx(d, 0);
  int parity = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    s[flat] = parity ? -1 : 1;
    for (int a = d - 1; a >= 0; --a) {
      parity ^= 1;
      if (++idx[a] < N) break;
      // N-1 -> 0 is an odd step, so the flip above is already right
      idx[a] = 0;
    }
  }
  return s;
}

/// Centered transform between a grid and its dual (see PhaseGrid).
///
/// forward: F_k = h^d sum_j f_j e^{-i p_k x_j}
/// inverse: f_j = (2 pi)^{-d} (pi/L)^d sum_k F_k e^{+i p_k x_j}
/// `grid` is the grid the input lives on; the output lives on grid.dual().
inline std::vector<std::complex<double>> centered_transform(const std::vector<std::complex<double>>& in,
                                                            const PhaseGrid& grid, bool forward) {
  const int d = grid.d;
  const int N = grid.N;
  const auto cb = checkerboard(d, N);
  std::vector<std::complex<double>> a(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) a[i] = in[i] * static_cast<double>(cb[i]);
  dft_inplace(a, d, N, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  // e^{-/+ i pi N/2} per axis
  const double axis_sign = ((N / 2) % 2 == 0) ? 1.0 : -1.0;
  double scale = forward ? grid.cell_volume() : std::pow(grid.spacing() / (2.0 * std::numbers::pi), d);
  for (int k = 0; k < d; ++k) scale *= axis_sign;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= scale * static_cast<double>(cb[i]);
  return a;
}

}  // namespace moyal::detail
