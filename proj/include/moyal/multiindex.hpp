#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "moyal/errors.hpp"

namespace moyal {

using Multiindex = std::vector<int>;

inline int order(const Multiindex& n) { return std::accumulate(n.begin(), n.end(), 0); }

/// log of n^{s n} = s * sum_j n_j log n_j, with the factor for n_j = 0 equal to 1.
inline double log_power_factor(const Multiindex& n, double s) {
  double acc = 0.0;
  for (int k : n)
    if (k > 0) acc += k * std::log(static_cast<double>(k));
  return s * acc;
}

inline double log_factorial(const Multiindex& n) {
  double acc = 0.0;
  for (int k : n) acc += std::lgamma(k + 1.0);
  return acc;
}

/// All multiindices of dimension d with |n| = k, in lexicographic order.
inline std::vector<Multiindex> multiindices_of_order(int d, int k) {
  std::vector<Multiindex> out;
  Multiindex cur(d, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == d - 1) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  if (d <= 0) return out;
  rec(rec, 0, k);
  return out;
}

/// Multiindex key in the "n1,n2,..." form used by the JSON formats.
inline std::string multiindex_key(const Multiindex& n) {
  std::ostringstream os;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) os << ',';
    os << n[i];
  }
  return os.str();
}

inline Multiindex parse_multiindex_key(const std::string& key) {
  Multiindex n;
  std::stringstream ss(key);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (...) {
      throw ConstructionError("bad multiindex key '" + key + "'");
    }
    if (used != item.size() || v < 0) throw ConstructionError("bad multiindex key '" + key + "'");
    n.push_back(v);
  }
  if (n.empty()) throw ConstructionError("empty multiindex key");
  return n;
}

}  // namespace moyal
