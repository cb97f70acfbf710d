#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "moyal/errors.hpp"
#include "moyal/functional.hpp"
#include "moyal/gsanalysis.hpp"
#include "moyal/symbol.hpp"
#include "moyal/theta.hpp"

namespace moyal {

using json = nlohmann::json;

// Complex numbers are written as [re, im]; a plain number is accepted on input.
inline json to_json_complex(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(where + ": expected a number or [re, im]");
}

inline std::vector<double> vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> v;
  for (auto& x : j) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

inline json polynomial_to_json(const Polynomial& p) {
  json coeffs = json::object();
  for (auto& [n, c] : p.terms()) coeffs[multiindex_key(n)] = to_json_complex(c);
  return {{"type", "polynomial"}, {"d", p.d()}, {"coeffs", coeffs}};
}

inline Polynomial polynomial_from_json(const json& j, const std::string& where = "polynomial") {
  if (!j.contains("coeffs") || !j["coeffs"].is_object()) throw ConfigError(where + ": missing object field 'coeffs'");
  int d = j.value("d", -1);
  Polynomial p;
  bool init = false;
  for (auto& [key, val] : j["coeffs"].items()) {
    Multiindex n;
    try {
      n = parse_multiindex_key(key);
    } catch (const ConstructionError& e) {
      throw ConfigError(where + ".coeffs: " + e.what());
    }
    if (d < 0) d = static_cast<int>(n.size());
    if (!init) {
      p = Polynomial(d);
      init = true;
    }
    if (static_cast<int>(n.size()) != d) throw ConfigError(where + ".coeffs: key '" + key + "' has the wrong length");
    p.add_term(n, complex_from_json(val, where + ".coeffs." + key));
  }
  if (!init) {
    if (d < 1) throw ConfigError(where + ": empty polynomial needs field 'd'");
    p = Polynomial(d);
  }
  return p;
}

inline json gaussian_to_json(const Gaussian& g) {
  json M = json::array();
  for (int i = 0; i < g.d(); ++i) {
    json row = json::array();
    for (int j = 0; j < g.d(); ++j) row.push_back(to_json_complex(g.M()(i, j)));
    M.push_back(row);
  }
  json b = json::array();
  for (int i = 0; i < g.d(); ++i) b.push_back(to_json_complex(g.b()(i)));
  return {{"type", "gaussian"}, {"M", M}, {"b", b}, {"c", to_json_complex(g.c())}};
}

/// Either {"M", "b", "c"} or the isotropic shorthand {"d", "s", "center", "amplitude"}.
inline Gaussian gaussian_from_json(const json& j, const std::string& where = "gaussian") {
  if (!j.contains("M") && j.contains("s")) {
    if (!j["s"].is_number()) throw ConfigError(where + ".s: expected a number");
    std::vector<double> center = j.contains("center") ? vector_from_json(j["center"], where + ".center") : std::vector<double>{};
    const int d = j.contains("d") ? j["d"].get<int>() : static_cast<int>(center.size());
    if (d < 1) throw ConfigError(where + ": isotropic form needs 'd' or 'center'");
    if (!center.empty() && static_cast<int>(center.size()) != d) throw ConfigError(where + ".center: wrong length");
    const cplx amp = j.contains("amplitude") ? complex_from_json(j["amplitude"], where + ".amplitude") : cplx(1.0);
    try {
      return Gaussian::isotropic(d, j["s"].get<double>(), center, amp);
    } catch (const ConstructionError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (!j.contains("M") || !j["M"].is_array()) throw ConfigError(where + ": missing array field 'M'");
  const int d = static_cast<int>(j["M"].size());
  if (d < 1) throw ConfigError(where + ".M: empty matrix");
  CMat M(d, d);
  for (int i = 0; i < d; ++i) {
    const json& row = j["M"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != d) throw ConfigError(where + ".M: not square");
    for (int k = 0; k < d; ++k) M(i, k) = complex_from_json(row[k], where + ".M");
  }
  CVec b = CVec::Zero(d);
  if (j.contains("b")) {
    if (!j["b"].is_array() || static_cast<int>(j["b"].size()) != d) throw ConfigError(where + ".b: wrong length");
    for (int i = 0; i < d; ++i) b(i) = complex_from_json(j["b"][i], where + ".b");
  }
  const cplx c = j.contains("c") ? complex_from_json(j["c"], where + ".c") : cplx(0.0);
  try {
    return Gaussian(M, b, c);
  } catch (const ConstructionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

/// Closed-form symbols only; grid symbols use the binary format.
inline json symbol_to_json(const Symbol& f) {
  if (auto* p = std::get_if<Polynomial>(&f)) return polynomial_to_json(*p);
  if (auto* g = std::get_if<Gaussian>(&f)) return gaussian_to_json(*g);
  throw RepresentationError("grid symbols are serialized in the binary format");
}

inline Symbol symbol_from_json(const json& j, const std::string& where = "symbol") {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError(where + ": missing string field 'type'");
  const std::string t = j["type"];
  if (t == "polynomial") return polynomial_from_json(j, where);
  if (t == "gaussian") return gaussian_from_json(j, where);
  throw ConfigError(where + ".type: unknown symbol type '" + t + "'");
}

inline json functional_to_json(const Functional& u) {
  json j = {{"type", u.type_name()}, {"d", u.d()}, {"scale", to_json_complex(u.scale())}};
  if (auto* dl = std::get_if<Delta>(&u.kind())) j["xi"] = dl->xi;
  if (auto* pw = std::get_if<PlaneWave>(&u.kind())) j["k"] = pw->k;
  if (auto* pg = std::get_if<PolyGaussianDensity>(&u.kind())) {
    j["p"] = polynomial_to_json(pg->p);
    j["G"] = gaussian_to_json(pg->G);
  }
  return j;
}

inline Functional functional_from_json(const json& j, const std::string& where = "functional") {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ConfigError(where + ": missing string field 'type'");
  const std::string t = j["type"];
  const cplx scale = j.contains("scale") ? complex_from_json(j["scale"], where + ".scale") : cplx(1.0);
  try {
    if (t == "delta") {
      auto xi = vector_from_json(j.at("xi"), where + ".xi");
      return Functional::delta(xi).scaled(scale);
    }
    if (t == "plane_wave") {
      auto k = vector_from_json(j.at("k"), where + ".k");
      return Functional::plane_wave(k).scaled(scale);
    }
    if (t == "one") {
      if (!j.contains("d") || !j["d"].is_number_integer()) throw ConfigError(where + ": 'one' needs integer field 'd'");
      return Functional::one(j["d"].get<int>()).scaled(scale);
    }
    if (t == "poly_gaussian")
      return Functional::poly_gaussian(polynomial_from_json(j.at("p"), where + ".p"),
                                       gaussian_from_json(j.at("G"), where + ".G"))
          .scaled(scale);
  } catch (const json::out_of_range&) {
    throw ConfigError(where + ": missing field for type '" + t + "'");
  } catch (const ConstructionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ".type: unknown functional type '" + t + "'");
}

inline json theta_to_json(const ThetaMatrix& t) {
  json rows = json::array();
  for (int i = 0; i < t.d(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.d(); ++j) row.push_back(t(i, j));
    rows.push_back(row);
  }
  return {{"entries", rows}};
}

/// {"d": 2, "theta0": 1.0} or {"entries": [[...], ...]}.
inline ThetaMatrix theta_from_json(const json& j, const std::string& where = "theta") {
  try {
    if (j.contains("entries")) {
      const json& rows = j["entries"];
      if (!rows.is_array()) throw ConfigError(where + ".entries: expected an array");
      const int d = static_cast<int>(rows.size());
      Eigen::MatrixXd m(d, d);
      for (int i = 0; i < d; ++i) {
        auto row = vector_from_json(rows[i], where + ".entries");
        if (static_cast<int>(row.size()) != d) throw ConfigError(where + ".entries: not square");
        for (int k = 0; k < d; ++k) m(i, k) = row[k];
      }
      return make_theta(m);
    }
    if (!j.contains("theta0") || !j["theta0"].is_number()) throw ConfigError(where + ": missing number field 'theta0'");
    const int d = j.value("d", 2);
    return make_theta(d, j["theta0"].get<double>());
  } catch (const ConstructionError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline json norm_to_json(const NormEstimate& est, const GSParams& p) {
  return {{"params",
           {{"alpha", p.alpha}, {"beta", p.beta}, {"A", p.A}, {"B", p.B}, {"weight_sign", p.weight_sign}}},
          {"n_max", est.n_max},
          {"per_order", est.per_order},
          {"value", est.value},
          {"saturated", est.saturated}};
}

// ---------------------------------------------------------------------------
// binary grid format: "MOYL", u32 version, u32 d, u32 N, f64 L, then N^d
// complex128 values in row-major order, all little-endian

inline constexpr std::uint32_t kGridFormatVersion = 1;

namespace detail {

static_assert(std::endian::native == std::endian::little, "the binary grid format assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("truncated grid file");
  return v;
}

}  // namespace detail

inline void write_grid(std::ostream& os, const GridSymbol& g) {
  os.write("MOYL", 4);
  detail::put<std::uint32_t>(os, kGridFormatVersion);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.grid.d));
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.grid.N));
  detail::put<double>(os, g.grid.L);
  for (auto& z : g.values) {
    detail::put<double>(os, z.real());
    detail::put<double>(os, z.imag());
  }
}

inline GridSymbol read_grid(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "MOYL", 4) != 0) throw ConfigError("not a MOYL grid file");
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kGridFormatVersion) throw ConfigError("unsupported grid format version " + std::to_string(version));
  const int d = static_cast<int>(detail::get<std::uint32_t>(is));
  const int N = static_cast<int>(detail::get<std::uint32_t>(is));
  const double L = detail::get<double>(is);
  PhaseGrid grid;
  try {
    grid = PhaseGrid(d, L, N);
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("grid header: ") + e.what());
  }
  std::vector<cplx> v(grid.size());
  for (auto& z : v) {
    const double re = detail::get<double>(is);
    const double im = detail::get<double>(is);
    z = {re, im};
  }
  return GridSymbol(grid, std::move(v));
}

inline void save_grid(const std::string& path, const GridSymbol& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_grid(os, g);
}

inline GridSymbol load_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return read_grid(is);
}

}  // namespace moyal
