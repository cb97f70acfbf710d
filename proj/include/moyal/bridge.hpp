#pragma once

#include <cmath>
#include <numbers>
#include <variant>

#include "moyal/functional.hpp"
#include "moyal/spectral.hpp"

namespace moyal {

using Operand = std::variant<Symbol, Functional>;

/// The star product rewritten as a twisted convolution at -4 theta^{-1}:
///
///   left:  u * g = (pi^d det theta)^{-1} u *^_{-4 theta^{-1}} F_theta g
///   right: g * u = (pi^d det theta)^{-1} conjF_theta g *^_{-4 theta^{-1}} u
///
/// g must be a Gaussian so that its symplectic transform is known in closed
/// form on `grid`.
inline GridSymbol star_via_twisted(const Operand& u, const Symbol& g, const ThetaMatrix& theta, Side side,
                                   const PhaseGrid& grid) {
  if (!theta.invertible()) throw SingularThetaError("the twisted-convolution bridge needs an invertible theta");
  if (!std::holds_alternative<Gaussian>(g))
    throw RepresentationError("the bridge needs a Gaussian partner (closed-form symplectic transform)");
  const ThetaMatrix bridge = theta.bridged();
  const double pref = 1.0 / (std::pow(std::numbers::pi, theta.d()) * theta.det());
  const Symbol tg = symplectic_fourier(g, theta, side == Side::left ? -1 : 1);
  GridSymbol out;
  if (auto* sym = std::get_if<Symbol>(&u)) {
    out = side == Side::left ? twisted_convolution(*sym, tg, bridge, grid) : twisted_convolution(tg, *sym, bridge, grid);
  } else {
    out = twisted_conv_functional(std::get<Functional>(u), tg, bridge, side, grid);
  }
  out *= pref;
  return out;
}

}  // namespace moyal
