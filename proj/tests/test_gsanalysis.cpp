#include <cmath>

#include <gtest/gtest.h>

#include <moyal/moyal.hpp>

using namespace moyal;

namespace {

Gaussian unit1d(double s = 1.0) { return Gaussian::isotropic(1, s); }

}  // namespace

TEST(GSParams, NontrivialityGuard) {
  EXPECT_NO_THROW(GSParams(0.5, 0.5, 1.0, 1.0));
  EXPECT_NO_THROW(GSParams(1.0, 0.5, 1.0, 1.0));
  EXPECT_THROW(GSParams(0.4, 0.5, 1.0, 1.0), ConstructionError);
  EXPECT_THROW(GSParams(1.0, 0.0, 1.0, 1.0), ConstructionError);
  EXPECT_THROW(GSParams(0.5, 0.5, 0.0, 1.0), ConstructionError);
}

TEST(GSNorm, OrderZeroOfUnitGaussian) {
  const PhaseGrid g(1, 8.0, 256);
  const NormEstimate e = gs_norm(unit1d(), GSParams(0.5, 0.5, 1.0, 1.0), 0, g);
  ASSERT_EQ(e.per_order.size(), 1u);
  // e^{-x^2} e^{x^2} = 1 everywhere
  EXPECT_NEAR(e.per_order[0], 1.0, 1e-10);
  EXPECT_EQ(e.value, e.per_order[0]);
}

TEST(GSNorm, Homogeneous) {
  const PhaseGrid g(2, 8.0, 64);
  const GSParams p(0.5, 0.5, 2.0, 1.5);
  const Gaussian f = Gaussian::isotropic(2, 0.8, {0.3, -0.2});
  const cplx lam(-2.5, 1.0);
  const double a = gs_norm(f, p, 6, g).value;
  const double b = gs_norm(f.scaled(lam), p, 6, g).value;
  EXPECT_NEAR(b, std::abs(lam) * a, 1e-13 * b);
}

TEST(GSNorm, MonotoneInAAndB) {
  const PhaseGrid g(2, 8.0, 64);
  const Gaussian f = Gaussian::isotropic(2, 0.8, {0.3, -0.2});
  const double base = gs_norm(f, GSParams(0.5, 0.5, 2.0, 1.0), 6, g).value;
  EXPECT_LE(gs_norm(f, GSParams(0.5, 0.5, 3.0, 1.0), 6, g).value, base);
  EXPECT_LE(gs_norm(f, GSParams(0.5, 0.5, 2.0, 2.0), 6, g).value, base);
}

TEST(GSNorm, StableUnderRefinement) {
  const GSParams p(0.5, 0.5, 1.0, 1.0);
  for (double s : {1.0, 1.5}) {
    const Gaussian f = Gaussian::isotropic(2, s);
    const double a = gs_norm(f, p, 8, PhaseGrid(2, 8.0, 128)).value;
    const double b = gs_norm(f, p, 8, PhaseGrid(2, 8.0, 256)).value;
    EXPECT_LT(std::abs(a - b) / b, 1e-6) << s;
  }
}

TEST(GSNorm, SpectralOrderLimit) {
  const PhaseGrid g(2, 8.0, 32);
  EXPECT_THROW(gs_norm(Gaussian::isotropic(2, 1.0), GSParams(), 9, g), SpectralOrderError);
}

TEST(GSNorm, MultiplierWeightOnGrid) {
  // weight e^{-|x|^2}: the sup of e^{-x^2} e^{-x^2} is 1 at the origin
  const PhaseGrid g(1, 8.0, 256);
  const NormEstimate e = gs_norm(sample(unit1d(), g), GSParams(0.5, 0.5, 1.0, 1.0, -1), 0, g);
  EXPECT_NEAR(e.value, 1.0, 1e-14);
}

TEST(DecayNorm, Examples) {
  const PhaseGrid g(1, 8.0, 256);
  EXPECT_NEAR(decay_norm(unit1d(), 1.0, 0, 0, g).value, 1.0, 1e-14);
  // (1 + x) e^{-x^2} peaks where 1 - 2x(1 + x) = 0
  const double xs = (-1.0 + std::sqrt(3.0)) / 2.0;
  const double peak = (1.0 + xs) * std::exp(-xs * xs);
  const NormEstimate e1 = decay_norm(unit1d(), 1.0, 1, 0, g);
  EXPECT_LE(e1.value, peak * (1.0 + 1e-12));
  EXPECT_GT(e1.value, peak * (1.0 - 2e-3));
  double prev = 0.0;
  for (int N = 0; N <= 4; ++N) {
    const NormEstimate e = decay_norm(unit1d(), 1.0, N, 6, g);
    EXPECT_TRUE(std::isfinite(e.value));
    EXPECT_FALSE(e.saturated);
    EXPECT_GE(e.value, prev);
    prev = e.value;
  }
}

TEST(WeightedDerivative, RealWithoutSqrt2) {
  const PhaseGrid g(1, 8.0, 256);
  const LemmaA1Result r = lemma_A1_check(unit1d(), {1}, {2}, g, 1.0);
  EXPECT_TRUE(r.holds) << r.lhs << " " << r.rhs;
  // lhs = int 2|x| e^{-x^2} = 2, rhs = int x^2 2|x| e^{-x^2} = 2
  EXPECT_NEAR(r.lhs, 2.0, 1e-6);
}

TEST(WeightedDerivative, ComplexWithSqrt2) {
  const PhaseGrid g(1, 8.0, 256);
  // e^{-x^2} (1 + ix) = e^{-x^2 + log(1 + ix)} is not a Gaussian; use its samples
  GridSymbol f(g);
  for_each_node(g, [&](const std::vector<double>& x, std::size_t i) {
    f.values[i] = std::exp(-x[0] * x[0]) * cplx(1.0, x[0]);
  });
  for (int k = 0; k <= 3; ++k)
    for (int n = 0; n <= 3; ++n) EXPECT_TRUE(lemma_A1_check(f, {k}, {n}, g).holds) << k << " " << n;
}

TEST(WeightedDerivative, DegenerateOrders) {
  const PhaseGrid g(2, 8.0, 64);
  const Gaussian f = Gaussian::isotropic(2, 0.9, {0.4, 0.1});
  const LemmaA1Result r = lemma_A1_check(f, {0, 0}, {0, 0}, g);
  EXPECT_NEAR(r.lhs, r.rhs / std::sqrt(2.0), 1e-12 * r.lhs);
  EXPECT_NEAR(r.lhs, M_PI / 0.9, 1e-8);
}

TEST(WeightedDerivative, BoundaryMassFlagged) {
  const PhaseGrid g(1, 4.0, 64);
  const LemmaA1Result r = lemma_A1_check(unit1d(0.2), {1}, {1}, g);
  EXPECT_TRUE(r.diag.grid_too_small);
}

TEST(FourierBound, ConstantAndDegenerate) {
  const GSParams p(0.5, 0.5, 1.0, 1.0);
  const double r = fourier_bound_r(p, 2);
  EXPECT_GT(r, 2.0 * std::pow(M_E / 0.5, 0.5));
  EXPECT_NEAR(r, 1.01 * 2.0 * std::sqrt(2.0 * M_E), 1e-12);
  const PhaseGrid g(2, 8.0, 64);
  EXPECT_THROW(fourier_bound_check(GridSymbol(g), p, 4, g, g.dual()), DegenerateInputError);
  const FourierBoundResult fb = fourier_bound_check(Gaussian::isotropic(2, 1.0), p, 6, g, g);
  EXPECT_TRUE(std::isfinite(fb.ratio));
  EXPECT_GT(fb.ratio, 0.0);
  EXPECT_EQ(fb.r_used, r);
}

TEST(EntireCoeff, ExpOfSquare) {
  // e^{eps z^2}: c_{2m} = eps^m / m!
  const double eps = 0.3;
  std::map<Multiindex, cplx> c;
  for (int m = 0; m <= 30; ++m) c[{2 * m}] = std::exp(m * std::log(eps) - std::lgamma(m + 1.0));
  const EntireCoeffResult r = entire_coeff_check(c);
  EXPECT_TRUE(r.satisfies);
  // Stirling: |c_{2m}| (2m)^{m} ~ (2 eps e)^m up to slowly varying factors
  EXPECT_NEAR(r.b_fit / (2.0 * eps * M_E), 1.0, 0.1);
}

TEST(EntireCoeff, FinitePolynomialAndFactorial) {
  std::map<Multiindex, cplx> poly{{{0, 0}, 1.0}, {{1, 2}, 3.0}, {{4, 0}, -2.0}};
  EXPECT_TRUE(entire_coeff_check(poly).satisfies);
  std::map<Multiindex, cplx> fact;
  for (int n = 0; n <= 20; ++n) fact[{n}] = std::tgamma(n + 1.0);
  EXPECT_FALSE(entire_coeff_check(fact).satisfies);
  EXPECT_THROW(entire_coeff_check({}), DegenerateInputError);
}

TEST(Truncation, GeometricTail) {
  // 0.5^{M+1} / 0.5 <= 1e-8  <=>  0.5^M <= 1e-8  <=>  M >= 26.58
  const double B = 0.5 / std::sqrt(2.0);
  EXPECT_EQ(truncation_order(B, 1.0, 1.0, 1e-8), 27);
  EXPECT_EQ(truncation_order(B, 1.0, 1.0, 2.0), 0);
  EXPECT_THROW(truncation_order(1.0 / std::sqrt(2.0), 1.0, 1.0, 1e-8), DivergentSeriesError);
  // monotone: nonincreasing in tol, nondecreasing in q
  int prev = 1000;
  for (double tol : {1e-12, 1e-9, 1e-6, 1e-3}) {
    const int M = truncation_order(B, 1.0, 1.0, tol);
    EXPECT_LE(M, prev);
    prev = M;
  }
  EXPECT_LE(truncation_order(0.2, 1.0, 1.0, 1e-8), truncation_order(0.4, 1.0, 1.0, 1e-8));
}

TEST(GrowthFit, GaussianDerivatives) {
  const PhaseGrid g(2, 8.0, 128);
  const GrowthFit fit = derivative_growth_fit(Gaussian::isotropic(2, 0.5), 20, g);
  EXPECT_GT(fit.B, 0.0);
  EXPECT_TRUE(std::isfinite(fit.C));
  // the fitted envelope bounds every order
  const NormEstimate e = decay_norm(Gaussian::isotropic(2, 0.5), fit.B, 0, 20, g);
  EXPECT_LE(e.value, fit.C * (1.0 + 1e-12));
}
