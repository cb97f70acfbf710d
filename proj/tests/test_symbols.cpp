#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include <moyal/moyal.hpp>

using namespace moyal;

TEST(Theta, CanonicalUnit) {
  const ThetaMatrix t = make_theta(2, 1.0, true);
  EXPECT_EQ(t(0, 1), 1.0);
  EXPECT_EQ(t(1, 0), -1.0);
  EXPECT_EQ(t(0, 0), 0.0);
  EXPECT_EQ(t.det(), 1.0);
  EXPECT_EQ(t.inverse()(0, 1), -1.0);
  EXPECT_EQ(t.inverse()(1, 0), 1.0);
}

TEST(Theta, CanonicalDeterminant) {
  EXPECT_DOUBLE_EQ(make_theta(2, 0.5).det(), 0.25);
  EXPECT_DOUBLE_EQ(make_theta(4, 0.5).det(), 0.0625);
}

TEST(Theta, RejectsNonAntisymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, -1, 0.1;
  EXPECT_THROW(make_theta(m), ConstructionError);
}

TEST(Theta, SingularWithInverseRequested) {
  EXPECT_THROW(make_theta(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 2)), true), SingularThetaError);
  const ThetaMatrix z = make_theta(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 2)));
  EXPECT_TRUE(z.is_zero());
  EXPECT_FALSE(z.invertible());
  EXPECT_THROW(z.inverse(), SingularThetaError);
}

TEST(Theta, BridgeMapIsAnInvolution) {
  Eigen::MatrixXd m(4, 4);
  m << 0, 0.7, -0.2, 0.4,  //
      -0.7, 0, 1.1, 0.3,   //
      0.2, -1.1, 0, 0.9,   //
      -0.4, -0.3, -0.9, 0;
  const ThetaMatrix t = make_theta(m, true);
  EXPECT_GT(t.det(), 0.0);
  const ThetaMatrix back = t.bridged().bridged();
  EXPECT_LT((back.entries() - m).cwiseAbs().maxCoeff(), 1e-12);
  // canonical form goes through the shortcut
  const ThetaMatrix c = make_theta(2, 0.5, true).bridged();
  EXPECT_DOUBLE_EQ(c(0, 1), 8.0);
}

TEST(Grid, SpacingAndDual) {
  const PhaseGrid g(2, 8.0, 128);
  EXPECT_EQ(g.spacing() * g.N, 2.0 * g.L);
  EXPECT_DOUBLE_EQ(g.nyquist(), M_PI * 128 / 16.0);
  EXPECT_DOUBLE_EQ(g.dual().spacing(), M_PI / g.L);
  EXPECT_TRUE(g.dual().dual() == g);
  EXPECT_THROW(PhaseGrid(2, 8.0, 100), ConstructionError);
}

TEST(Sample, UnitGaussian) {
  const PhaseGrid g(2, 8.0, 64);
  const GridSymbol s = sample(Gaussian::isotropic(2, 1.0), g);
  EXPECT_NEAR(s.values[0].real(), std::exp(-128.0), 1e-70);  // corner (-8, -8)
  // the edge midpoint (-8, 0)
  EXPECT_NEAR(s.values[32].real() / std::exp(-64.0), 1.0, 1e-12);
  EXPECT_NEAR(std::exp(-64.0), 1.6e-28, 0.05e-28);
  EXPECT_TRUE(s.adequate);
  EXPECT_FALSE(s.diag.grid_too_small);
}

TEST(Sample, CoordinatePolynomial) {
  const PhaseGrid g(2, 3.0, 8);
  const GridSymbol s = sample(Polynomial::coordinate(2, 0), g);
  for_each_node(g, [&](const std::vector<double>& x, std::size_t i) { EXPECT_EQ(s.values[i], cplx(x[0])); });
}

TEST(Sample, WideGaussianIsFlagged) {
  const GridSymbol s = sample(Gaussian::isotropic(2, 0.01), PhaseGrid(2, 8.0, 32));
  EXPECT_TRUE(s.diag.grid_too_small);
  EXPECT_FALSE(s.adequate);
  EXPECT_EQ(s.size(), 32u * 32u);
}

TEST(Sample, Linear) {
  const PhaseGrid g(2, 8.0, 32);
  const Gaussian f = Gaussian::isotropic(2, 0.5, {1.0, 0.0});
  const Gaussian h = Gaussian::isotropic(2, 1.5, {0.0, -1.0});
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  const GridSymbol lhs = sample(f.scaled(a), g) + sample(h.scaled(b), g);
  const GridSymbol rhs = a * sample(f, g) + b * sample(h, g);
  EXPECT_LT(sup_diff(lhs, rhs), 1e-15);
}

TEST(Polynomial, EvaluateDeriveShift) {
  Polynomial p(2);
  p.add_term({2, 1}, 3.0);
  p.add_term({0, 0}, cplx(0.0, 1.0));
  const std::vector<double> x{1.5, -2.0};
  EXPECT_EQ(p(x), cplx(3.0 * 2.25 * -2.0, 1.0));
  EXPECT_EQ(p.derivative({1, 1})(x), cplx(6.0 * 1.5, 0.0));
  const std::vector<cplx> s{0.5, 1.0};
  EXPECT_LT(std::abs(p.shifted(s)(x) - p(std::vector<double>{2.0, -1.0})), 1e-13);
  EXPECT_EQ(p.degree(), 3);
}

TEST(Multiindex, ZeroToTheZero) {
  EXPECT_EQ(log_power_factor({0, 0}, 0.5), 0.0);
  EXPECT_NEAR(log_power_factor({2, 0}, 1.0), 2.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(multiindices_of_order(2, 3).size(), 4u);
  EXPECT_EQ(parse_multiindex_key("3,0,1"), (Multiindex{3, 0, 1}));
  EXPECT_THROW(parse_multiindex_key("1,x"), ConstructionError);
}

TEST(Gaussian, RejectsIndefinite) {
  CMat M(2, 2);
  M << 1.0, 0.0, 0.0, -0.5;
  EXPECT_THROW(Gaussian(M, CVec::Zero(2), 0.0), ConstructionError);
}

TEST(Serialization, PolynomialAndGaussianRoundTrip) {
  Polynomial p(2);
  p.add_term({1, 0}, cplx(1.0, -2.0));
  p.add_term({0, 3}, 0.25);
  const Symbol q = symbol_from_json(symbol_to_json(p));
  EXPECT_EQ(max_coeff_diff(std::get<Polynomial>(q), p), 0.0);
  const json pj = polynomial_to_json(p);
  EXPECT_TRUE(pj["coeffs"].contains("1,0"));

  CMat M(2, 2);
  M << cplx(1.0, 0.2), 0.1, 0.1, cplx(0.8, -0.3);
  CVec b(2);
  b << cplx(0.5, 0.1), -0.2;
  const Gaussian g(M, b, cplx(0.1, 0.4));
  const Gaussian g2 = std::get<Gaussian>(symbol_from_json(symbol_to_json(g)));
  EXPECT_EQ((g2.M() - g.M()).norm(), 0.0);
  EXPECT_EQ((g2.b() - g.b()).norm(), 0.0);
  EXPECT_EQ(g2.c(), g.c());
}

TEST(Serialization, IsotropicShorthand) {
  const json j = {{"type", "gaussian"}, {"s", 0.5}, {"center", {1.0, -1.0}}};
  const Gaussian g = gaussian_from_json(j);
  EXPECT_LT(std::abs(g(std::vector<double>{1.0, -1.0}) - 1.0), 1e-15);
  EXPECT_THROW(gaussian_from_json(json{{"type", "gaussian"}, {"s", -1.0}, {"d", 2}}), ConfigError);
}

TEST(Serialization, FunctionalsAndTheta) {
  const Functional u = Functional::plane_wave({1.0, -2.0}).scaled(cplx(0.0, 2.0));
  const Functional v = functional_from_json(functional_to_json(u));
  EXPECT_EQ(std::string(v.type_name()), "plane_wave");
  EXPECT_EQ(v.scale(), cplx(0.0, 2.0));
  EXPECT_THROW(functional_from_json(json{{"type", "nosuch"}}), ConfigError);

  const ThetaMatrix t = theta_from_json(json{{"d", 2}, {"theta0", 0.5}});
  const ThetaMatrix t2 = theta_from_json(theta_to_json(t));
  EXPECT_EQ((t.entries() - t2.entries()).norm(), 0.0);
  EXPECT_THROW(theta_from_json(json{{"entries", {{0.0, 1.0}, {-1.0, 0.1}}}}), ConfigError);
}

TEST(Serialization, BinaryGridLayout) {
  const PhaseGrid g(2, 4.0, 4);
  GridSymbol s(g);
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = cplx(double(i), -0.5 * i);
  std::stringstream buf;
  write_grid(buf, s);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 4u + 3 * 4 + 8 + 16 * 16);
  EXPECT_EQ(bytes.substr(0, 4), "MOYL");
  std::uint32_t version, d, N;
  double L;
  std::memcpy(&version, bytes.data() + 4, 4);
  std::memcpy(&d, bytes.data() + 8, 4);
  std::memcpy(&N, bytes.data() + 12, 4);
  std::memcpy(&L, bytes.data() + 16, 8);
  EXPECT_EQ(version, 1u);
  EXPECT_EQ(d, 2u);
  EXPECT_EQ(N, 4u);
  EXPECT_EQ(L, 4.0);
  double re5;
  std::memcpy(&re5, bytes.data() + 24 + 5 * 16, 8);
  EXPECT_EQ(re5, 5.0);
  const GridSymbol back = read_grid(buf);
  EXPECT_EQ(sup_diff(back, s), 0.0);

  std::stringstream bad("MOYX");
  EXPECT_THROW(read_grid(bad), ConfigError);
}
