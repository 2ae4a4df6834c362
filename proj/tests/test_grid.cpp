#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "symtomo/flow.hpp"
#include "symtomo/grid.hpp"

using namespace symtomo;

TEST(UniformGrid, EndpointsAreExact) {
  const UniformGrid g(-1.3, 2.9, 37);
  EXPECT_EQ(g[0], -1.3);
  EXPECT_EQ(g[36], 2.9);
  EXPECT_DOUBLE_EQ(g.spacing(), 4.2 / 36);
  EXPECT_EQ(g.nodes().size(), 37u);
  EXPECT_TRUE(g.contains(0.0));
  EXPECT_FALSE(g.contains(3.0));
}

TEST(UniformGrid, RebuiltGridHasIdenticalNodes) {
  const UniformGrid a = UniformGrid::symmetric(10.0, 257);
  const UniformGrid b(a.start(), a.stop(), a.size());
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(UniformGrid, SymmetricGridHasZeroAtCentreForOddCount) {
  const auto g = UniformGrid::symmetric(6.0, 241);
  EXPECT_EQ(g[120], 0.0);
  EXPECT_TRUE(g.symmetric_about_zero());
  EXPECT_FALSE(UniformGrid(0.0, 1.0, 5).symmetric_about_zero());
  EXPECT_DOUBLE_EQ(g.fractional_index(0.05), 121.0);
}

TEST(UniformGrid, RejectsBadDefinitions) {
  EXPECT_THROW(UniformGrid(0.0, 1.0, 1), GridError);
  EXPECT_THROW(UniformGrid(1.0, 0.0, 5), GridError);
  EXPECT_THROW(UniformGrid(0.0, 0.0, 5), GridError);
  EXPECT_THROW(UniformGrid(0.0, INFINITY, 5), GridError);
  EXPECT_THROW(UniformGrid(NAN, 1.0, 5), GridError);
}

TEST(Trapezoid, ExactForLinearAndAccurateForGaussians) {
  const UniformGrid g(0.0, 2.0, 11);
  std::vector<double> lin(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) lin[i] = 3.0 * g[i] + 1.0;
  EXPECT_NEAR(trapezoid(lin, g.spacing()), 8.0, 1e-14);

  const auto h = UniformGrid::symmetric(10.0, 201);
  std::vector<double> gauss(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) gauss[i] = std::exp(-h[i] * h[i]);
  EXPECT_NEAR(trapezoid(gauss, h.spacing()), std::sqrt(std::numbers::pi), 1e-14);
  EXPECT_EQ(trapezoid(std::vector<double>{}, 1.0), 0.0);
}

TEST(CubicInterpolation, WeightsSumToOne) {
  for (double t : {0.0, 0.25, 0.5, 0.9}) {
    const auto w = cubic_weights(t);
    EXPECT_NEAR(w[0] + w[1] + w[2] + w[3], 1.0, 1e-15);
  }
  const auto w0 = cubic_weights(0.0);
  EXPECT_EQ(w0[1], 1.0);
}

TEST(CubicInterpolation, ReproducesCubicsInTheInterior) {
  const UniformGrid g(-2.0, 3.0, 26);
  std::vector<double> v(g.size());
  auto f = [](double x) { return 0.5 * x * x * x - x * x + 2.0 * x - 1.0; };
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
  for (double x : {-1.77, -0.03, 0.5, 1.234, 2.6}) EXPECT_NEAR(cubic_interpolate(g, v, x), f(x), 1e-12);
  EXPECT_EQ(cubic_interpolate(g, v, 10.0), 0.0);
}

TEST(QuadraticFlow, ForwardAndBackwardAreInverse) {
  for (auto [c1, c2] : {std::pair{0.0, 0.0}, std::pair{0.0, 0.5}, std::pair{0.7, 0.0}, std::pair{-0.3, 1.2}, std::pair{0.4, -0.2}}) {
    const QuadraticFlow f(c1, c2, 1.3);
    const PhasePoint z{0.4, -1.1};
    const auto back = f.backward(f.forward(z));
    EXPECT_NEAR(back.q, z.q, 1e-13);
    EXPECT_NEAR(back.p, z.p, 1e-13);
    EXPECT_NEAR(f.c * f.c + f.k * f.s * f.s, 1.0, 1e-13);  // unit determinant
  }
}

TEST(QuadraticFlow, SolvesNewtonsEquation) {
  // q'' = -c1 - 2 c2 q, checked by central differences along the trajectory
  const double c1 = 0.6, c2 = 0.35, h = 1e-4;
  const PhasePoint z{0.8, -0.2};
  for (double t : {0.3, 1.1, 2.5}) {
    const double qm = QuadraticFlow(c1, c2, t - h).forward(z).q;
    const double q0 = QuadraticFlow(c1, c2, t).forward(z).q;
    const double qp = QuadraticFlow(c1, c2, t + h).forward(z).q;
    EXPECT_NEAR((qp - 2 * q0 + qm) / (h * h), -c1 - 2 * c2 * q0, 1e-5);
    EXPECT_NEAR((qp - qm) / (2 * h), QuadraticFlow(c1, c2, t).forward(z).p, 1e-7);
  }
}

TEST(QuadraticFlow, LinearForceLimitIsContinuous) {
  // the (1 - C)/k branch switch near k t^2 = 1e-6
  const PhasePoint z{0.1, 0.2};
  const auto a = QuadraticFlow(0.5, 1e-9, 1.0).forward(z);
  const auto b = QuadraticFlow(0.5, 0.0, 1.0).forward(z);
  EXPECT_NEAR(a.q, b.q, 1e-8);
  EXPECT_NEAR(b.q, 0.1 + 0.2 - 0.25, 1e-15);
}

TEST(QuadraticFlow, HeisenbergDirectionMatchesForwardFlow) {
  // mu q(t) + nu p(t) + delta == mu' q + nu' p + delta'
  const QuadraticFlow f(0.3, 0.5, 0.9);
  const TomographyParams m{0.7, -1.2, 0.4};
  const auto h = f.heisenberg(m);
  for (auto z : {PhasePoint{0.0, 0.0}, PhasePoint{1.0, -0.5}, PhasePoint{-2.0, 0.3}}) {
    const auto zt = f.forward(z);
    EXPECT_NEAR(m.mu * zt.q + m.nu * zt.p + m.delta, h.mu * z.q + h.nu * z.p + h.delta, 1e-13);
  }
}

TEST(Types, ParseDynamicsAndDirections) {
  EXPECT_EQ(parse_dynamics("harmonic"), DynamicsKind::Harmonic);
  EXPECT_THROW(parse_dynamics("damped"), DomainError);
  EXPECT_THROW((TomographyParams{0, 0, 0}).require_direction(), DomainError);
  EXPECT_THROW((TomographyParams{1, NAN, 0}).require_direction(), DomainError);
  const auto r = TomographyParams::rotated(std::numbers::pi / 2);
  EXPECT_NEAR(r.radius(), 1.0, 1e-15);
}
