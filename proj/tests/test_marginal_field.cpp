#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "symtomo/marginal_field.hpp"

using namespace symtomo;

namespace {

const MarginalField& ground_field() {
  static const MarginalField f = make_marginal_field(marginal_source(StateSpec::ground()));
  return f;
}

const MarginalField& cat_field() {
  static const MarginalField f = make_marginal_field(marginal_source(StateSpec::odd_cat(std::numbers::sqrt2, 0.0)));
  return f;
}

}  // namespace

TEST(MarginalField, DefaultGeometryAndDomain) {
  const auto& f = ground_field();
  EXPECT_EQ(f.mu_grid().size(), 65u);
  EXPECT_EQ(f.x_grid().size(), 257u);
  EXPECT_FALSE(f.in_domain(32, 32));  // origin
  EXPECT_FALSE(f.in_domain(32, 40));  // rho = 0.3125 < 0.9
  EXPECT_TRUE(f.in_domain(0, 0));
  EXPECT_EQ(f.valid_count(), f.domain_count());
  EXPECT_LT(f.domain_count(), 65u * 65u);
  EXPECT_LT(f.diagnostics.metrics.at("max_normalization_deviation"), 1e-6);
}

TEST(MarginalField, NodesHoldTheSource) {
  const auto& f = ground_field();
  const auto src = marginal_source(StateSpec::ground());
  for (auto [i, j] : {std::pair{0u, 0u}, std::pair{10u, 60u}, std::pair{50u, 20u}})
    for (std::size_t k : {0u, 100u, 128u, 200u})
      EXPECT_EQ(f.at(i, j, k), src(f.x_grid()[k], {f.mu_grid()[i], f.nu_grid()[j], 0.0}));
  for (double v : f.slice(32, 32)) EXPECT_EQ(v, 0.0);
}

TEST(MarginalField, OffNodeInterpolationAccuracy) {
  const auto& f = cat_field();
  const auto src = marginal_source(StateSpec::odd_cat(std::numbers::sqrt2, 0.0));
  double worst = 0.0;
  for (auto m : {TomographyParams{1.01, 0.37, 0.0}, TomographyParams{-0.93, 0.61, 0.2}, TomographyParams{0.2, -1.13, -0.4}})
    for (double X = -4.0; X <= 4.0; X += 0.173) worst = std::max(worst, std::abs(f(X, m) - src(X, m)));
  EXPECT_LT(worst, 2e-3);
}

TEST(MarginalField, RaysInsideTheDiskAndOutsideTheBoxUseScaling) {
  const auto& f = ground_field();
  const auto src = marginal_source(StateSpec::ground());
  for (auto m : {TomographyParams{0.1, 0.05, 0.0}, TomographyParams{3.0, -2.0, 0.5}, TomographyParams{0.0, 0.3, 0.0}})
    for (double X : {-1.0, -0.1, 0.0, 0.4, 2.0}) EXPECT_NEAR(f(X, m), src(X, m), 2e-3 / m.radius()) << m.mu << "," << m.nu;
}

TEST(MarginalField, ShiftIdentity) {
  const auto& f = ground_field();
  for (double delta : {-1.0, 0.5})
    EXPECT_EQ(f(0.3, {1.1, 0.2, delta}), f(0.3 - delta, {1.1, 0.2, 0.0}));
}

TEST(MarginalField, PositiveScalingIdentityHoldsThroughFallback) {
  const auto& f = cat_field();
  for (double lam : {0.5, 2.0})
    for (double X : {-1.0, 0.25, 1.5}) {
      const TomographyParams m{1.0, 0.45, 0.0};
      EXPECT_NEAR(f(lam * X, {lam * m.mu, lam * m.nu, 0.0}), f(X, m) / lam, 5e-3);
    }
}

TEST(MarginalField, SampleSliceAppliesScaleAndShift) {
  const auto& f = ground_field();
  std::vector<double> out(f.x_grid().size());
  f.sample_slice(1.1, -0.3, 1.0, 0.0, out);
  const auto src = marginal_source(StateSpec::ground());
  for (std::size_t k = 60; k < 200; k += 20) EXPECT_NEAR(out[k], src(f.x_grid()[k], {1.1, -0.3, 0.0}), 1e-3);
  f.sample_slice(1.1, -0.3, 0.5, 0.2, out);
  for (std::size_t k = 60; k < 200; k += 20)
    EXPECT_NEAR(out[k], src(0.5 * f.x_grid()[k] + 0.2, {1.1, -0.3, 0.0}), 1e-3);
  std::vector<double> wrong(3);
  EXPECT_THROW(f.sample_slice(1.0, 0.0, 1.0, 0.0, wrong), GridError);
}

TEST(MarginalField, ResolutionMask) {
  MarginalField f(FieldGrid{});
  EXPECT_TRUE(f.valid(0, 0));
  f.set_resolved(0, 0, false);
  EXPECT_FALSE(f.valid(0, 0));
  EXPECT_TRUE(f.in_domain(0, 0));
  EXPECT_EQ(f.valid_count() + 1, f.domain_count());
  EXPECT_FALSE(f.resolved_at(0.1, 0.1));
  EXPECT_FALSE(f.resolved_at(-1.25, -1.25));
  EXPECT_TRUE(f.resolved_at(1.25, 1.25));
}

TEST(MarginalField, RejectsBadGeometry) {
  EXPECT_THROW(MarginalField(FieldGrid{UniformGrid::symmetric(1, 3), UniformGrid::symmetric(1, 65), UniformGrid::symmetric(10, 257), 0.5}),
               GridError);
  EXPECT_THROW(MarginalField(FieldGrid{UniformGrid(0.1, 1, 65), UniformGrid::symmetric(1, 65), UniformGrid::symmetric(10, 257), 0.5}),
               GridError);
  EXPECT_THROW(MarginalField(FieldGrid{UniformGrid::symmetric(1.25, 65), UniformGrid::symmetric(1.25, 65), UniformGrid::symmetric(10, 257), 1.2}),
               GridError);
  EXPECT_THROW(ground_field()(0.0, {0.0, 0.0, 0.0}), DomainError);
}

TEST(MarginalField, PoorlyCoveredSlicesAreReported) {
  const FieldGrid narrow{UniformGrid::symmetric(1.25, 33), UniformGrid::symmetric(1.25, 33), UniformGrid::symmetric(1.5, 65), 0.9};
  const auto f = make_marginal_field(marginal_source(StateSpec::excited_first()), narrow);
  EXPECT_TRUE(f.diagnostics.flagged());
  EXPECT_GT(f.diagnostics.metrics.at("max_normalization_deviation"), 1e-4);
}

TEST(MarginalSlice, SamplingAndNormalization) {
  const auto s = sample_marginal_slice(marginal_source(StateSpec::coherent(1, -0.5)), {0.6, 0.8, 0.3}, default_x_grid());
  EXPECT_EQ(s.values.size(), 1024u);
  EXPECT_NEAR(s.normalization(), 1.0, 1e-12);
  EXPECT_GE(s.min_value(), 0.0);
  EXPECT_THROW(sample_marginal_slice(marginal_source(StateSpec::ground()), {0, 0, 0}, default_x_grid()), DomainError);
}
