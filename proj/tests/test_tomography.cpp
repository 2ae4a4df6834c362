#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "oracles.hpp"
#include "symtomo/tomography.hpp"

using namespace symtomo;
using std::numbers::pi;

namespace {

const StateSpec kStates[] = {StateSpec::ground(), StateSpec::excited_first(), StateSpec::coherent(1.0, -0.5),
                             StateSpec::odd_cat(std::numbers::sqrt2, 0.0)};

}  // namespace

TEST(Radon, MatchesClosedFormMarginals) {
  const auto xg = UniformGrid::symmetric(6.0, 61);
  for (const auto& s : kStates)
    for (auto m : {TomographyParams{1, 0, 0}, TomographyParams{0, 1, 0}, TomographyParams{0.3, -1.7, 0.6},
                   TomographyParams{-1.9, -0.4, -1.0}}) {
      const auto slice = radon_marginal(wigner_source(s), m, xg);
      for (std::size_t k = 0; k < xg.size(); ++k)
        EXPECT_NEAR(slice.values[k], marginal_eval(s, m, xg[k]), 1e-6) << s.label();
    }
}

TEST(Radon, ExcitedStateMarginalIsPositiveWhileWignerIsNot) {
  const auto s = StateSpec::excited_first();
  const auto slice = radon_marginal(wigner_source(s), TomographyParams::rotated(0.7), UniformGrid::symmetric(6, 241));
  EXPECT_GE(slice.min_value(), -1e-9);
  EXPECT_LT(wigner_eval(s, {0, 0}), 0.0);
}

TEST(Radon, GridBackedWignerWithinBilinearAccuracy) {
  const auto s = StateSpec::odd_cat(std::numbers::sqrt2, 0.0);
  const WignerField w = sample_wigner_field(s, default_phase_grid(), default_phase_grid());
  const auto xg = UniformGrid::symmetric(5.0, 51);
  for (auto m : {TomographyParams{1, 0, 0}, TomographyParams{0.6, 0.8, 0.0}}) {
    const auto slice = radon_marginal(w, m, xg);
    for (std::size_t k = 0; k < xg.size(); ++k) EXPECT_NEAR(slice.values[k], marginal_eval(s, m, xg[k]), 2e-3);
  }
}

TEST(Radon, ScalingIdentity) {
  const auto w = wigner_source(StateSpec::coherent(1.0, -0.5));
  const TomographyParams m{0.6, -0.8, 0.4};
  for (double lam : {0.5, 2.0, -1.0})
    for (double X : {-1.0, 0.0, 0.9})
      EXPECT_NEAR(radon_point(w, {lam * m.mu, lam * m.nu, lam * m.delta}, lam * X), radon_point(w, m, X) / std::abs(lam),
                  1e-8);
}

TEST(Radon, LinearInTheWignerFunction) {
  const auto a = wigner_source(StateSpec::ground());
  const auto b = wigner_source(StateSpec::excited_first());
  auto mix = [&](double q, double p) { return 0.3 * a(q, p) + 0.7 * b(q, p); };
  const TomographyParams m{0.5, 1.1, 0.0};
  for (double X : {-1.0, 0.4})
    EXPECT_NEAR(radon_point(mix, m, X), 0.3 * radon_point(a, m, X) + 0.7 * radon_point(b, m, X), 1e-12);
}

TEST(Radon, UncoveredXGridIsReported) {
  const auto slice = radon_marginal(wigner_source(StateSpec::ground()), {1, 0, 0}, UniformGrid::symmetric(0.5, 11));
  EXPECT_TRUE(slice.diagnostics.flagged());
  EXPECT_THROW(radon_marginal(wigner_source(StateSpec::ground()), {0, 0, 0}, UniformGrid::symmetric(1, 11)), DomainError);
}

TEST(Characteristic, GroundStateGaussianAndSymmetries) {
  const auto ab = UniformGrid::symmetric(6.0, 25);
  const auto chi = characteristic_from_marginal(marginal_source(StateSpec::ground()), ab, ab);
  for (std::size_t i = 0; i < ab.size(); ++i)
    for (std::size_t j = 0; j < ab.size(); ++j)
      EXPECT_NEAR(std::abs(chi.at(i, j) - std::exp(-(ab[i] * ab[i] + ab[j] * ab[j]) / 4.0)), 0.0, 1e-5);
  EXPECT_EQ(chi.at(12, 12), std::complex<double>(1.0, 0.0));
}

TEST(Characteristic, ConjugateSymmetryWithoutMirroring) {
  // an asymmetric grid disables the mirror shortcut, so both halves are integrated
  const UniformGrid a(-3.0, 3.0, 13), b(-3.0, 3.5, 14);
  const auto chi = characteristic_from_marginal(marginal_source(StateSpec::coherent(1.0, -0.5)), a, b);
  for (std::size_t i = 0; i < 13; ++i)
    for (std::size_t j = 0; j + 1 < 14; ++j) {
      const auto mi = 12 - i, mj = 12 - j;
      EXPECT_NEAR(std::abs(chi.at(mi, mj) - std::conj(chi.at(i, j))), 0.0, 1e-8);
    }
}

TEST(Characteristic, RejectsUnnormalizedInput) {
  auto doubled = [](double X, const TomographyParams& m) { return 2.0 * marginal_eval(StateSpec::ground(), m, X); };
  EXPECT_THROW(characteristic_at(doubled, 1.0, 0.5), DomainError);
}

TEST(Inversion, EvaluatorRoundtripIsExactToQuadrature) {
  const auto ab = UniformGrid::symmetric(12.0, 49), out = UniformGrid::symmetric(4.0, 129);
  for (const auto& s : {StateSpec::ground(), StateSpec::excited_first(), StateSpec::coherent(1.0, -0.5)}) {
    const auto chi = characteristic_from_marginal(radon_source(wigner_source(s), RadonConfig{0.05, 12.0}), ab, ab);
    const auto w = wigner_from_characteristic(chi, out, out);
    double worst = 0.0;
    for (std::size_t i = 0; i < out.size(); i += 4)
      for (std::size_t j = 0; j < out.size(); j += 4)
        worst = std::max(worst, std::abs(w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                         wigner_eval(s, {out[i], out[j]})));
    EXPECT_LT(worst, 1e-9) << s.label();
    EXPECT_FALSE(w.diagnostics.flagged());
  }
}

TEST(Inversion, FromSampledMarginalField) {
  const auto s = StateSpec::excited_first();
  const auto field = make_marginal_field(marginal_source(s));
  const auto ab = UniformGrid::symmetric(12.0, 49), out = UniformGrid::symmetric(4.0, 129);
  const auto w = wigner_from_characteristic(characteristic_from_marginal(field, ab, ab), out, out);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < out.size(); ++j)
      worst = std::max(worst, std::abs(w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                       wigner_eval(s, {out[i], out[j]})));
  EXPECT_LT(worst, 1e-4);
  EXPECT_NEAR(w.values(64, 64), -2.0, 1e-2);
}

TEST(Inversion, AliasedOutputGridIsRejected) {
  const auto ab = UniformGrid::symmetric(12.0, 49);  // pi/da = 6.28
  const auto chi = characteristic_from_marginal(marginal_source(StateSpec::ground()), ab, ab);
  EXPECT_THROW(wigner_from_characteristic(chi, UniformGrid::symmetric(7, 15), UniformGrid::symmetric(4, 15)), GridError);
}

TEST(Inversion, TruncatedCharacteristicIsFlagged) {
  const auto ab = UniformGrid::symmetric(2.0, 21);
  const auto chi = characteristic_from_marginal(marginal_source(StateSpec::ground()), ab, ab);
  const auto w = wigner_from_characteristic(chi, UniformGrid::symmetric(3, 11), UniformGrid::symmetric(3, 11));
  EXPECT_TRUE(w.diagnostics.flagged());
}

class DensityMatrixProperties : public ::testing::TestWithParam<StateSpec> {};

TEST_P(DensityMatrixProperties, MatchesWavefunctionOuterProduct) {
  const auto s = GetParam();
  oracle::FockState f;
  switch (s.kind) {
    case StateKind::Ground: f = oracle::FockState::number(0); break;
    case StateKind::ExcitedFirst: f = oracle::FockState::number(1); break;
    case StateKind::Coherent: f = oracle::FockState::coherent(s.q0, s.p0); break;
    case StateKind::OddCat: f = oracle::FockState::odd_cat(s.q0, s.p0); break;
  }
  const auto rho = density_matrix_from_marginal(marginal_source(s));
  const auto& g = rho.q_grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 3)
    for (std::size_t j = 0; j < g.size(); j += 3)
      worst = std::max(worst, std::abs(rho.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                       f.psi(g[i]) * std::conj(f.psi(g[j]))));
  EXPECT_LT(worst, 1e-10) << s.label();
  EXPECT_NEAR(rho.trace(), 1.0, 1e-3);
  EXPECT_LT(rho.hermiticity_error(), 1e-6);
  EXPECT_NEAR(rho.purity(), 1.0, 5e-3);
  EXPECT_GT(rho.min_eigenvalue(), -1e-3);
}

TEST_P(DensityMatrixProperties, IndependentOfKernelParameter) {
  const auto s = GetParam();
  ReconstructionConfig c1, c2;
  c2.s = 2.0;
  const auto a = density_matrix_from_marginal(marginal_source(s), UniformGrid::symmetric(4, 41), c1);
  const auto b = density_matrix_from_marginal(marginal_source(s), UniformGrid::symmetric(4, 41), c2);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(AllStates, DensityMatrixProperties, ::testing::ValuesIn(kStates),
                         [](const auto& info) { return std::string(to_string(info.param.kind)); });

TEST(DensityMatrix, GroundValueAtOrigin) {
  const auto rho = density_matrix_from_marginal(marginal_source(StateSpec::ground()));
  EXPECT_NEAR(rho.values(60, 60).real(), 1.0 / std::sqrt(pi), 1e-3);
  EXPECT_FALSE(rho.diagnostics.flagged());
}

TEST(DensityMatrix, FromMarginalField) {
  const auto field = make_marginal_field(marginal_source(StateSpec::coherent(1.0, -0.5)));
  const auto rho = density_matrix_from_marginal(field, UniformGrid::symmetric(5, 51));
  EXPECT_NEAR(rho.trace(), 1.0, 1e-3);
  EXPECT_NEAR(rho.purity(), 1.0, 5e-3);
  EXPECT_GT(rho.min_eigenvalue(), -1e-3);
}

TEST(DensityMatrix, RejectsZeroKernelParameter) {
  ReconstructionConfig c;
  c.s = 0.0;
  EXPECT_THROW(density_matrix_from_marginal(marginal_source(StateSpec::ground()), default_density_grid(), c), DomainError);
}

TEST(Moments, VariancesAndUncertainty) {
  const auto xg = default_x_grid();
  EXPECT_NEAR(moments(sample_marginal_slice(marginal_source(StateSpec::ground()), {1, 0, 0}, xg)).variance, 0.5, 1e-9);
  EXPECT_NEAR(moments(sample_marginal_slice(marginal_source(StateSpec::excited_first()), {1, 0, 0}, xg)).variance, 1.5, 1e-9);
  const auto c = moments(sample_marginal_slice(marginal_source(StateSpec::coherent(1.0, -0.5)), {0.6, 0.8, 0.2}, xg));
  EXPECT_NEAR(c.mean, 0.6 - 0.4 + 0.2, 1e-9);
  EXPECT_NEAR(uncertainty_product(StateSpec::ground()), 0.25, 1e-9);
  EXPECT_NEAR(uncertainty_product(StateSpec::excited_first()), 2.25, 1e-9);
  for (const auto& s : kStates) EXPECT_GE(uncertainty_product(s), 0.25 - 1e-6);
  EXPECT_THROW(moments(sample_marginal_slice(marginal_source(StateSpec::ground()), {1, 0, 0}, UniformGrid::symmetric(0.5, 21))),
               DomainError);
}
