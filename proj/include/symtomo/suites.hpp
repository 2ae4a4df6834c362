#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "symtomo/evolution.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/tomography.hpp"
#include "symtomo/verify.hpp"

namespace symtomo {

inline std::vector<StateSpec> catalog_states() {
  return {StateSpec::ground(), StateSpec::excited_first(), StateSpec::coherent(1.0, -0.5),
          StateSpec::odd_cat(std::numbers::sqrt2, 0.0)};
}

/// marginal of the evolved Wigner function against the evolved marginal,
/// sampled on a handful of directions (one with a shift).
inline CheckResult commuting_square_check(const StateSpec& state, DynamicsKind dyn, double t,
                                          const Tolerances& tol = default_tolerances()) {
  const auto wt = evolve_wigner_reference(state, dyn, t);
  const auto wm = evolve_characteristics(marginal_source(state), dyn, t);
  // free motion stretches W along q by up to |p| t
  const RadonConfig radon{0.05, 12.0 + 6.0 * std::abs(t)};
  const UniformGrid xg = UniformGrid::symmetric(6.0, 121);
  const TomographyParams dirs[] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.6, 0.8, 0.0}, {-0.5, 1.2, 0.3}, {1.5, -0.7, 0.0}};
  double worst = 0.0;
  for (const auto& m : dirs)
    for (std::size_t k = 0; k < xg.size(); ++k)
      worst = std::max(worst, std::abs(radon_point(wt, m, xg[k], radon) - wm(xg[k], m)));
  CheckResult r = check_at_most("commuting_square_characteristics", worst, tol.characteristics);
  r.context = {{"state", state.label()}, {"dynamics", std::string(to_string(dyn))}, {"t", std::to_string(t)}};
  return r;
}

/// PDE solution against characteristics on the default field, at each of
/// `times` (one chained run).
inline std::vector<CheckResult> pde_square_checks(const StateSpec& state, DynamicsKind dyn, const std::vector<double>& times,
                                                  const Tolerances& tol = default_tolerances(), const FieldGrid& grid = {},
                                                  double dt = 0.01) {
  std::vector<CheckResult> out;
  const auto coeffs = reduce_equation(PotentialSpec::of(dyn));
  MarginalField f = make_marginal_field(marginal_source(state), grid);
  double now = 0.0;
  for (double t : times) {
    f = evolve_pde(f, coeffs, {dt, t - now, Scheme::SemiLagrangian});
    now = t;
    const auto exact = evolve_characteristics(marginal_source(state), dyn, t);
    CheckResult r = as_check("commuting_square_pde", compare_to_source(f, exact), tol.pde);
    r.context.insert(r.context.begin(), {{"state", state.label()},
                                         {"dynamics", std::string(to_string(dyn))},
                                         {"t", std::to_string(t)},
                                         {"resolved_fraction", std::to_string(f.diagnostics.metrics["resolved_fraction"])}});
    out.push_back(std::move(r));
  }
  return out;
}

struct ConvergenceLevel {
  FieldGrid grid;
  double dt;
};

/// Error ratio coarse/fine of the PDE against characteristics, each level
/// compared on its own valid cells.
inline CheckResult convergence_check(const StateSpec& state, DynamicsKind dyn, Scheme scheme, double t,
                                     const ConvergenceLevel& coarse, const ConvergenceLevel& fine, double min_ratio) {
  const auto coeffs = reduce_equation(PotentialSpec::of(dyn));
  const auto exact = evolve_characteristics(marginal_source(state), dyn, t);
  auto error = [&](const ConvergenceLevel& lv) {
    const auto f = evolve_pde(make_marginal_field(marginal_source(state), lv.grid), coeffs, {lv.dt, t, scheme});
    return compare_to_source(f, exact).max_abs;
  };
  const double e_coarse = error(coarse), e_fine = error(fine);
  CheckResult r = check_at_least("convergence_ratio", e_coarse / e_fine, min_ratio);
  r.context = {{"state", state.label()},
               {"dynamics", std::string(to_string(dyn))},
               {"scheme", std::string(to_string(scheme))},
               {"error_coarse", std::to_string(e_coarse)},
               {"error_fine", std::to_string(e_fine)}};
  return r;
}

inline ConvergenceLevel convergence_coarse() { return {FieldGrid{}, 0.01}; }

inline ConvergenceLevel convergence_fine() {
  return {FieldGrid{UniformGrid::symmetric(1.25, 129), UniformGrid::symmetric(1.25, 129), UniformGrid::symmetric(10.0, 513), 0.9},
          0.005};
}

inline std::vector<CheckResult> evolution_suite(const std::vector<StateSpec>& states,
                                                const Tolerances& tol = default_tolerances()) {
  std::vector<CheckResult> out;
  const std::vector<double> times{0.3, 1.0, std::numbers::pi};
  for (const auto& s : states)
    for (auto dyn : {DynamicsKind::Free, DynamicsKind::Harmonic}) {
      for (double t : times) out.push_back(commuting_square_check(s, dyn, t, tol));
      for (auto& r : pde_square_checks(s, dyn, times, tol)) out.push_back(std::move(r));
    }
  for (const auto& s : states) {
    if (s.kind != StateKind::ExcitedFirst) continue;
    const auto f0 = make_marginal_field(marginal_source(s));
    const auto f = evolve_pde(f0, reduce_equation(PotentialSpec::harmonic()), {0.01, 2.0 * std::numbers::pi});
    CheckResult r = as_check("harmonic_period_pde", compare_fields(f, f0), tol.pde_period);
    r.context.insert(r.context.begin(), {"state", s.label()});
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<CheckResult> roundtrip_suite(const std::vector<StateSpec>& states) {
  std::vector<CheckResult> out;
  for (const auto& s : states)
    for (auto& r : roundtrip_report(s)) out.push_back(std::move(r));
  return out;
}

namespace detail {

inline CheckResult terms_check(std::string name, const PDECoefficients& got, const std::vector<PdeTerm>& want) {
  double mismatches = std::abs(static_cast<double>(got.terms.size()) - static_cast<double>(want.size()));
  for (std::size_t i = 0; i < std::min(got.terms.size(), want.size()); ++i)
    if (!(got.terms[i] == want[i])) mismatches += 1.0;
  CheckResult r = check_at_most(std::move(name), mismatches, 0.0);
  r.context.emplace_back("terms", got.describe());
  return r;
}

}  // namespace detail

/// Example values of the closed forms and the reduction, each with its
/// tolerance from Tolerances.
inline std::vector<CheckResult> paper_examples_suite(const Tolerances& tol = default_tolerances()) {
  using std::numbers::pi;
  const double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  std::vector<CheckResult> out;
  const auto ground = StateSpec::ground();
  const auto excited = StateSpec::excited_first();
  const auto cat = StateSpec::odd_cat(std::numbers::sqrt2, 0.0);

  out.push_back(check_near("excited_wigner_origin", wigner_eval(excited, {0, 0}, 1.3, DynamicsKind::Harmonic), -2.0,
                           tol.closed_form_identity));
  out.push_back(check_near("coherent_zero_wigner_origin", wigner_eval(StateSpec::coherent(0, 0), {0, 0}), 2.0,
                           tol.closed_form_identity));
  out.push_back(check_near("ground_wigner_rotation", wigner_eval(ground, {1, 0}, 0.7, DynamicsKind::Harmonic),
                           2.0 * std::exp(-1.0), tol.closed_form_identity));
  out.push_back(check_near("oddcat_wigner_origin", wigner_eval(cat, {0, 0}), -2.0, tol.closed_form_identity));
  out.push_back(check_near("oddcat_normalization", cat_normalization(std::numbers::sqrt2, 0.0),
                           std::sqrt(std::numbers::e / (4.0 * std::sinh(1.0))), tol.closed_form_identity));
  out.push_back(check_near("oddcat_normalization_limit", cat_normalization(5.0, 5.0), std::numbers::sqrt2 / 2, 1e-10));

  out.push_back(check_near("ground_marginal_peak", marginal_eval(ground, {1, 0, 0}, 0.0), inv_sqrt_pi,
                           tol.closed_form_identity));
  out.push_back(check_near("excited_marginal_at_one", marginal_eval(excited, {1, 0, 0}, 1.0),
                           2.0 * inv_sqrt_pi * std::exp(-1.0), tol.closed_form_identity));
  out.push_back(check_near("excited_marginal_zero_at_shift", marginal_eval(excited, {0.4, -1.1, 0.7}, 0.7), 0.0,
                           tol.closed_form_identity));
  {
    // rotated coherent mean: Gaussian of variance 1/2 centred at cos t
    const auto s = sample_marginal_slice(marginal_source(StateSpec::coherent(1, 0), pi / 2, DynamicsKind::Harmonic),
                                         {1, 0, 0}, default_x_grid());
    const auto m = moments(s);
    out.push_back(check_near("coherent_quarter_period_mean", m.mean, 0.0, tol.variance));
    out.push_back(check_near("coherent_quarter_period_variance", m.variance, 0.5, tol.variance));
  }

  out.push_back(detail::terms_check("reduce_free", reduce_equation(PotentialSpec::free()), {{1.0, 1, 0, 0, 0, 1}}));
  out.push_back(detail::terms_check("reduce_harmonic", reduce_equation(PotentialSpec::harmonic()),
                                    {{1.0, 1, 0, 0, 0, 1}, {-1.0, 0, 1, 0, 1, 0}}));
  out.push_back(detail::terms_check("reduce_linear", reduce_equation(PotentialSpec::linear(0.5)),
                                    {{1.0, 1, 0, 0, 0, 1}, {0.5, 0, 1, 1, 0, 0}}));
  {
    double rejected = 0.0;
    try {
      (void)reduce_equation(PotentialSpec({0, 0, 0, 1}));
    } catch (const UnsupportedPotential&) {
      rejected = 1.0;
    }
    out.push_back(check_near("reduce_cubic_rejected", rejected, 1.0, 0.0));
  }

  const auto xg = default_x_grid();
  out.push_back(check_near("ground_variance", moments(sample_marginal_slice(marginal_source(ground), {1, 0, 0}, xg)).variance,
                           0.5, tol.variance));
  out.push_back(check_near("excited_variance",
                           moments(sample_marginal_slice(marginal_source(excited), {1, 0, 0}, xg)).variance, 1.5,
                           tol.variance));
  for (double t : {0.0, 1.0, 2.0})
    out.push_back(check_near("free_ground_momentum_variance_t" + std::to_string(static_cast<int>(t)),
                             moments(sample_marginal_slice(marginal_source(ground, t, DynamicsKind::Free), {0, 1, 0}, xg))
                                 .variance,
                             0.5, tol.variance));
  out.push_back(check_near("ground_uncertainty", uncertainty_product(ground), 0.25, tol.uncertainty));
  out.push_back(check_near("excited_uncertainty", uncertainty_product(excited), 2.25, tol.uncertainty_excited));

  {
    const auto rho = density_matrix_from_marginal(marginal_source(ground));
    const auto c = rho.q_grid.size() / 2;
    out.push_back(check_near("ground_density_origin", rho.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)).real(),
                             inv_sqrt_pi, tol.density_value));
  }
  {
    const auto rho = density_matrix_from_marginal(marginal_source(excited));
    const auto& g = rho.q_grid;
    const auto i = static_cast<Eigen::Index>(std::lround(g.fractional_index(1.0)));
    out.push_back(check_near("excited_density_diagonal_at_one", rho.values(i, i).real(),
                             2.0 * inv_sqrt_pi * std::exp(-1.0), tol.density_value));
  }

  {
    const auto phi = 0.7;
    const auto slice = radon_marginal(wigner_source(excited), TomographyParams::rotated(phi), UniformGrid::symmetric(6, 121));
    double worst = 0.0;
    for (std::size_t k = 0; k < slice.values.size(); ++k)
      worst = std::max(worst, std::abs(slice.values[k] - marginal_eval(excited, slice.params, slice.x_grid[k])));
    out.push_back(check_at_most("excited_radon_vs_closed_form", worst, tol.radon_vs_closed_form));
  }
  {
    const auto ab = UniformGrid::symmetric(6, 25);
    const auto chi = characteristic_from_marginal(marginal_source(ground), ab, ab);
    double worst = 0.0;
    for (std::size_t i = 0; i < ab.size(); ++i)
      for (std::size_t j = 0; j < ab.size(); ++j)
        worst = std::max(worst, std::abs(chi.at(i, j) - std::exp(-(ab[i] * ab[i] + ab[j] * ab[j]) / 4.0)));
    out.push_back(check_at_most("ground_characteristic_function", worst, tol.characteristic));
  }
  return out;
}

}  // namespace symtomo
