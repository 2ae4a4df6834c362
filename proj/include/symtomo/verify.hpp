#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symtomo/errors.hpp"
#include "symtomo/evolution.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/tomography.hpp"

namespace symtomo {

/// Every numerical threshold used by checks, tests and the acceptance run.
struct Tolerances {
  double wigner_normalization = 1e-3;
  double slice_normalization = 1e-4;
  double closed_form_normalization = 1e-6;
  double marginal_floor = -1e-9;
  double closed_form_floor = -1e-12;
  double pde_floor = -1e-6;
  double radon_vs_closed_form = 1e-6;
  double radon_random_directions = 1e-5;
  double radon_grid_backed = 2e-3;
  double scaling_identity = 1e-8;
  double closed_form_identity = 1e-12;
  double characteristic = 1e-5;
  double characteristic_symmetry = 1e-8;
  double characteristic_origin = 1e-4;
  double roundtrip = 1e-3;
  double roundtrip_origin = 1e-2;
  double linearity = 1e-8;
  double hermiticity = 1e-6;
  double trace = 1e-3;
  double purity = 5e-3;
  double min_eigenvalue = -1e-3;
  double s_invariance = 1e-3;
  double density_value = 1e-3;
  double variance = 1e-6;
  double uncertainty = 1e-6;
  double uncertainty_excited = 1e-5;
  double characteristics = 1e-6;
  double stationarity = 1e-12;
  double pde = 1e-3;
  double pde_period = 5e-3;
  double pde_normalization = 1e-4;
  double convergence_upwind = 1.8;
  double convergence_semi_lagrangian = 3.5;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::vector<std::pair<std::string, std::string>> context;
};

struct ComparisonReport {
  double max_abs = 0.0;
  double l2 = 0.0;
  std::vector<std::string> axes;
  std::vector<double> argmax_location;
  std::size_t n_points = 0;
};

/// measured <= threshold
inline CheckResult check_at_most(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold, measured, threshold, {}};
}

/// measured >= threshold
inline CheckResult check_at_least(std::string name, double measured, double threshold) {
  return {std::move(name), measured >= threshold, measured, threshold, {}};
}

/// |measured - expected| <= tol
inline CheckResult check_near(std::string name, double measured, double expected, double tol) {
  CheckResult r{std::move(name), std::abs(measured - expected) <= tol, measured, tol, {}};
  r.context.emplace_back("expected", std::to_string(expected));
  return r;
}

inline CheckResult check_normalization(const MarginalSlice& slice, double tol) {
  if (slice.values.empty()) throw GridError("check_normalization: empty slice");
  CheckResult r = check_near("normalization", slice.normalization(), 1.0, tol);
  r.context.emplace_back("mu", std::to_string(slice.params.mu));
  r.context.emplace_back("nu", std::to_string(slice.params.nu));
  r.context.emplace_back("delta", std::to_string(slice.params.delta));
  return r;
}

/// Passes when min(values) >= floor; an empty set passes with measured 0.
inline CheckResult check_positivity(std::span<const double> values, double floor) {
  if (values.empty()) {
    CheckResult r{"positivity", true, 0.0, floor, {}};
    r.context.emplace_back("points", "0");
    return r;
  }
  const double mn = *std::min_element(values.begin(), values.end());
  CheckResult r = check_at_least("positivity", mn, floor);
  r.context.emplace_back("points", std::to_string(values.size()));
  return r;
}

inline CheckResult check_positivity(const WignerField& f, double floor) {
  return check_positivity(std::span<const double>(f.values.data(), static_cast<std::size_t>(f.values.size())), floor);
}

inline CheckResult check_positivity(const MarginalSlice& s, double floor) { return check_positivity(s.values, floor); }

/// Minimum over valid cells only.
inline CheckResult check_positivity(const MarginalField& f, double floor) {
  std::vector<double> v;
  for (std::size_t i = 0; i < f.mu_grid().size(); ++i)
    for (std::size_t j = 0; j < f.nu_grid().size(); ++j)
      if (f.valid(i, j)) {
        auto s = f.slice(i, j);
        v.insert(v.end(), s.begin(), s.end());
      }
  return check_positivity(v, floor);
}

namespace detail {

struct Accumulator {
  ComparisonReport rep;
  double sum2 = 0.0;

  void add(double d, std::vector<double> where) {
    d = std::abs(d);
    sum2 += d * d;
    ++rep.n_points;
    if (d > rep.max_abs || rep.argmax_location.empty()) {
      rep.max_abs = d;
      rep.argmax_location = std::move(where);
    }
  }

  ComparisonReport finish() {
    rep.l2 = std::sqrt(sum2);
    return rep;
  }
};

}  // namespace detail

inline ComparisonReport compare_fields(const WignerField& a, const WignerField& b) {
  if (!(a.q_grid == b.q_grid && a.p_grid == b.p_grid)) throw GridError("compare_fields: Wigner grids differ");
  detail::Accumulator acc;
  acc.rep.axes = {"q", "p"};
  for (std::size_t i = 0; i < a.q_grid.size(); ++i)
    for (std::size_t j = 0; j < a.p_grid.size(); ++j) {
      const auto I = static_cast<Eigen::Index>(i), J = static_cast<Eigen::Index>(j);
      acc.add(a.values(I, J) - b.values(I, J), {a.q_grid[i], a.p_grid[j]});
    }
  return acc.finish();
}

inline ComparisonReport compare_fields(const MarginalSlice& a, const MarginalSlice& b) {
  if (!(a.x_grid == b.x_grid) || a.values.size() != b.values.size()) throw GridError("compare_fields: X grids differ");
  detail::Accumulator acc;
  acc.rep.axes = {"X"};
  for (std::size_t k = 0; k < a.values.size(); ++k) acc.add(a.values[k] - b.values[k], {a.x_grid[k]});
  return acc.finish();
}

/// Cells valid in both fields.
inline ComparisonReport compare_fields(const MarginalField& a, const MarginalField& b) {
  if (!(a.mu_grid() == b.mu_grid() && a.nu_grid() == b.nu_grid() && a.x_grid() == b.x_grid()))
    throw GridError("compare_fields: marginal field grids differ");
  detail::Accumulator acc;
  acc.rep.axes = {"mu", "nu", "X"};
  const auto& xg = a.x_grid();
  for (std::size_t i = 0; i < a.mu_grid().size(); ++i)
    for (std::size_t j = 0; j < a.nu_grid().size(); ++j) {
      if (!a.valid(i, j) || !b.valid(i, j)) continue;
      for (std::size_t k = 0; k < xg.size(); ++k)
        acc.add(a.at(i, j, k) - b.at(i, j, k), {a.mu_grid()[i], a.nu_grid()[j], xg[k]});
    }
  return acc.finish();
}

/// Field against an evaluator on the field's valid nodes.
template <MarginalSource F>
ComparisonReport compare_to_source(const MarginalField& field, const F& source) {
  detail::Accumulator acc;
  acc.rep.axes = {"mu", "nu", "X"};
  const auto& mg = field.mu_grid();
  const auto& ng = field.nu_grid();
  const auto& xg = field.x_grid();
  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j) {
      if (!field.valid(i, j)) continue;
      const TomographyParams m{mg[i], ng[j], 0.0};
      for (std::size_t k = 0; k < xg.size(); ++k) acc.add(field.at(i, j, k) - source(xg[k], m), {mg[i], ng[j], xg[k]});
    }
  return acc.finish();
}

inline CheckResult as_check(std::string name, const ComparisonReport& rep, double threshold) {
  CheckResult r = check_at_most(std::move(name), rep.max_abs, threshold);
  r.context.emplace_back("points", std::to_string(rep.n_points));
  r.context.emplace_back("l2", std::to_string(rep.l2));
  std::string at;
  for (std::size_t d = 0; d < rep.argmax_location.size(); ++d)
    at += (d ? "," : "") + rep.axes[d] + "=" + std::to_string(rep.argmax_location[d]);
  r.context.emplace_back("argmax", at);
  return r;
}

// ---------------------------------------------------------------------------
// roundtrip report

/// Closed-form description of a state: its Wigner function and marginal.
struct StateModel {
  std::string label;
  std::function<double(double, double)> wigner;
  std::function<double(double, const TomographyParams&)> marginal;
};

inline StateModel state_model(const StateSpec& s) {
  return {s.label(), wigner_source(s), marginal_source(s)};
}

struct RoundtripConfig {
  UniformGrid ab_grid = UniformGrid::symmetric(12.0, 49);
  UniformGrid out_grid = UniformGrid::symmetric(4.0, 129);
  RadonConfig radon{0.05, 12.0};
  ChiConfig chi{};
  ReconstructionConfig reconstruction{};
  UniformGrid density_grid = default_density_grid();
  Tolerances tol{};
};

/// W -> w -> chi -> W and w -> rho pipelines with named checks. The input
/// normalization is checked first; nothing else runs when it fails.
inline std::vector<CheckResult> roundtrip_report(const StateModel& state, const RoundtripConfig& cfg = {}) {
  std::vector<CheckResult> out;
  auto tag = [&](CheckResult r) {
    r.context.insert(r.context.begin(), {"state", state.label});
    out.push_back(std::move(r));
  };

  {
    CheckResult worst;
    double dev = -1.0;
    for (auto [mu, nu] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}, std::pair{std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}}) {
      CheckResult r =
          check_normalization(sample_marginal_slice(state.marginal, {mu, nu, 0.0}, default_x_grid()), cfg.tol.slice_normalization);
      if (std::abs(r.measured - 1.0) > dev) {
        dev = std::abs(r.measured - 1.0);
        worst = r;
      }
    }
    const bool ok = worst.passed;
    tag(std::move(worst));
    if (!ok) return out;
  }

  {
    const auto chi = characteristic_from_marginal(radon_source(state.wigner, cfg.radon), cfg.ab_grid, cfg.ab_grid, cfg.chi);
    const WignerField rec = wigner_from_characteristic(chi, cfg.out_grid, cfg.out_grid);
    WignerField ref{cfg.out_grid, cfg.out_grid, Eigen::MatrixXd(rec.values.rows(), rec.values.cols()), {}};
    for (std::size_t i = 0; i < cfg.out_grid.size(); ++i)
      for (std::size_t j = 0; j < cfg.out_grid.size(); ++j)
        ref.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            state.wigner(cfg.out_grid[i], cfg.out_grid[j]);
    tag(as_check("roundtrip_residual", compare_fields(rec, ref), cfg.tol.roundtrip));
  }

  const auto rho = density_matrix_from_marginal(state.marginal, cfg.density_grid, cfg.reconstruction);
  tag(check_at_most("hermiticity", rho.hermiticity_error(), cfg.tol.hermiticity));
  tag(check_near("trace", rho.trace(), 1.0, cfg.tol.trace));
  tag(check_near("purity", rho.purity(), 1.0, cfg.tol.purity));
  tag(check_at_least("min_eigenvalue", rho.min_eigenvalue(), cfg.tol.min_eigenvalue));

  ReconstructionConfig doubled = cfg.reconstruction;
  doubled.s = 2.0 * cfg.reconstruction.s;
  const auto rho2 = density_matrix_from_marginal(state.marginal, cfg.density_grid, doubled);
  CheckResult inv = check_at_most("s_invariance", (rho.values - rho2.values).cwiseAbs().maxCoeff(), cfg.tol.s_invariance);
  inv.context.emplace_back("s", std::to_string(cfg.reconstruction.s) + " vs " + std::to_string(doubled.s));
  tag(std::move(inv));
  return out;
}

inline std::vector<CheckResult> roundtrip_report(const StateSpec& state, const RoundtripConfig& cfg = {}) {
  state.validate();
  return roundtrip_report(state_model(state), cfg);
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace symtomo
