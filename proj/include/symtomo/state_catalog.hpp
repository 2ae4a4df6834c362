#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "symtomo/errors.hpp"
#include "symtomo/flow.hpp"
#include "symtomo/grid.hpp"
#include "symtomo/types.hpp"

namespace symtomo {

enum class StateKind { Ground, ExcitedFirst, Coherent, OddCat };

inline std::string_view to_string(StateKind k) {
  switch (k) {
    case StateKind::Ground: return "ground";
    case StateKind::ExcitedFirst: return "excited1";
    case StateKind::Coherent: return "coherent";
    case StateKind::OddCat: return "oddcat";
  }
  return "?";
}

inline StateKind parse_state_kind(std::string_view s) {
  if (s == "ground") return StateKind::Ground;
  if (s == "excited1") return StateKind::ExcitedFirst;
  if (s == "coherent") return StateKind::Coherent;
  if (s == "oddcat") return StateKind::OddCat;
  throw DomainError("unknown state '" + std::string(s) + "' (ground|excited1|coherent|oddcat)");
}

/// One of the closed-form oscillator states. The displacement (q0, p0)
/// defines alpha = (q0 + i p0)/sqrt(2) for Coherent and OddCat and is
/// ignored otherwise.
struct StateSpec {
  StateKind kind = StateKind::Ground;
  double q0 = 0.0;
  double p0 = 0.0;

  static StateSpec ground() { return {StateKind::Ground, 0.0, 0.0}; }
  static StateSpec excited_first() { return {StateKind::ExcitedFirst, 0.0, 0.0}; }
  static StateSpec coherent(double q0, double p0) { return {StateKind::Coherent, q0, p0}; }
  static StateSpec odd_cat(double q0, double p0) { return {StateKind::OddCat, q0, p0}; }

  void validate() const {
    if (!std::isfinite(q0) || !std::isfinite(p0)) throw DomainError("state displacement must be finite");
    if (kind == StateKind::OddCat && q0 == 0.0 && p0 == 0.0)
      throw DomainError("odd cat state needs q0^2 + p0^2 > 0 (normalization diverges at alpha = 0)");
  }

  std::string label() const {
    std::string s(to_string(kind));
    if (kind == StateKind::Coherent || kind == StateKind::OddCat)
      s += "(q0=" + std::to_string(q0) + ",p0=" + std::to_string(p0) + ")";
    return s;
  }
};

/// N_- of the odd cat, {exp(r2/2) / (4 sinh(r2/2))}^(1/2) with r2 = q0^2+p0^2,
/// evaluated in the overflow-free form 1/sqrt(2(1 - exp(-r2))).
inline double cat_normalization(double q0, double p0) {
  if (!std::isfinite(q0) || !std::isfinite(p0)) throw DomainError("cat displacement must be finite");
  const double r2 = q0 * q0 + p0 * p0;
  if (!(r2 > 0.0)) throw DomainError("cat normalization diverges at q0 = p0 = 0");
  return std::sqrt(1.0 / (-2.0 * std::expm1(-r2)));
}

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// Wigner functions at t = 0, normalized to integral dq dp / (2 pi) = 1.
inline double wigner_initial(const StateSpec& s, PhasePoint z) {
  switch (s.kind) {
    case StateKind::Ground:
    case StateKind::Coherent: {
      const double dq = z.q - s.q0;
      const double dp = z.p - s.p0;
      return 2.0 * std::exp(-dq * dq - dp * dp);
    }
    case StateKind::ExcitedFirst: {
      const double r2 = z.q * z.q + z.p * z.p;
      return -2.0 * (1.0 - 2.0 * r2) * std::exp(-r2);
    }
    case StateKind::OddCat: {
      const double n = cat_normalization(s.q0, s.p0);
      const double am = (z.q - s.q0) * (z.q - s.q0) + (z.p - s.p0) * (z.p - s.p0);
      const double ap = (z.q + s.q0) * (z.q + s.q0) + (z.p + s.p0) * (z.p + s.p0);
      const double r2 = z.q * z.q + z.p * z.p;
      const double interference = 2.0 * std::exp(-r2) * std::cos(2.0 * (z.q * s.p0 - z.p * s.q0));
      return 2.0 * n * n * (std::exp(-am) + std::exp(-ap) - interference);
    }
  }
  return 0.0;
}

// Marginals at t = 0 for delta already subtracted (x = X - delta).
inline double marginal_initial(const StateSpec& s, double mu, double nu, double x) {
  const double r2 = mu * mu + nu * nu;
  const double r = std::sqrt(r2);
  constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
  switch (s.kind) {
    case StateKind::Ground:
    case StateKind::Coherent: {
      const double d = x - (mu * s.q0 + nu * s.p0);
      return inv_sqrt_pi / r * std::exp(-d * d / r2);
    }
    case StateKind::ExcitedFirst:
      return 2.0 * inv_sqrt_pi / (r2 * r) * x * x * std::exp(-x * x / r2);
    case StateKind::OddCat: {
      const double n = cat_normalization(s.q0, s.p0);
      const double c = mu * s.q0 + nu * s.p0;
      const double kappa = mu * s.p0 - nu * s.q0;
      const double gm = std::exp(-(x - c) * (x - c) / r2);
      const double gp = std::exp(-(x + c) * (x + c) / r2);
      const double cross = 2.0 * std::exp(-(x * x + c * c) / r2) * std::cos(2.0 * kappa * x / r2);
      return n * n * inv_sqrt_pi / r * (gm + gp - cross);
    }
  }
  return 0.0;
}

}  // namespace detail

/// W(q, p, t) with the phase-space integral of W/(2 pi) equal to one. Time
/// dependence follows the classical flow of the arguments (exact for the
/// quadratic Hamiltonians considered here).
inline double wigner_eval(const StateSpec& state, PhasePoint point, double t = 0.0,
                          DynamicsKind dyn = DynamicsKind::Static) {
  state.validate();
  detail::require_finite(point.q, "q");
  detail::require_finite(point.p, "p");
  detail::require_finite(t, "t");
  const PhasePoint z0 = QuadraticFlow::of(dyn, t).backward(point);
  return detail::wigner_initial(state, z0);
}

/// w(X, mu, nu, delta, t), a probability density in X. The direction is
/// evolved in the Heisenberg picture and the t = 0 closed form applied.
inline double marginal_eval(const StateSpec& state, const TomographyParams& params, double X, double t = 0.0,
                            DynamicsKind dyn = DynamicsKind::Static) {
  state.validate();
  params.require_direction();
  detail::require_finite(X, "X");
  detail::require_finite(t, "t");
  const TomographyParams h = QuadraticFlow::of(dyn, t).heisenberg(params);
  return detail::marginal_initial(state, h.mu, h.nu, X - h.delta);
}

/// Samples of W on a rectangular phase-space grid, values(i, j) = W(q_i, p_j).
struct WignerField {
  UniformGrid q_grid;
  UniformGrid p_grid;
  Eigen::MatrixXd values;
  Diagnostics diagnostics;

  /// Trapezoid estimate of the integral of W dq dp / (2 pi).
  double normalization() const {
    double s = 0.0;
    const auto nq = q_grid.size(), np = p_grid.size();
    for (std::size_t i = 0; i < nq; ++i)
      for (std::size_t j = 0; j < np; ++j)
        s += trapezoid_weight(i, nq) * trapezoid_weight(j, np) * values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return s * q_grid.spacing() * p_grid.spacing() / (2.0 * std::numbers::pi);
  }

  /// Bilinear interpolation; zero outside the grid.
  double operator()(double q, double p) const {
    const double u = q_grid.fractional_index(q);
    const double v = p_grid.fractional_index(p);
    const double nq = static_cast<double>(q_grid.size() - 1);
    const double np = static_cast<double>(p_grid.size() - 1);
    if (!(u >= 0.0 && u <= nq && v >= 0.0 && v <= np)) return 0.0;
    auto i = static_cast<Eigen::Index>(std::floor(u));
    auto j = static_cast<Eigen::Index>(std::floor(v));
    if (i == static_cast<Eigen::Index>(nq)) --i;
    if (j == static_cast<Eigen::Index>(np)) --j;
    const double a = u - static_cast<double>(i);
    const double b = v - static_cast<double>(j);
    return (1 - a) * (1 - b) * values(i, j) + a * (1 - b) * values(i + 1, j) + (1 - a) * b * values(i, j + 1) +
           a * b * values(i + 1, j + 1);
  }

  double min_value() const { return values.minCoeff(); }
};

inline constexpr double kDefaultPhaseHalfWidth = 6.0;
inline constexpr std::size_t kDefaultPhasePoints = 241;
inline constexpr std::size_t kMinWignerGridPoints = 16;

inline UniformGrid default_phase_grid() { return UniformGrid::symmetric(kDefaultPhaseHalfWidth, kDefaultPhasePoints); }

/// Samples wigner_eval on q_grid x p_grid. A normalization estimate more
/// than 1e-3 away from one is reported as a warning, not an error.
inline WignerField sample_wigner_field(const StateSpec& state, const UniformGrid& q_grid, const UniformGrid& p_grid,
                                       double t = 0.0, DynamicsKind dyn = DynamicsKind::Static) {
  if (q_grid.size() < kMinWignerGridPoints || p_grid.size() < kMinWignerGridPoints)
    throw GridError("Wigner grid needs at least 16 points per axis");
  state.validate();
  WignerField field{q_grid, p_grid, Eigen::MatrixXd(q_grid.size(), p_grid.size()), {}};
  for (std::size_t i = 0; i < q_grid.size(); ++i)
    for (std::size_t j = 0; j < p_grid.size(); ++j)
      field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wigner_eval(state, {q_grid[i], p_grid[j]}, t, dyn);
  const double norm = field.normalization();
  if (std::abs(norm - 1.0) > 1e-3)
    field.diagnostics.warn("normalization estimate " + std::to_string(norm) +
                           " deviates from 1: grid does not contain the state's support");
  return field;
}

}  // namespace symtomo
