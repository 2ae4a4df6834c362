#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "symtomo/errors.hpp"

namespace symtomo {

// hbar = m = omega = 1 everywhere.

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
};

/// Labels the measured observable X = mu*q + nu*p + delta.
struct TomographyParams {
  double mu = 1.0;
  double nu = 0.0;
  double delta = 0.0;

  double radius_sq() const noexcept { return mu * mu + nu * nu; }
  double radius() const noexcept { return std::hypot(mu, nu); }
  bool degenerate() const noexcept { return mu == 0.0 && nu == 0.0; }

  /// Rotated quadrature (optical homodyne tomography) at phase phi.
  static TomographyParams rotated(double phi) { return {std::cos(phi), std::sin(phi), 0.0}; }

  void require_direction() const {
    if (!std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(delta))
      throw DomainError("tomography parameters must be finite");
    if (degenerate()) throw DomainError("degenerate direction: mu = nu = 0");
  }
};

enum class DynamicsKind { Static, Free, Harmonic };

inline std::string_view to_string(DynamicsKind d) {
  switch (d) {
    case DynamicsKind::Static: return "static";
    case DynamicsKind::Free: return "free";
    case DynamicsKind::Harmonic: return "harmonic";
  }
  return "?";
}

inline DynamicsKind parse_dynamics(std::string_view s) {
  if (s == "static") return DynamicsKind::Static;
  if (s == "free") return DynamicsKind::Free;
  if (s == "harmonic") return DynamicsKind::Harmonic;
  throw DomainError("unknown dynamics '" + std::string(s) + "' (static|free|harmonic)");
}

}  // namespace symtomo
