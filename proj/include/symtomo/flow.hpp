#pragma once

#include <cmath>

#include "symtomo/types.hpp"

namespace symtomo {

/// Exact phase-space flow of H = p^2/2 + c1*q + c2*q^2 over a time t.
///
/// With k = 2*c2 the forward map is
///   q(t) = C q + S p + f,   p(t) = -k S q + C p + f',
/// where C, S are the fundamental solutions of q'' = -k q and f the
/// particular solution driven by the constant force -c1. The linear part
/// has unit determinant, so its inverse is [[C, -S], [k S, C]].
struct QuadraticFlow {
  double k = 0.0;
  double c = 1.0;   // C(t)
  double s = 0.0;   // S(t)
  double f = 0.0;   // particular displacement
  double fp = 0.0;  // particular momentum

  QuadraticFlow() = default;

  QuadraticFlow(double c1, double c2, double t) : k(2.0 * c2) {
    if (k > 0.0) {
      const double w = std::sqrt(k);
      c = std::cos(w * t);
      s = std::sin(w * t) / w;
    } else if (k < 0.0) {
      const double w = std::sqrt(-k);
      c = std::cosh(w * t);
      s = std::sinh(w * t) / w;
    } else {
      c = 1.0;
      s = t;
    }
    // (1 - C)/k, continuous through k = 0
    double one_minus_c_over_k;
    if (std::abs(k * t * t) > 1e-6) {
      one_minus_c_over_k = (1.0 - c) / k;
    } else {
      const double t2 = t * t;
      one_minus_c_over_k = t2 / 2.0 - k * t2 * t2 / 24.0 + k * k * t2 * t2 * t2 / 720.0;
    }
    f = -c1 * one_minus_c_over_k;
    fp = -c1 * s;
  }

  static QuadraticFlow of(DynamicsKind dyn, double t) {
    switch (dyn) {
      case DynamicsKind::Static: return QuadraticFlow{};
      case DynamicsKind::Free: return QuadraticFlow(0.0, 0.0, t);
      case DynamicsKind::Harmonic: return QuadraticFlow(0.0, 0.5, t);
    }
    return QuadraticFlow{};
  }

  PhasePoint forward(PhasePoint z) const noexcept {
    return {c * z.q + s * z.p + f, -k * s * z.q + c * z.p + fp};
  }

  PhasePoint backward(PhasePoint z) const noexcept {
    const double dq = z.q - f;
    const double dp = z.p - fp;
    return {c * dq - s * dp, k * s * dq + c * dp};
  }

  /// Heisenberg picture: X(t) = mu q(t) + nu p(t) + delta expressed through
  /// the initial q, p. The marginal then obeys w(X, params, t) = w0(X, heisenberg(params)).
  TomographyParams heisenberg(const TomographyParams& x) const noexcept {
    return {x.mu * c - x.nu * k * s, x.mu * s + x.nu * c, x.delta + x.mu * f + x.nu * fp};
  }
};

}  // namespace symtomo
