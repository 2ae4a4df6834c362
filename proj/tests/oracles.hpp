#pragma once

// Independent references built from number-state expansions and position
// wavefunctions; none of them go through the library's closed forms.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

// Hermite functions phi_0..phi_{n-1} at x.
inline std::vector<double> hermite_functions(double x, int n) {
  std::vector<double> h(static_cast<std::size_t>(n));
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n > 1) h[1] = std::numbers::sqrt2 * x * h[0];
  for (int k = 1; k + 1 < n; ++k)
    h[static_cast<std::size_t>(k + 1)] = std::sqrt(2.0 / (k + 1)) * x * h[static_cast<std::size_t>(k)] -
                                         std::sqrt(static_cast<double>(k) / (k + 1)) * h[static_cast<std::size_t>(k - 1)];
  return h;
}

// Coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
inline std::vector<cd> coherent_amplitudes(cd alpha, int n) {
  std::vector<cd> c(static_cast<std::size_t>(n));
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int k = 1; k < n; ++k) c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k - 1)] * alpha / std::sqrt(double(k));
  return c;
}

// State in the number basis, normalized numerically.
struct FockState {
  std::vector<cd> c;

  static FockState number(int n, int size = 48) {
    FockState s{std::vector<cd>(static_cast<std::size_t>(size))};
    s.c[static_cast<std::size_t>(n)] = 1.0;
    return s;
  }
  static FockState coherent(double q0, double p0, int size = 48) {
    return normalized(coherent_amplitudes({q0 / std::numbers::sqrt2, p0 / std::numbers::sqrt2}, size));
  }
  // |a> - |-a>: only odd number states survive
  static FockState odd_cat(double q0, double p0, int size = 48) {
    auto c = coherent_amplitudes({q0 / std::numbers::sqrt2, p0 / std::numbers::sqrt2}, size);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = (k % 2 == 1) ? 2.0 * c[k] : cd{0.0};
    return normalized(std::move(c));
  }
  static FockState normalized(std::vector<cd> c) {
    double n = 0.0;
    for (auto v : c) n += std::norm(v);
    for (auto& v : c) v /= std::sqrt(n);
    return {std::move(c)};
  }

  // oscillator evolution over time t (zero-point phase dropped)
  FockState rotated(double t) const {
    FockState s = *this;
    for (std::size_t k = 0; k < s.c.size(); ++k) s.c[k] *= std::polar(1.0, -static_cast<double>(k) * t);
    return s;
  }

  cd psi(double x) const {
    const auto h = hermite_functions(x, static_cast<int>(c.size()));
    cd s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * h[k];
    return s;
  }

  // W(q,p) = 2 * integral psi*(q+y) psi(q-y) e^{2ipy} dy, trapezoid on [-L, L]
  double wigner(double q, double p, double L = 9.0, int n = 1801) const {
    const double h = 2.0 * L / (n - 1);
    cd s = 0.0;
    for (int k = 0; k < n; ++k) {
      const double y = -L + k * h;
      const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      s += w * std::conj(psi(q + y)) * psi(q - y) * std::polar(1.0, 2.0 * p * y);
    }
    return 2.0 * (s * h).real();
  }

  // position density of the state evolved for time t; equals the marginal
  // of the initial state at (mu, nu) = (cos t, sin t)
  double rotated_density(double x, double t) const { return std::norm(rotated(t).psi(x)); }
};

}  // namespace oracle
