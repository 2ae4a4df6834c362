#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "symtomo/errors.hpp"
#include "symtomo/flow.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/types.hpp"

namespace symtomo {

/// V(q) = sum_n coefficients[n] q^n.
struct PotentialSpec {
  std::vector<double> coefficients;

  PotentialSpec() = default;
  explicit PotentialSpec(std::vector<double> c) : coefficients(std::move(c)) {
    for (double v : coefficients)
      if (!std::isfinite(v)) throw DomainError("potential coefficients must be finite");
  }

  static PotentialSpec free() { return PotentialSpec({0.0}); }
  static PotentialSpec harmonic() { return PotentialSpec({0.0, 0.0, 0.5}); }
  static PotentialSpec linear(double c1) { return PotentialSpec({0.0, c1}); }
  static PotentialSpec of(DynamicsKind dyn) {
    return dyn == DynamicsKind::Harmonic ? harmonic() : free();
  }

  /// Parses "c0,c1,c2,...".
  static PotentialSpec parse(std::string_view text) {
    std::vector<double> c;
    std::string item;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        throw DomainError("bad potential coefficient '" + item + "'");
      }
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw DomainError("bad potential coefficient '" + item + "'");
      c.push_back(v);
    }
    if (c.empty()) throw DomainError("empty potential");
    return PotentialSpec(std::move(c));
  }

  int degree() const noexcept {
    for (int n = static_cast<int>(coefficients.size()) - 1; n > 0; --n)
      if (coefficients[static_cast<std::size_t>(n)] != 0.0) return n;
    return 0;
  }

  double coefficient(int n) const noexcept {
    return n >= 0 && static_cast<std::size_t>(n) < coefficients.size() ? coefficients[static_cast<std::size_t>(n)] : 0.0;
  }
};

/// One term coeff * mu^mu_pow * nu^nu_pow * d_X^dX d_mu^dMu d_nu^dNu w of
/// the right-hand side of dw/dt.
struct PdeTerm {
  double coeff = 0.0;
  int mu_pow = 0;
  int nu_pow = 0;
  int dX = 0;
  int dMu = 0;
  int dNu = 0;

  int derivative_order() const noexcept { return dX + dMu + dNu; }
  auto key() const noexcept { return std::tie(mu_pow, nu_pow, dX, dMu, dNu); }
  friend bool operator==(const PdeTerm&, const PdeTerm&) = default;
};

/// dw/dt = sum of terms.
struct PDECoefficients {
  std::vector<PdeTerm> terms;

  bool first_order() const noexcept {
    return std::all_of(terms.begin(), terms.end(), [](const PdeTerm& t) { return t.derivative_order() == 1; });
  }

  std::string describe() const {
    std::ostringstream os;
    os << "dw/dt =";
    if (terms.empty()) os << " 0";
    for (const auto& t : terms) {
      os << (t.coeff < 0 ? " - " : " + ") << std::abs(t.coeff);
      auto power = [&](const char* v, int p) {
        if (p == 1) os << "*" << v;
        if (p > 1) os << "*" << v << "^" << p;
      };
      power("mu", t.mu_pow);
      power("nu", t.nu_pow);
      power("d_X", t.dX);
      power("d_mu", t.dMu);
      power("d_nu", t.dNu);
      os << " w";
    }
    return os.str();
  }
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace detail

/// Reduces the marginal evolution equation for H = p^2/2 + V(q) to explicit
/// differential terms.
///
/// The kinetic part contributes +mu d_nu. The potential contributes
/// i [V(A + iB) - V(A - iB)] with A = (d_delta)^-1 d_mu and B = (nu/2) d_delta,
/// two commuting operators, so the binomial expansion is exact:
///   i [(A+iB)^n - (A-iB)^n] = sum_{k odd} 2 C(n,k) i^(k+1) A^(n-k) B^k
/// and A^(n-k) B^k = (nu/2)^k d_mu^(n-k) d_delta^(2k-n). A negative power of
/// d_delta is an integral operator (first met at n = 3), which is rejected.
/// Finally d_delta = -d_X by the shift identity.
inline PDECoefficients reduce_equation(const PotentialSpec& V) {
  std::map<std::tuple<int, int, int, int, int>, double> acc;
  acc[{1, 0, 0, 0, 1}] += 1.0;  // kinetic: +mu d_nu
  const int deg = V.degree();
  for (int n = 1; n <= deg; ++n) {
    const double cn = V.coefficient(n);
    if (cn == 0.0) continue;
    for (int k = 1; k <= n; k += 2) {
      const int delta_pow = 2 * k - n;
      if (delta_pow < 0)
        throw UnsupportedPotential("potential of degree " + std::to_string(deg) + " yields the term nu^" +
                                   std::to_string(k) + " d_mu^" + std::to_string(n - k) + " (d_delta)^" +
                                   std::to_string(delta_pow) +
                                   ": the inverse derivative is an integral operator, so the evolution equation is "
                                   "integro-differential; only polynomial potentials of degree <= 2 are supported");
      const double i_pow = ((k + 1) / 2) % 2 == 0 ? 1.0 : -1.0;  // i^(k+1), k odd
      const double delta_sign = delta_pow % 2 == 0 ? 1.0 : -1.0;  // d_delta^m = (-d_X)^m
      const double coeff = 2.0 * detail::binomial(n, k) * i_pow * cn * std::ldexp(1.0, -k) * delta_sign;
      acc[{0, k, delta_pow, n - k, 0}] += coeff;
    }
  }
  PDECoefficients out;
  // kinetic term first, the rest in key order
  auto emit = [&](const auto& entry) {
    if (entry.second == 0.0) return;
    const auto& [mp, np, dx, dm, dn] = entry.first;
    out.terms.push_back({entry.second, mp, np, dx, dm, dn});
  };
  const std::tuple<int, int, int, int, int> kinetic{1, 0, 0, 0, 1};
  emit(*acc.find(kinetic));
  for (const auto& e : acc)
    if (e.first != kinetic) emit(e);
  return out;
}

// ---------------------------------------------------------------------------
// exact solutions

/// Closed-form solution by characteristics: w(X, m, t) = w0(X, m'(t)) where
/// m' is the Heisenberg-evolved (mu, nu, delta). For V = c1 q this shifts X
/// by c1 nu t + c1 mu t^2/2; for the oscillator it rotates (mu, nu).
template <MarginalSource F>
auto evolve_characteristics(F initial, const PotentialSpec& V, double t) {
  (void)reduce_equation(V);  // scope check
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  const QuadraticFlow flow(V.coefficient(1), V.coefficient(2), t);
  return [initial = std::move(initial), flow](double X, const TomographyParams& m) {
    return initial(X, flow.heisenberg(m));
  };
}

template <MarginalSource F>
auto evolve_characteristics(F initial, DynamicsKind dyn, double t) {
  return evolve_characteristics(std::move(initial), PotentialSpec::of(dyn), dyn == DynamicsKind::Static ? 0.0 : t);
}

/// Reference Wigner evolution: for deg V <= 2 the Wigner function is
/// transported by the classical flow, W(z, t) = W0(flow_{-t}(z)).
inline auto evolve_wigner_reference(const StateSpec& state, const PotentialSpec& V, double t) {
  (void)reduce_equation(V);
  state.validate();
  const QuadraticFlow flow(V.coefficient(1), V.coefficient(2), t);
  return [state, flow](double q, double p) { return detail::wigner_initial(state, flow.backward({q, p})); };
}

inline auto evolve_wigner_reference(const StateSpec& state, DynamicsKind dyn, double t) {
  return evolve_wigner_reference(state, PotentialSpec::of(dyn), dyn == DynamicsKind::Static ? 0.0 : t);
}

// ---------------------------------------------------------------------------
// grid solver

enum class Scheme { SemiLagrangian, Upwind };

inline std::string_view to_string(Scheme s) { return s == Scheme::SemiLagrangian ? "semi-lagrangian" : "upwind"; }

struct SolverConfig {
  double dt = 0.01;
  double t_final = 0.0;
  Scheme scheme = Scheme::SemiLagrangian;
  double max_cfl = 0.9;
};

namespace detail {

// dw/dt = a . grad w with a = (a_X, a_mu, a_nu)
struct Velocity {
  std::vector<PdeTerm> terms;

  std::array<double, 3> operator()(double mu, double nu) const {
    std::array<double, 3> a{0.0, 0.0, 0.0};
    for (const auto& t : terms) {
      const double c = t.coeff * std::pow(mu, t.mu_pow) * std::pow(nu, t.nu_pow);
      if (t.dX) a[0] += c;
      if (t.dMu) a[1] += c;
      if (t.dNu) a[2] += c;
    }
    return a;
  }
};

// Departure point of the characteristic through (mu, nu) one step dt back:
// w(z, t + dt) = w(z_d, t) with dz/dtau = a(z) integrated over [0, dt] (RK4).
// Returns {X shift, mu_d, nu_d}.
inline std::array<double, 3> departure(const Velocity& a, double mu, double nu, double dt) {
  auto k1 = a(mu, nu);
  auto k2 = a(mu + 0.5 * dt * k1[1], nu + 0.5 * dt * k1[2]);
  auto k3 = a(mu + 0.5 * dt * k2[1], nu + 0.5 * dt * k2[2]);
  auto k4 = a(mu + dt * k3[1], nu + dt * k3[2]);
  std::array<double, 3> out{};
  const double base[3] = {0.0, mu, nu};
  for (int c = 0; c < 3; ++c) out[c] = base[c] + dt / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
  return out;
}

inline void fill_invalid_cells(MarginalField& f) {
  const auto& mg = f.mu_grid();
  const auto& ng = f.nu_grid();
  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j) {
      if (f.in_domain(i, j)) continue;
      auto s = f.slice(i, j);
      if (mg[i] == 0.0 && ng[j] == 0.0) {
        std::fill(s.begin(), s.end(), 0.0);
        continue;
      }
      f.sample_slice(mg[i], ng[j], 1.0, 0.0, s);
      for (auto& v : s) v = std::max(v, 0.0);
    }
}

// Returns the largest X-integral of negative undershoot removed from a slice.
inline double semi_lagrangian_step(const MarginalField& old, MarginalField& next, const Velocity& a, double dt) {
  const auto& mg = old.mu_grid();
  const auto& ng = old.nu_grid();
  const double hx = old.x_grid().spacing();
  double clipped = 0.0;
  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j) {
      if (!old.in_domain(i, j)) continue;
      const auto d = departure(a, mg[i], ng[j], dt);
      auto out = next.slice(i, j);
      old.sample_slice(d[1], d[2], 1.0, d[0], out);
      // marginals are densities; cubic undershoot below zero is pure error
      double neg = 0.0;
      for (auto& v : out)
        if (v < 0.0) {
          neg -= v;
          v = 0.0;
        }
      clipped = std::max(clipped, neg * hx);
    }
  return clipped;
}

inline void upwind_step(const MarginalField& old, MarginalField& next, const Velocity& a, double dt) {
  const auto& mg = old.mu_grid();
  const auto& ng = old.nu_grid();
  const auto& xg = old.x_grid();
  const std::size_t nx = xg.size();
  const double hx = xg.spacing(), hm = mg.spacing(), hn = ng.spacing();
  std::vector<double> ghost(nx);

  // slice at node (i + di, j + dj); off-box or invalid nodes are sampled
  // through the field's ray rescaling
  auto neighbour = [&](std::size_t i, std::size_t j, int di, int dj) -> std::span<const double> {
    const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj;
    const bool inside = ii >= 0 && jj >= 0 && ii < static_cast<long>(mg.size()) && jj < static_cast<long>(ng.size());
    if (inside && old.in_domain(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)))
      return old.slice(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
    const double mu = mg[i] + di * hm, nu = ng[j] + dj * hn;
    old.sample_slice(mu, nu, 1.0, 0.0, ghost);
    return ghost;
  };

  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j) {
      if (!old.in_domain(i, j)) continue;
      const auto v = a(mg[i], ng[j]);
      auto cur = old.slice(i, j);
      auto out = next.slice(i, j);
      for (std::size_t k = 0; k < nx; ++k) {
        double rhs = 0.0;
        if (v[0] > 0.0) rhs += v[0] * ((k + 1 < nx ? cur[k + 1] : 0.0) - cur[k]) / hx;
        if (v[0] < 0.0) rhs += v[0] * (cur[k] - (k > 0 ? cur[k - 1] : 0.0)) / hx;
        out[k] = cur[k] + dt * rhs;
      }
      if (v[1] != 0.0) {
        auto nb = neighbour(i, j, v[1] > 0.0 ? 1 : -1, 0);
        const double sgn = v[1] > 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < nx; ++k) out[k] += dt * v[1] * sgn * (nb[k] - cur[k]) / hm;
      }
      if (v[2] != 0.0) {
        auto nb = neighbour(i, j, 0, v[2] > 0.0 ? 1 : -1);
        const double sgn = v[2] > 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < nx; ++k) out[k] += dt * v[2] * sgn * (nb[k] - cur[k]) / hn;
      }
    }
}

// A node stays resolved when its characteristic over the whole run keeps
// clear of the excluded disk and starts on a resolved node of `initial`.
inline void mark_resolution(const MarginalField& initial, MarginalField& out, const Velocity& a,
                            std::span<const double> steps) {
  const auto& mg = out.mu_grid();
  const auto& ng = out.nu_grid();
  const double r2min = out.rho_min() * out.rho_min();
  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j) {
      if (!out.in_domain(i, j)) continue;
      double mu = mg[i], nu = ng[j];
      bool ok = true;
      for (auto it = steps.rbegin(); ok && it != steps.rend(); ++it) {
        const auto d = departure(a, mu, nu, *it);
        mu = d[1];
        nu = d[2];
        ok = mu * mu + nu * nu >= r2min;
      }
      out.set_resolved(i, j, ok && initial.resolved_at(mu, nu));
    }
}

}  // namespace detail

/// Advances a marginal field under a first-order reduced equation.
///
/// SemiLagrangian traces each domain node's characteristic back one step
/// (RK4) and interpolates the previous field there (bicubic in (mu,nu),
/// cubic in X), clipping negative undershoot. Upwind uses first-order
/// one-sided differences with explicit Euler and enforces the CFL bound.
/// Off-box and excluded-disk data come from the scaling identity; the disk
/// itself is refilled from the final field. A node whose characteristic
/// crosses the disk is marked unresolved and drops out of valid().
inline MarginalField evolve_pde(const MarginalField& initial, const PDECoefficients& coeffs, const SolverConfig& cfg) {
  if (!coeffs.first_order()) throw DomainError("evolve_pde needs first-order coefficients");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw DomainError("dt must be positive");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw DomainError("t_final must be non-negative");
  const detail::Velocity a{coeffs.terms};
  const auto& mg = initial.mu_grid();
  const auto& ng = initial.nu_grid();
  const auto& xg = initial.x_grid();

  if (cfg.scheme == Scheme::Upwind) {
    double cfl = 0.0;
    for (std::size_t i = 0; i < mg.size(); ++i)
      for (std::size_t j = 0; j < ng.size(); ++j) {
        if (!initial.in_domain(i, j)) continue;
        const auto v = a(mg[i], ng[j]);
        cfl = std::max(cfl, cfg.dt * (std::abs(v[0]) / xg.spacing() + std::abs(v[1]) / mg.spacing() +
                                      std::abs(v[2]) / ng.spacing()));
      }
    if (cfl > cfg.max_cfl)
      throw CflError("CFL number " + std::to_string(cfl) + " exceeds " + std::to_string(cfg.max_cfl) +
                     "; reduce dt");
  }

  std::size_t steps = 0;
  if (cfg.t_final > 0.0) steps = static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-9));

  MarginalField cur = initial;
  cur.diagnostics = {};
  MarginalField next = cur;
  double clipped = 0.0;
  std::vector<double> taken;
  for (std::size_t n = 0; n < steps; ++n) {
    const double dt = (n + 1 == steps) ? cfg.t_final - static_cast<double>(n) * cfg.dt : cfg.dt;
    taken.push_back(dt);
    if (cfg.scheme == Scheme::SemiLagrangian) {
      clipped = std::max(clipped, detail::semi_lagrangian_step(cur, next, a, dt));
    } else {
      detail::upwind_step(cur, next, a, dt);
    }
    std::swap(cur, next);
  }
  detail::fill_invalid_cells(cur);
  detail::mark_resolution(initial, cur, a, taken);

  double drift = 0.0;
  for (std::size_t i = 0; i < mg.size(); ++i)
    for (std::size_t j = 0; j < ng.size(); ++j)
      if (cur.valid(i, j))
        drift = std::max(drift, std::abs(cur.slice_normalization(i, j) - initial.slice_normalization(i, j)));
  cur.diagnostics.metrics["steps"] = static_cast<double>(steps);
  cur.diagnostics.metrics["max_normalization_drift"] = drift;
  cur.diagnostics.metrics["max_clipped_mass"] = clipped;
  cur.diagnostics.metrics["resolved_fraction"] =
      static_cast<double>(cur.valid_count()) / static_cast<double>(std::max<std::size_t>(1, cur.domain_count()));
  if (drift > 1e-4)
    cur.diagnostics.warn("X-normalization drifted by " + std::to_string(drift) + " (boundary outflow)");
  return cur;
}

}  // namespace symtomo
