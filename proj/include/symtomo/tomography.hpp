#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symtomo/errors.hpp"
#include "symtomo/grid.hpp"
#include "symtomo/marginal_field.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/types.hpp"

namespace symtomo {

using cdouble = std::complex<double>;

// ---------------------------------------------------------------------------
// Wigner -> marginal

/// The k-integral of the forward map is done analytically, leaving
///   w(X) = 1/(2 pi r) * integral W(foot + l e_perp) dl
/// along the line mu q + nu p = X - delta (l is arclength, r = |(mu,nu)|).
struct RadonConfig {
  double step = 0.01;            // arclength step of the trapezoid rule
  double support_radius = 12.0;  // W is taken as zero outside this disk
};

template <WignerSource W>
double radon_point(const W& wigner, const TomographyParams& m, double X, const RadonConfig& cfg = {}) {
  m.require_direction();
  const double r = m.radius();
  const double x = X - m.delta;
  const double d = x / r;  // signed distance of the line from the origin
  if (std::abs(d) >= cfg.support_radius) return 0.0;
  const double half = std::sqrt(cfg.support_radius * cfg.support_radius - d * d);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / cfg.step));
  const double h = 2.0 * half / static_cast<double>(n);
  const double fq = x * m.mu / (r * r), fp = x * m.nu / (r * r);
  const double eq = -m.nu / r, ep = m.mu / r;
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double l = -half + static_cast<double>(i) * h;
    const double v = wigner(fq + l * eq, fp + l * ep);
    s += (i == 0 || i == n) ? 0.5 * v : v;
  }
  return s * h / (2.0 * std::numbers::pi * r);
}

/// Numerical forward map at one direction. Works for closed-form
/// evaluators and for grid-backed WignerField inputs (bilinear).
template <WignerSource W>
MarginalSlice radon_marginal(const W& wigner, const TomographyParams& params, const UniformGrid& x_grid,
                             const RadonConfig& cfg = {}) {
  params.require_direction();
  MarginalSlice slice{params, x_grid, std::vector<double>(x_grid.size()), {}};
  for (std::size_t k = 0; k < x_grid.size(); ++k) slice.values[k] = radon_point(wigner, params, x_grid[k], cfg);
  const double norm = slice.normalization();
  slice.diagnostics.metrics["normalization"] = norm;
  if (std::abs(norm - 1.0) > 1e-4)
    slice.diagnostics.warn("normalization " + std::to_string(norm) +
                           ": line extent or X grid does not cover the support");
  return slice;
}

/// Marginal evaluator computing every value by the numerical forward map.
template <WignerSource W>
auto radon_source(W wigner, RadonConfig cfg = {}) {
  return [wigner = std::move(wigner), cfg](double X, const TomographyParams& m) {
    return radon_point(wigner, m, X, cfg);
  };
}

// ---------------------------------------------------------------------------
// marginal -> characteristic function -> Wigner

/// chi(a, b) = integral w(X, a, b, 0) e^{iX} dX, the Fourier component of the
/// marginal at s = 1; chi(0,0) = 1 by continuity.
struct CharacteristicGrid {
  UniformGrid a_grid;
  UniformGrid b_grid;
  Eigen::MatrixXcd values;
  Diagnostics diagnostics;

  cdouble at(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

/// How a marginal evaluator is sampled along one ray. By the scaling
/// identity the integral at (a, b) = rho*u only needs the slice at
/// ray_radius*u: chi = integral w(Y, ray_radius u) e^{i (rho/ray_radius) Y} dY.
struct ChiConfig {
  UniformGrid y_grid = UniformGrid::symmetric(10.0, 256);
  double ray_radius = 1.0;
  double normalization_tol = 1e-4;
};

struct RaySlice {
  UniformGrid y_grid;
  std::vector<double> values;
  double radius = 1.0;
};

template <MarginalSource F>
RaySlice ray_slice(const F& source, double ux, double uy, const ChiConfig& cfg) {
  RaySlice rs{cfg.y_grid, std::vector<double>(cfg.y_grid.size()), cfg.ray_radius};
  const TomographyParams m{cfg.ray_radius * ux, cfg.ray_radius * uy, 0.0};
  for (std::size_t k = 0; k < cfg.y_grid.size(); ++k) rs.values[k] = source(cfg.y_grid[k], m);
  return rs;
}

inline RaySlice ray_slice(const MarginalField& field, double ux, double uy, const ChiConfig&) {
  const double r = field.reference_radius();
  RaySlice rs{field.x_grid(), std::vector<double>(field.x_grid().size()), r};
  field.sample_slice(r * ux, r * uy, 1.0, 0.0, rs.values);
  return rs;
}

namespace detail {

inline void require_normalized(const RaySlice& rs, double tol, double ux, double uy) {
  const double norm = trapezoid(rs.values, rs.y_grid.spacing());
  if (!(std::abs(norm - 1.0) <= tol))
    throw DomainError("non-normalized input slice along direction (" + std::to_string(ux) + ", " +
                      std::to_string(uy) + "): integral " + std::to_string(norm));
}

// integral w(Y) e^{i freq Y} dY by the trapezoid rule
inline cdouble fourier_component(const UniformGrid& y, std::span<const double> w, double freq) {
  const double h = y.spacing();
  // e^{i freq Y_k} by recurrence from Y_0 keeps the sum cheap; restart every
  // 64 steps to bound the accumulated rounding.
  cdouble s{0.0, 0.0};
  const cdouble step = std::polar(1.0, freq * h);
  cdouble ph{};
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (k % 64 == 0) ph = std::polar(1.0, freq * y[k]);
    s += trapezoid_weight(k, y.size()) * w[k] * ph;
    ph *= step;
  }
  return s * h;
}

inline void check_decay(CharacteristicGrid& chi) {
  double edge = 0.0;
  const auto na = chi.values.rows(), nb = chi.values.cols();
  for (Eigen::Index i = 0; i < na; ++i) edge = std::max({edge, std::abs(chi.values(i, 0)), std::abs(chi.values(i, nb - 1))});
  for (Eigen::Index j = 0; j < nb; ++j) edge = std::max({edge, std::abs(chi.values(0, j)), std::abs(chi.values(na - 1, j))});
  chi.diagnostics.metrics["boundary_max_abs"] = edge;
}

}  // namespace detail

/// chi at one (a, b) from an evaluator, via the ray slice.
template <class F>
cdouble characteristic_at(const F& source, double a, double b, const ChiConfig& cfg = {}) {
  const double rho = std::hypot(a, b);
  if (rho == 0.0) return {1.0, 0.0};
  const double ux = a / rho, uy = b / rho;
  const RaySlice rs = ray_slice(source, ux, uy, cfg);
  detail::require_normalized(rs, cfg.normalization_tol, ux, uy);
  return detail::fourier_component(rs.y_grid, rs.values, rho / rs.radius);
}

/// chi on an (a, b) grid from any marginal evaluator (closed form, numerical
/// forward map, or a MarginalField). When both grids are symmetric about
/// zero only half the nodes are integrated and the rest follow from
/// chi(-a,-b) = conj chi(a,b), which is exact for a real W.
template <class F>
CharacteristicGrid characteristic_from_marginal(const F& source, const UniformGrid& a_grid, const UniformGrid& b_grid,
                                                const ChiConfig& cfg = {}) {
  CharacteristicGrid chi{a_grid, b_grid, Eigen::MatrixXcd(a_grid.size(), b_grid.size()), {}};
  const bool mirror = a_grid.symmetric_about_zero() && b_grid.symmetric_about_zero();
  const std::size_t na = a_grid.size(), nb = b_grid.size();
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const std::size_t lin = i * nb + j;
      const std::size_t mlin = (na - 1 - i) * nb + (nb - 1 - j);
      if (mirror && lin > mlin) continue;
      const bool centre = mirror && lin == mlin;
      const cdouble v = centre ? cdouble{1.0, 0.0} : characteristic_at(source, a_grid[i], b_grid[j], cfg);
      chi.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      if (mirror)
        chi.values(static_cast<Eigen::Index>(na - 1 - i), static_cast<Eigen::Index>(nb - 1 - j)) = std::conj(v);
    }
  detail::check_decay(chi);
  return chi;
}

/// chi at requested (a, b) targets read from the field's own slices. Every
/// target must lie inside the (mu, nu) box of the field. Targets on valid
/// nodes use the stored slice; other targets interpolate (or rescale along
/// their ray when next to the invalid disk). Each slice must be normalized.
inline CharacteristicGrid characteristic_from_field(const MarginalField& field, const UniformGrid& a_grid,
                                                    const UniformGrid& b_grid, double normalization_tol = 1e-4) {
  const auto& mg = field.mu_grid();
  const auto& ng = field.nu_grid();
  if (a_grid.start() < mg.start() || a_grid.stop() > mg.stop() || b_grid.start() < ng.start() ||
      b_grid.stop() > ng.stop())
    throw CoverageError("requested (a,b) grid extends beyond the field's (mu,nu) coverage");
  CharacteristicGrid chi{a_grid, b_grid, Eigen::MatrixXcd(a_grid.size(), b_grid.size()), {}};
  const auto& xg = field.x_grid();
  std::vector<double> buf(xg.size());
  for (std::size_t i = 0; i < a_grid.size(); ++i)
    for (std::size_t j = 0; j < b_grid.size(); ++j) {
      const double a = a_grid[i], b = b_grid[j];
      cdouble v{1.0, 0.0};
      if (a != 0.0 || b != 0.0) {
        std::span<const double> w;
        const bool on_node = a_grid == mg && b_grid == ng && field.valid(i, j);
        if (on_node) {
          w = field.slice(i, j);
        } else {
          field.sample_slice(a, b, 1.0, 0.0, buf);
          w = buf;
        }
        const double norm = trapezoid(w, xg.spacing());
        if (!(std::abs(norm - 1.0) <= normalization_tol))
          throw DomainError("non-normalized input slice at (" + std::to_string(a) + ", " + std::to_string(b) +
                            "): integral " + std::to_string(norm));
        v = detail::fourier_component(xg, w, 1.0);
      }
      chi.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  detail::check_decay(chi);
  return chi;
}

inline CharacteristicGrid characteristic_from_field(const MarginalField& field, double normalization_tol = 1e-4) {
  return characteristic_from_field(field, field.mu_grid(), field.nu_grid(), normalization_tol);
}

/// W(q, p) = 1/(2 pi) * sum chi(a,b) e^{-i(aq + bp)} da db as a separable
/// discrete Fourier sum with trapezoid weights.
inline WignerField wigner_from_characteristic(const CharacteristicGrid& chi, const UniformGrid& q_grid,
                                              const UniformGrid& p_grid) {
  const double da = chi.a_grid.spacing(), db = chi.b_grid.spacing();
  const double qmax = std::max(std::abs(q_grid.start()), std::abs(q_grid.stop()));
  const double pmax = std::max(std::abs(p_grid.start()), std::abs(p_grid.stop()));
  if (qmax >= std::numbers::pi / da || pmax >= std::numbers::pi / db)
    throw GridError("output grid exceeds the alias-free half period pi/da = " + std::to_string(std::numbers::pi / da));

  const auto na = static_cast<Eigen::Index>(chi.a_grid.size());
  const auto nb = static_cast<Eigen::Index>(chi.b_grid.size());
  const auto nq = static_cast<Eigen::Index>(q_grid.size());
  const auto np = static_cast<Eigen::Index>(p_grid.size());
  Eigen::MatrixXcd eq(nq, na), ep(nb, np);
  for (Eigen::Index i = 0; i < nq; ++i)
    for (Eigen::Index k = 0; k < na; ++k)
      eq(i, k) = trapezoid_weight(static_cast<std::size_t>(k), chi.a_grid.size()) *
                 std::polar(1.0, -chi.a_grid[static_cast<std::size_t>(k)] * q_grid[static_cast<std::size_t>(i)]);
  for (Eigen::Index l = 0; l < nb; ++l)
    for (Eigen::Index j = 0; j < np; ++j)
      ep(l, j) = trapezoid_weight(static_cast<std::size_t>(l), chi.b_grid.size()) *
                 std::polar(1.0, -chi.b_grid[static_cast<std::size_t>(l)] * p_grid[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXcd w = (eq * chi.values * ep) * (da * db / (2.0 * std::numbers::pi));

  WignerField out{q_grid, p_grid, w.real(), chi.diagnostics};
  const double residue = w.imag().cwiseAbs().maxCoeff();
  out.diagnostics.metrics["imaginary_residue"] = residue;
  if (residue > 1e-6) out.diagnostics.warn("imaginary residue " + std::to_string(residue) + " exceeds 1e-6");
  if (auto it = chi.diagnostics.metrics.find("boundary_max_abs");
      it != chi.diagnostics.metrics.end() && it->second > 1e-8)
    out.diagnostics.warn("characteristic function not decayed at the (a,b) boundary (" + std::to_string(it->second) +
                         "): expect ringing");
  return out;
}

// ---------------------------------------------------------------------------
// marginal -> density matrix

/// Position-representation reconstruction
///   rho(q, q') = |s|/(2 pi) * integral w(Y, mu, (q-q')/s, 0) e^{is(Y - mu(q+q')/2)} dmu dY.
/// The Y-integral is evaluated along rays (see ChiConfig), so mu^2+nu^2 = 0
/// points never need a slice.
struct ReconstructionConfig {
  double s = 1.0;
  double mu_range = 12.0;
  std::size_t mu_samples = 241;
  double y_range = 10.0;
  std::size_t y_samples = 256;
  double ray_radius = 1.0;

  ChiConfig chi() const { return {UniformGrid::symmetric(y_range, y_samples), ray_radius, 1e-4}; }
};

inline UniformGrid default_density_grid() { return UniformGrid::symmetric(6.0, 121); }

struct DensityMatrixGrid {
  UniformGrid q_grid;
  Eigen::MatrixXcd values;
  ReconstructionConfig config;
  Diagnostics diagnostics;

  double trace() const { return values.diagonal().real().sum() * q_grid.spacing(); }

  double hermiticity_error() const { return (values - values.adjoint()).cwiseAbs().maxCoeff(); }

  /// tr(rho^2) with the trapezoid-free sum appropriate for decayed kernels.
  double purity() const {
    const double h = q_grid.spacing();
    return values.cwiseAbs2().sum() * h * h;
  }

  /// Spectrum of the discretized operator rho(q_i, q_j) * dq (Hermitian part).
  Eigen::VectorXd eigenvalues() const {
    const Eigen::MatrixXcd herm = 0.5 * (values + values.adjoint()) * q_grid.spacing();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  double min_eigenvalue() const { return eigenvalues().minCoeff(); }
};

template <class F>
DensityMatrixGrid density_matrix_from_marginal(const F& source, const UniformGrid& q_grid = default_density_grid(),
                                               const ReconstructionConfig& cfg = {}) {
  if (!(std::isfinite(cfg.s) && cfg.s != 0.0)) throw DomainError("reconstruction parameter s must be finite and non-zero");
  const ChiConfig chi_cfg = cfg.chi();
  const UniformGrid mu = UniformGrid::symmetric(cfg.mu_range, cfg.mu_samples);
  const std::size_t nq = q_grid.size(), nm = mu.size();
  const double dq = q_grid.spacing();
  const std::size_t nd = 2 * nq - 1;  // distinct q - q' = (i - j) dq

  // chi_s(l, d) = integral w(Y, mu_l, nu_d, 0) e^{i s Y} dY with nu_d = (d - nq + 1) dq / s
  Eigen::MatrixXcd chis(nm, nd);
  for (std::size_t l = 0; l < nm; ++l)
    for (std::size_t d = 0; d < nd; ++d) {
      const std::size_t ml = nm - 1 - l, md = nd - 1 - d;
      if (l * nd + d > ml * nd + md) continue;  // filled by conjugate symmetry
      const double nu = (static_cast<double>(d) - static_cast<double>(nq - 1)) * dq / cfg.s;
      const cdouble v = characteristic_at(source, cfg.s * mu[l], cfg.s * nu, chi_cfg);
      chis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(d)) = v;
      chis(static_cast<Eigen::Index>(ml), static_cast<Eigen::Index>(md)) = std::conj(v);
    }

  // e^{-i s mu_l q_i / 2}
  Eigen::MatrixXcd ph(nm, nq);
  for (std::size_t l = 0; l < nm; ++l)
    for (std::size_t i = 0; i < nq; ++i)
      ph(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) = std::polar(1.0, -0.5 * cfg.s * mu[l] * q_grid[i]);

  const double pref = std::abs(cfg.s) * mu.spacing() / (2.0 * std::numbers::pi);
  DensityMatrixGrid out{q_grid, Eigen::MatrixXcd(nq, nq), cfg, {}};
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < nq; ++j) {
      const auto d = static_cast<Eigen::Index>(i + nq - 1 - j);
      cdouble s{0.0, 0.0};
      for (std::size_t l = 0; l < nm; ++l) {
        const auto L = static_cast<Eigen::Index>(l);
        s += trapezoid_weight(l, nm) * chis(L, d) * ph(L, static_cast<Eigen::Index>(i)) *
             ph(L, static_cast<Eigen::Index>(j));
      }
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pref * s;
    }

  const double herm = out.hermiticity_error();
  const double tr = out.trace();
  out.diagnostics.metrics["hermiticity_error"] = herm;
  out.diagnostics.metrics["trace"] = tr;
  if (herm > 1e-6) out.diagnostics.warn("hermiticity error " + std::to_string(herm) + " exceeds 1e-6");
  if (std::abs(tr - 1.0) > 1e-3) out.diagnostics.warn("trace " + std::to_string(tr) + ": integration range too small");
  return out;
}

// ---------------------------------------------------------------------------
// moments

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments moments(const MarginalSlice& slice, double normalization_tol = 1e-4) {
  const double h = slice.x_grid.spacing();
  const double norm = slice.normalization();
  if (!(std::abs(norm - 1.0) <= normalization_tol))
    throw DomainError("moments: slice is not normalized (integral " + std::to_string(norm) + ")");
  const std::size_t n = slice.values.size();
  double m1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) m1 += trapezoid_weight(k, n) * slice.x_grid[k] * slice.values[k];
  m1 *= h / norm;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = slice.x_grid[k] - m1;
    m2 += trapezoid_weight(k, n) * d * d * slice.values[k];
  }
  return {m1, m2 * h / norm};
}

/// Var(q) * Var(p) read off the (1,0,0) and (0,1,0) slices.
template <MarginalSource F>
double uncertainty_product(const F& source, const UniformGrid& x_grid = default_x_grid()) {
  const auto vq = moments(sample_marginal_slice(source, {1.0, 0.0, 0.0}, x_grid)).variance;
  const auto vp = moments(sample_marginal_slice(source, {0.0, 1.0, 0.0}, x_grid)).variance;
  return vq * vp;
}

inline double uncertainty_product(const StateSpec& state, const UniformGrid& x_grid = default_x_grid()) {
  return uncertainty_product(marginal_source(state), x_grid);
}

}  // namespace symtomo
