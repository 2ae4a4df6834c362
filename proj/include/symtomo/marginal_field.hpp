#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "symtomo/errors.hpp"
#include "symtomo/grid.hpp"
#include "symtomo/state_catalog.hpp"
#include "symtomo/types.hpp"

namespace symtomo {

/// Anything evaluating W(q, p).
template <class F>
concept WignerSource = std::regular_invocable<const F&, double, double> &&
                       std::convertible_to<std::invoke_result_t<const F&, double, double>, double>;

/// Anything evaluating w(X, mu, nu, delta).
template <class F>
concept MarginalSource = std::regular_invocable<const F&, double, const TomographyParams&> &&
                         std::convertible_to<std::invoke_result_t<const F&, double, const TomographyParams&>, double>;

inline auto wigner_source(const StateSpec& state, double t = 0.0, DynamicsKind dyn = DynamicsKind::Static) {
  state.validate();
  return [state, t, dyn](double q, double p) { return wigner_eval(state, {q, p}, t, dyn); };
}

inline auto marginal_source(const StateSpec& state, double t = 0.0, DynamicsKind dyn = DynamicsKind::Static) {
  state.validate();
  return [state, t, dyn](double X, const TomographyParams& m) { return marginal_eval(state, m, X, t, dyn); };
}

inline constexpr double kDefaultXHalfWidth = 10.0;
inline constexpr std::size_t kDefaultXPoints = 1024;

inline UniformGrid default_x_grid() { return UniformGrid::symmetric(kDefaultXHalfWidth, kDefaultXPoints); }

/// w(X) sampled at one (mu, nu, delta).
struct MarginalSlice {
  TomographyParams params;
  UniformGrid x_grid;
  std::vector<double> values;
  Diagnostics diagnostics;

  double normalization() const { return trapezoid(values, x_grid.spacing()); }
  double min_value() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }
};

template <MarginalSource F>
MarginalSlice sample_marginal_slice(const F& source, const TomographyParams& params, const UniformGrid& x_grid) {
  params.require_direction();
  MarginalSlice slice{params, x_grid, std::vector<double>(x_grid.size()), {}};
  for (std::size_t k = 0; k < x_grid.size(); ++k) slice.values[k] = source(x_grid[k], params);
  return slice;
}

/// Geometry of a marginal field: (mu, nu) box, X axis and the radius below
/// which cells are too narrow in X to be used as interpolation data.
struct FieldGrid {
  UniformGrid mu = UniformGrid::symmetric(1.25, 65);
  UniformGrid nu = UniformGrid::symmetric(1.25, 65);
  UniformGrid x = UniformGrid::symmetric(10.0, 257);
  double rho_min = 0.9;
};

/// w(X, mu, nu, 0) on a (mu, nu, X) grid, stored mu-major then nu then X.
///
/// Cells with mu^2 + nu^2 < rho_min^2 (and always the (0,0) cell) lie outside
/// the domain: their slices are too narrow for the X spacing and their
/// angular resolution too coarse. Off-grid queries use tricubic Lagrange
/// interpolation over domain cells only. A domain cell may additionally be
/// marked unresolved (its data went through the excluded disk during time
/// evolution); valid() is true only for resolved domain cells. Queries outside the
/// box or next to invalid cells are moved along their ray with the scaling
/// identity w(X, m) = lambda w(lambda X, lambda m), lambda > 0, and any delta
/// enters through the shift identity w(X, m, delta) = w(X - delta, m, 0).
class MarginalField {
 public:
  MarginalField() = default;

  explicit MarginalField(const FieldGrid& g)
      : mu_(g.mu),
        nu_(g.nu),
        x_(g.x),
        rho_min_(g.rho_min),
        data_(g.mu.size() * g.nu.size() * g.x.size(), 0.0),
        resolved_(g.mu.size() * g.nu.size(), 1) {
    if (mu_.size() < 4 || nu_.size() < 4) throw GridError("marginal field needs at least 4 points per (mu,nu) axis");
    if (!(mu_.start() < 0.0 && mu_.stop() > 0.0 && nu_.start() < 0.0 && nu_.stop() > 0.0))
      throw GridError("marginal field (mu,nu) box must contain the origin");
    if (!(rho_min_ >= 0.0)) throw GridError("rho_min must be non-negative");
    if (fallback_radius() >= inner_half_width())
      throw GridError("rho_min too large for the (mu,nu) box: no valid interpolation ring");
  }

  const UniformGrid& mu_grid() const noexcept { return mu_; }
  const UniformGrid& nu_grid() const noexcept { return nu_; }
  const UniformGrid& x_grid() const noexcept { return x_; }
  double rho_min() const noexcept { return rho_min_; }
  FieldGrid geometry() const { return {mu_, nu_, x_, rho_min_}; }

  std::span<double> slice(std::size_t i, std::size_t j) {
    return {data_.data() + (i * nu_.size() + j) * x_.size(), x_.size()};
  }
  std::span<const double> slice(std::size_t i, std::size_t j) const {
    return {data_.data() + (i * nu_.size() + j) * x_.size(), x_.size()};
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * nu_.size() + j) * x_.size() + k]; }
  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool in_domain(std::size_t i, std::size_t j) const noexcept {
    const double m = mu_[i], n = nu_[j];
    if (m == 0.0 && n == 0.0) return false;
    return m * m + n * n >= rho_min_ * rho_min_;
  }

  bool valid(std::size_t i, std::size_t j) const noexcept { return in_domain(i, j) && resolved_[i * nu_.size() + j]; }

  void set_resolved(std::size_t i, std::size_t j, bool r) noexcept { resolved_[i * nu_.size() + j] = r ? 1 : 0; }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < mu_.size(); ++i)
      for (std::size_t j = 0; j < nu_.size(); ++j) n += valid(i, j) ? 1 : 0;
    return n;
  }

  std::size_t domain_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < mu_.size(); ++i)
      for (std::size_t j = 0; j < nu_.size(); ++j) n += in_domain(i, j) ? 1 : 0;
    return n;
  }

  /// Resolution flag carried by direction (mu, nu): false inside the excluded
  /// disk, otherwise the flag of the nearest domain node on the same ray.
  bool resolved_at(double mu, double nu) const {
    if (mu * mu + nu * nu < rho_min_ * rho_min_) return false;
    if (!(mu >= mu_.start() && mu <= mu_.stop() && nu >= nu_.start() && nu <= nu_.stop())) {
      const double lam = fallback_scale(mu, nu);
      mu *= lam;
      nu *= lam;
    }
    const auto i = static_cast<std::size_t>(std::lround(std::clamp(mu_.fractional_index(mu), 0.0, mu_.size() - 1.0)));
    const auto j = static_cast<std::size_t>(std::lround(std::clamp(nu_.fractional_index(nu), 0.0, nu_.size() - 1.0)));
    return !in_domain(i, j) || resolved_[i * nu_.size() + j];
  }

  double slice_normalization(std::size_t i, std::size_t j) const { return trapezoid(slice(i, j), x_.spacing()); }

  MarginalSlice slice_at(std::size_t i, std::size_t j) const {
    auto s = slice(i, j);
    return {{mu_[i], nu_[j], 0.0}, x_, std::vector<double>(s.begin(), s.end()), {}};
  }

  /// Half width of the region where a 4x4 stencil fits inside the box.
  double inner_half_width() const noexcept {
    return std::min({-mu_[1], mu_[mu_.size() - 2], -nu_[1], nu_[nu_.size() - 2]});
  }

  /// Radius at which every stencil clears the invalid disk.
  double fallback_radius() const noexcept { return rho_min_ + 3.0 * std::max(mu_.spacing(), nu_.spacing()); }

  /// Ray radius used when the whole field is sampled along directions.
  double reference_radius() const noexcept { return std::max(0.75 * inner_half_width(), fallback_radius()); }

  /// out[k] = w(x_scale * X_k + x_shift, mu, nu, 0) for every node X_k.
  void sample_slice(double mu, double nu, double x_scale, double x_shift, std::span<double> out) const {
    if (out.size() != x_.size()) throw GridError("sample_slice: output size mismatch");
    Stencil st;
    if (locate(mu, nu, st)) {
      if (x_scale == 1.0 && x_shift == 0.0) {
        combine(st, out);
        return;
      }
      std::vector<double> tmp(x_.size());
      combine(st, tmp);
      for (std::size_t k = 0; k < x_.size(); ++k) out[k] = cubic_interpolate(x_, tmp, x_scale * x_[k] + x_shift);
      return;
    }
    const double lam = fallback_scale(mu, nu);
    Stencil moved;
    if (!locate(lam * mu, lam * nu, moved))
      throw CoverageError("marginal field: no valid interpolation stencil along ray (" + std::to_string(mu) + ", " +
                          std::to_string(nu) + ")");
    sample_slice(lam * mu, lam * nu, lam * x_scale, lam * x_shift, out);
    for (auto& v : out) v *= lam;
  }

  /// Point evaluation w(X, mu, nu, delta).
  double operator()(double X, const TomographyParams& m) const {
    m.require_direction();
    return point(X - m.delta, m.mu, m.nu);
  }

  Diagnostics diagnostics;

 private:
  struct Stencil {
    std::size_t i0 = 0, j0 = 0;  // lower-left node of the 4x4 block
    std::array<double, 4> wu{}, wv{};
  };

  bool locate(double mu, double nu, Stencil& st) const {
    const double u = mu_.fractional_index(mu);
    const double v = nu_.fractional_index(nu);
    const double nmu = static_cast<double>(mu_.size());
    const double nnu = static_cast<double>(nu_.size());
    if (!(u >= 1.0 && u < nmu - 2.0 && v >= 1.0 && v < nnu - 2.0)) return false;
    const auto i = static_cast<std::size_t>(std::floor(u));
    const auto j = static_cast<std::size_t>(std::floor(v));
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        if (!in_domain(i - 1 + a, j - 1 + b)) return false;
    st.i0 = i - 1;
    st.j0 = j - 1;
    st.wu = cubic_weights(u - static_cast<double>(i));
    st.wv = cubic_weights(v - static_cast<double>(j));
    return true;
  }

  void combine(const Stencil& st, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t nx = x_.size();
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        const double w = st.wu[a] * st.wv[b];
        const double* src = data_.data() + ((st.i0 + a) * nu_.size() + (st.j0 + b)) * nx;
        for (std::size_t k = 0; k < nx; ++k) out[k] += w * src[k];
      }
  }

  // lambda > 0 moving (mu, nu) onto a point with a valid stencil.
  double fallback_scale(double mu, double nu) const {
    if (mu == 0.0 && nu == 0.0) throw DomainError("degenerate direction: mu = nu = 0");
    const double lo_mu = mu_[1], hi_mu = mu_[mu_.size() - 2];
    const double lo_nu = nu_[1], hi_nu = nu_[nu_.size() - 2];
    const bool inside = mu >= lo_mu && mu < hi_mu && nu >= lo_nu && nu < hi_nu;
    if (!inside) {
      double lam = 1.0;
      if (mu > 0.0) lam = std::min(lam, hi_mu / mu);
      if (mu < 0.0) lam = std::min(lam, lo_mu / mu);
      if (nu > 0.0) lam = std::min(lam, hi_nu / nu);
      if (nu < 0.0) lam = std::min(lam, lo_nu / nu);
      lam *= 1.0 - 1e-9;
      // the box edge may still sit inside the invalid disk for tiny boxes
      if (std::hypot(lam * mu, lam * nu) >= fallback_radius()) return lam;
    }
    return fallback_radius() / std::hypot(mu, nu);
  }

  double point(double x, double mu, double nu) const {
    Stencil st;
    if (locate(mu, nu, st)) {
      double s = 0.0;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          s += st.wu[a] * st.wv[b] * cubic_interpolate(x_, slice(st.i0 + a, st.j0 + b), x);
      return s;
    }
    const double lam = fallback_scale(mu, nu);
    Stencil moved;
    if (!locate(lam * mu, lam * nu, moved))
      throw CoverageError("marginal field: no valid interpolation stencil along ray");
    return lam * point(lam * x, lam * mu, lam * nu);
  }

  UniformGrid mu_, nu_, x_;
  double rho_min_ = 0.0;
  std::vector<double> data_;
  std::vector<unsigned char> resolved_;
};

/// Samples `source` at every (mu, nu, X) node with delta = 0. The (0,0)
/// cell holds zeros. Valid slices whose X-integral misses one by more than
/// 1e-4 are reported in the diagnostics.
template <MarginalSource F>
MarginalField make_marginal_field(const F& source, const FieldGrid& grid = {}) {
  MarginalField field(grid);
  std::size_t poor = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.mu.size(); ++i)
    for (std::size_t j = 0; j < grid.nu.size(); ++j) {
      const TomographyParams m{grid.mu[i], grid.nu[j], 0.0};
      if (m.degenerate()) continue;
      auto s = field.slice(i, j);
      for (std::size_t k = 0; k < grid.x.size(); ++k) s[k] = source(grid.x[k], m);
      if (field.valid(i, j)) {
        const double dev = std::abs(field.slice_normalization(i, j) - 1.0);
        worst = std::max(worst, dev);
        if (dev > 1e-4) ++poor;
      }
    }
  field.diagnostics.metrics["max_normalization_deviation"] = worst;
  if (poor > 0)
    field.diagnostics.warn(std::to_string(poor) + " valid slices not normalized within 1e-4 (X grid too narrow?)");
  return field;
}

}  // namespace symtomo
