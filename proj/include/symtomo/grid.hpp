#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "symtomo/errors.hpp"

namespace symtomo {

/// Uniform ascending sample grid `start, start+h, ..., stop` with `count`
/// nodes. Node coordinates are computed by one fixed formula so that a grid
/// rebuilt from (start, stop, count) reproduces every coordinate bit-exactly.
class UniformGrid {
 public:
  UniformGrid() = default;

  UniformGrid(double start, double stop, std::size_t count)
      : start_(start), stop_(stop), count_(count) {
    if (!std::isfinite(start) || !std::isfinite(stop))
      throw GridError("grid bounds must be finite");
    if (count < 2) throw GridError("grid needs at least 2 points, got " + std::to_string(count));
    if (!(stop > start)) throw GridError("grid must be ascending (stop > start)");
  }

  /// Symmetric grid [-half_width, half_width].
  static UniformGrid symmetric(double half_width, std::size_t count) {
    return UniformGrid(-half_width, half_width, count);
  }

  double start() const noexcept { return start_; }
  double stop() const noexcept { return stop_; }
  std::size_t size() const noexcept { return count_; }
  double spacing() const noexcept { return (stop_ - start_) / static_cast<double>(count_ - 1); }

  double operator[](std::size_t i) const noexcept {
    return i + 1 == count_ ? stop_ : start_ + static_cast<double>(i) * spacing();
  }

  std::vector<double> nodes() const {
    std::vector<double> out(count_);
    for (std::size_t i = 0; i < count_; ++i) out[i] = (*this)[i];
    return out;
  }

  bool contains(double x) const noexcept { return x >= start_ && x <= stop_; }

  /// True when the grid is mirror-symmetric about zero.
  bool symmetric_about_zero() const noexcept {
    return std::abs(start_ + stop_) <= 1e-12 * (std::abs(start_) + std::abs(stop_));
  }

  /// Continuous index (x - start)/h.
  double fractional_index(double x) const noexcept { return (x - start_) / spacing(); }

  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;

 private:
  double start_ = 0.0;
  double stop_ = 1.0;
  std::size_t count_ = 2;
};

/// Composite trapezoid rule on uniformly spaced samples.
inline double trapezoid(std::span<const double> values, double h) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

/// Trapezoid weight of node i out of n (1/2 at the ends).
inline double trapezoid_weight(std::size_t i, std::size_t n) noexcept {
  return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

/// Four-point Lagrange weights for nodes -1, 0, 1, 2 at offset t in [0,1).
inline std::array<double, 4> cubic_weights(double t) noexcept {
  const double tm1 = t - 1.0;
  const double tm2 = t - 2.0;
  const double tp1 = t + 1.0;
  return {-t * tm1 * tm2 / 6.0, tp1 * tm1 * tm2 / 2.0, -tp1 * t * tm2 / 2.0, tp1 * t * tm1 / 6.0};
}

/// Cubic Lagrange interpolation of samples on `grid` at `x`; samples are
/// taken as zero outside the grid (data assumed decayed at the edges).
inline double cubic_interpolate(const UniformGrid& grid, std::span<const double> values, double x) {
  const double u = grid.fractional_index(x);
  const auto n = static_cast<long>(grid.size());
  if (!(u > -2.0 && u < static_cast<double>(n + 1))) return 0.0;
  const long i = static_cast<long>(std::floor(u));
  const auto w = cubic_weights(u - static_cast<double>(i));
  double s = 0.0;
  for (long k = 0; k < 4; ++k) {
    const long idx = i - 1 + k;
    if (idx >= 0 && idx < n) s += w[static_cast<std::size_t>(k)] * values[static_cast<std::size_t>(idx)];
  }
  return s;
}

}  // namespace symtomo
