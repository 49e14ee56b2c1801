#pragma once

// Linearized car-following factors for a single-lane ring.
//
// Each vehicle j obeys
//   y_j'' = k1 (y_{j+1} - y_j) - k2 u_j + k3 u_{j+1}
// which gives the per-vehicle transfer function
//   T(s) = (k3 s + k1) / (s^2 + k2 s + k1).
// Human-driven and autonomous vehicles share this form; only the role of the
// triple differs, so both are instances of SecondOrderFactor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ringstab/errors.hpp"

namespace ringstab {

struct HumanRole {};
struct AutonomousRole {};

/// Coefficient triple of the second-order car-following factor.
///  stiffness    : sensitivity to spacing error (1/s^2)
///  damping      : own-velocity damping (1/s)
///  rel_velocity : sensitivity to the leader's velocity (1/s)
template <class Role>
struct SecondOrderFactor {
  double stiffness = 0.0;
  double damping = 0.0;
  double rel_velocity = 0.0;

  [[nodiscard]] constexpr std::array<double, 3> as_array() const noexcept {
    return {stiffness, damping, rel_velocity};
  }
  [[nodiscard]] static constexpr SecondOrderFactor from_array(const std::array<double, 3>& a) noexcept {
    return {a[0], a[1], a[2]};
  }
  friend constexpr bool operator==(const SecondOrderFactor&, const SecondOrderFactor&) = default;
};

/// HV linearization (alpha).
using HvParams = SecondOrderFactor<HumanRole>;
/// AV controller gains (beta).
using AvGains = SecondOrderFactor<AutonomousRole>;

/// Reinterpret a triple under the other role (e.g. an HV slot driven by AV gains).
template <class To, class From>
[[nodiscard]] constexpr SecondOrderFactor<To> recast(const SecondOrderFactor<From>& f) noexcept {
  return {f.stiffness, f.damping, f.rel_velocity};
}

/// Box bounds on AV gains.
struct GainBounds {
  AvGains lower;
  AvGains upper;
};

/// Open interval (lo, hi); empty when hi <= lo.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool empty() const noexcept { return !(hi > lo); }
  [[nodiscard]] bool contains(double x) const noexcept { return x > lo && x < hi; }
  [[nodiscard]] double width() const noexcept { return empty() ? 0.0 : hi - lo; }
};

// Rational driving constraints: k1 > 0, k2 > k3, k3 > 0. Strict, no tolerance.
template <class Role>
[[nodiscard]] constexpr bool check_rdc(const SecondOrderFactor<Role>& f) noexcept {
  return f.stiffness > 0.0 && f.damping - f.rel_velocity > 0.0 && f.rel_velocity > 0.0;
}

// Hurwitz stability of the factor's denominator.
template <class Role>
[[nodiscard]] constexpr bool is_hurwitz(const SecondOrderFactor<Role>& f) noexcept {
  return f.stiffness > 0.0 && f.damping > 0.0;
}

/// Discriminant -2 k1 + k2^2 - k3^2. The factor's magnitude never exceeds one
/// on the imaginary axis iff this is nonnegative.
[[nodiscard]] constexpr double delta(double k1, double k2, double k3) noexcept {
  return -2.0 * k1 + k2 * k2 - k3 * k3;
}

template <class Role>
[[nodiscard]] constexpr double delta(const SecondOrderFactor<Role>& f) noexcept {
  return delta(f.stiffness, f.damping, f.rel_velocity);
}

/// Rounding slack for "delta >= 0" checks on gains produced by floating-point
/// arithmetic; scaled by the size of the terms being cancelled.
template <class Role>
[[nodiscard]] inline double delta_slack(const SecondOrderFactor<Role>& f) noexcept {
  const double scale = 2.0 * std::abs(f.stiffness) + f.damping * f.damping + f.rel_velocity * f.rel_velocity;
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

namespace detail {

// |T(i w)|^2 denominator: k2^2 w^2 + (w^2 - k1)^2.
template <class Role>
[[nodiscard]] inline double magnitude_denominator(const SecondOrderFactor<Role>& f, double w) noexcept {
  const double w2 = w * w;
  const double d = w2 - f.stiffness;
  return f.damping * f.damping * w2 + d * d;
}

}  // namespace detail

/// D(w) = ln |T(i w)| = 1/2 ln((k3^2 w^2 + k1^2) / (k2^2 w^2 + (w^2 - k1)^2)).
///
/// Numerator minus denominator equals -w^2 (Delta + w^2) exactly, so the value
/// is evaluated as 1/2 log1p(-w^2 (Delta + w^2) / den) which stays accurate as
/// w -> 0 where both logarithm arguments approach k1^2.
template <class Role>
[[nodiscard]] inline double log_magnitude(const SecondOrderFactor<Role>& f, double w) {
  const double den = detail::magnitude_denominator(f, w);
  if (!(den > 0.0)) {
    throw DomainError("log_magnitude: transfer function pole on the imaginary axis");
  }
  const double w2 = w * w;
  return 0.5 * std::log1p(-w2 * (delta(f) + w2) / den);
}

/// dD/dw = w (-k3^2 w^4 - 2 k1^2 w^2 - k1^2 Delta) / (num * den).
template <class Role>
[[nodiscard]] inline double log_magnitude_derivative(const SecondOrderFactor<Role>& f, double w) {
  const double den = detail::magnitude_denominator(f, w);
  if (!(den > 0.0)) {
    throw DomainError("log_magnitude_derivative: transfer function pole on the imaginary axis");
  }
  const double w2 = w * w;
  const double k1sq = f.stiffness * f.stiffness;
  const double num = f.rel_velocity * f.rel_velocity * w2 + k1sq;
  const double poly = -f.rel_velocity * f.rel_velocity * w2 * w2 - 2.0 * k1sq * w2 - k1sq * delta(f);
  return w * poly / (num * den);
}

/// Frequencies where the HV factor amplifies: (0, sqrt(-Delta)) if Delta < 0.
[[nodiscard]] inline Interval unstable_band(const HvParams& hv) noexcept {
  const double d = delta(hv);
  if (d >= 0.0) return {0.0, 0.0};
  return {0.0, std::sqrt(-d)};
}

/// Sample points strictly inside (0, upper): geometric clusters at both ends
/// plus a uniform body. Sorted ascending, duplicates removed.
[[nodiscard]] inline std::vector<double> band_grid(double upper, std::size_t count = 4096) {
  std::vector<double> pts;
  if (!(upper > 0.0) || count < 8) return pts;
  const std::size_t n_geo = count / 4;
  const std::size_t n_lin = count - 2 * n_geo;
  pts.reserve(count);
  // near 0: upper * 10^[-9, log10(0.5)]
  const double lo_exp = -9.0;
  const double hi_exp = std::log10(0.5);
  for (std::size_t i = 0; i < n_geo; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_geo - 1);
    pts.push_back(upper * std::pow(10.0, lo_exp + t * (hi_exp - lo_exp)));
  }
  for (std::size_t i = 1; i <= n_lin; ++i) {
    pts.push_back(upper * static_cast<double>(i) / static_cast<double>(n_lin + 1));
  }
  for (std::size_t i = 0; i < n_geo; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_geo - 1);
    pts.push_back(upper * (1.0 - std::pow(10.0, lo_exp + t * (hi_exp - lo_exp))));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::erase_if(pts, [upper](double w) { return !(w > 0.0 && w < upper); });
  return pts;
}

}  // namespace ringstab
