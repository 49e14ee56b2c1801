#pragma once

// Parameterizations of admissible AV gains.
//
//   (p, q, r)        -> gains with k3 = p, k2 = p + q, k1 = pq + q^2/2 - r,
//                       which satisfy the driving constraints and Delta = 2r >= 0.
//   (psi1, psi2, psi3) in [0,1]^3 -> (p, q, r) that additionally respect the
//                       box bounds; each coordinate interpolates between
//                       bounds that depend on the earlier coordinates.
//   (theta1, theta2, theta3) in R^3 -> psi through a sigmoid, so an
//                       unconstrained optimizer can search the admissible set.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"

namespace ringstab {

struct PqrParams {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
};

struct PsiParams {
  double psi1 = 0.0;
  double psi2 = 0.0;
  double psi3 = 0.0;
};

struct ThetaParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  [[nodiscard]] std::array<double, 3> as_array() const noexcept { return {theta1, theta2, theta3}; }
  [[nodiscard]] static ThetaParams from_array(const std::array<double, 3>& a) noexcept { return {a[0], a[1], a[2]}; }
};

enum class SigmoidKind { Logistic, Tanh, Arctan, Erf };

struct ParamConfig {
  double epsilon = 1e-6;  // strict-positivity margin for p and q
  double zeta = 1.0;      // sigmoid growth rate
  SigmoidKind sigmoid = SigmoidKind::Logistic;
};

/// Strictly increasing map R -> (0, 1); 1/2 at the origin for every kind.
[[nodiscard]] inline double sigmoid(double tau, double zeta, SigmoidKind kind = SigmoidKind::Logistic) {
  if (!(zeta > 0.0)) throw DomainError("sigmoid: growth rate must be positive");
  const double x = zeta * tau;
  switch (kind) {
    case SigmoidKind::Logistic:
      return 1.0 / (1.0 + std::exp(-x));
    case SigmoidKind::Tanh:
      return 0.5 * (1.0 + std::tanh(x));
    case SigmoidKind::Arctan:
      return 0.5 + std::atan(x) / std::numbers::pi;
    case SigmoidKind::Erf:
      return 0.5 * (1.0 + std::erf(x));
  }
  return 0.5;
}

/// Gains from (p, q, r). Throws when the stiffness pq + q^2/2 - r is not positive.
[[nodiscard]] inline AvGains beta_from_pqr(const PqrParams& pqr) {
  if (!(pqr.p > 0.0) || !(pqr.q > 0.0) || !(pqr.r >= 0.0)) {
    throw DomainError("beta_from_pqr: need p > 0, q > 0, r >= 0");
  }
  const double k1 = pqr.p * pqr.q + 0.5 * pqr.q * pqr.q - pqr.r;
  if (!(k1 > 0.0)) {
    throw DomainError("beta_from_pqr: nonpositive stiffness pq + q^2/2 - r = " + std::to_string(k1));
  }
  return {k1, pqr.p + pqr.q, pqr.p};
}

namespace detail {

// sqrt that tolerates a radicand negative by rounding only (<= 8 ulp of scale).
inline double clipped_sqrt(double x, double scale) {
  if (x < 0.0 && x >= -8.0 * std::numeric_limits<double>::epsilon() * std::abs(scale)) return 0.0;
  return std::sqrt(x);
}

// Collapse an interval inverted by rounding only; leave genuine inversions.
inline void repair_rounding(double& lo, double hi) {
  if (lo > hi && lo - hi <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
    lo = hi;
  }
}

inline double interpolate(double lo, double hi, double t) { return std::clamp((1.0 - t) * lo + t * hi, lo, hi); }

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace detail

/// Interval of the first coordinate p, independent of psi.
[[nodiscard]] inline Interval p_range(const GainBounds& b, const ParamConfig& cfg) {
  const double b2u = b.upper.damping;
  const double lo = std::max(cfg.epsilon, b.lower.rel_velocity);
  const double hi = std::min({b.upper.rel_velocity, b2u - cfg.epsilon,
                              detail::clipped_sqrt(b2u * b2u - 2.0 * b.lower.stiffness, b2u * b2u)});
  return {lo, hi};
}

/// Validate bounds: positivity, ordering, and the necessary conditions
///   k3u >= eps,  k2u >= max{2 eps, k3l + eps, sqrt(k3l^2 + 2 k1l)}.
/// Throws InfeasibleBoundsError naming the first violated condition.
inline void check_bounds(const GainBounds& b, const ParamConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto lo = b.lower.as_array();
  const auto hi = b.upper.as_array();
  static constexpr std::array<const char*, 3> names{"b1", "b2", "b3"};
  for (int i = 0; i < 3; ++i) {
    if (!(lo[i] > 0.0)) {
      throw InfeasibleBoundsError(std::string("lower bound on ") + names[i] + " must be positive (got " +
                                  detail::fmt(lo[i]) + ")");
    }
    if (!(lo[i] <= hi[i])) {
      throw InfeasibleBoundsError(std::string("lower bound on ") + names[i] + " exceeds its upper bound (" +
                                  detail::fmt(lo[i]) + " > " + detail::fmt(hi[i]) + ")");
    }
  }
  const double eps = cfg.epsilon;
  const double b1l = b.lower.stiffness, b3l = b.lower.rel_velocity;
  const double b2u = b.upper.damping, b3u = b.upper.rel_velocity;
  if (!(b3u >= eps)) {
    throw InfeasibleBoundsError("necessary condition b3u >= eps violated (b3u = " + detail::fmt(b3u) + ")");
  }
  if (!(b2u >= 2.0 * eps)) {
    throw InfeasibleBoundsError("necessary condition b2u >= 2 eps violated (b2u = " + detail::fmt(b2u) + ")");
  }
  if (!(b2u >= b3l + eps)) {
    throw InfeasibleBoundsError("necessary condition b2u >= b3l + eps violated (b2u = " + detail::fmt(b2u) +
                                ", b3l = " + detail::fmt(b3l) + ")");
  }
  const double need = std::sqrt(b3l * b3l + 2.0 * b1l);
  if (b2u < need && need - b2u > 8.0 * std::numeric_limits<double>::epsilon() * need) {
    throw InfeasibleBoundsError("necessary condition b2u >= sqrt(b3l^2 + 2 b1l) violated (b2u = " + detail::fmt(b2u) +
                                ", sqrt(b3l^2 + 2 b1l) = " + detail::fmt(need) + ")");
  }
  const Interval pr = p_range(b, cfg);
  if (pr.lo > pr.hi) {
    throw InfeasibleBoundsError("empty range for p: max{eps, b3l} = " + detail::fmt(pr.lo) +
                                " > min{b3u, b2u - eps, sqrt(b2u^2 - 2 b1l)} = " + detail::fmt(pr.hi));
  }
}

/// (p, q, r) from box coordinates psi in [0,1]^3.
[[nodiscard]] inline PqrParams pqr_from_psi(const PsiParams& psi, const GainBounds& b, const ParamConfig& cfg) {
  for (double v : {psi.psi1, psi.psi2, psi.psi3}) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("pqr_from_psi: psi components must lie in [0, 1]");
  }
  check_bounds(b, cfg);
  const double eps = cfg.epsilon;
  const double b1l = b.lower.stiffness, b1u = b.upper.stiffness;
  const double b2l = b.lower.damping, b2u = b.upper.damping;

  const Interval pr = p_range(b, cfg);
  const double p = detail::interpolate(pr.lo, pr.hi, psi.psi1);

  double q_lo = std::max({eps, b2l - p, std::sqrt(p * p + 2.0 * b1l) - p});
  const double q_hi = b2u - p;
  detail::repair_rounding(q_lo, q_hi);
  if (q_lo > q_hi) {
    throw InfeasibleBoundsError("empty range for q at p = " + detail::fmt(p) + ": " + detail::fmt(q_lo) + " > " +
                                detail::fmt(q_hi));
  }
  const double q = detail::interpolate(q_lo, q_hi, psi.psi2);

  const double s = p * q + 0.5 * q * q;
  double r_lo = std::max(0.0, s - b1u);
  const double r_hi = std::max(0.0, s - b1l);
  detail::repair_rounding(r_lo, r_hi);
  if (r_lo > r_hi) {
    throw InfeasibleBoundsError("empty range for r at (p, q) = (" + detail::fmt(p) + ", " + detail::fmt(q) + ")");
  }
  const double r = detail::interpolate(r_lo, r_hi, psi.psi3);
  return {p, q, r};
}

/// Composition theta -> sigmoid -> psi -> (p, q, r) -> gains. The result
/// satisfies the driving constraints, Delta >= 0 and the box bounds; the last
/// step removes rounding drift (a few ulp) past the box or past Delta = 0.
[[nodiscard]] inline AvGains beta_from_theta(const ThetaParams& theta, const GainBounds& b, const ParamConfig& cfg) {
  const PsiParams psi{sigmoid(theta.theta1, cfg.zeta, cfg.sigmoid), sigmoid(theta.theta2, cfg.zeta, cfg.sigmoid),
                      sigmoid(theta.theta3, cfg.zeta, cfg.sigmoid)};
  const PqrParams pqr = pqr_from_psi(psi, b, cfg);
  AvGains g = beta_from_pqr(pqr);
  g.stiffness = std::clamp(g.stiffness, b.lower.stiffness, b.upper.stiffness);
  g.damping = std::clamp(g.damping, b.lower.damping, b.upper.damping);
  g.rel_velocity = std::clamp(g.rel_velocity, b.lower.rel_velocity, b.upper.rel_velocity);
  for (int i = 0; i < 64 && delta(g) < 0.0; ++i) {
    const double deficit = -delta(g);
    if (g.stiffness > b.lower.stiffness) {
      const double k1 = std::min(std::nextafter(g.stiffness, 0.0), g.stiffness - 0.5 * deficit);
      g.stiffness = std::max(b.lower.stiffness, k1);
    } else if (g.rel_velocity > b.lower.rel_velocity) {
      const double k3 = std::sqrt(std::max(0.0, g.rel_velocity * g.rel_velocity - deficit));
      g.rel_velocity = std::max(b.lower.rel_velocity, std::min(std::nextafter(g.rel_velocity, 0.0), k3));
    } else if (g.damping < b.upper.damping) {
      const double k2 = std::sqrt(g.damping * g.damping + deficit);
      g.damping = std::min(b.upper.damping, std::max(std::nextafter(g.damping, b.upper.damping), k2));
    } else {
      break;
    }
  }
  return g;
}

/// True when the gains lie in the closed box.
[[nodiscard]] inline bool in_box(const AvGains& g, const GainBounds& b) noexcept {
  return g.stiffness >= b.lower.stiffness && g.stiffness <= b.upper.stiffness && g.damping >= b.lower.damping &&
         g.damping <= b.upper.damping && g.rel_velocity >= b.lower.rel_velocity &&
         g.rel_velocity <= b.upper.rel_velocity;
}

}  // namespace ringstab
