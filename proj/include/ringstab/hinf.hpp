#pragma once

// Peak gain of K(s) = F(s)^h G(s)^a on the imaginary axis and the
// fleet-size route built on it: the fewest AVs for which ||K||_inf <= 1,
// found by integer bisection, then minimized over the gain parameterization.
//
// Work is done on the log scale, ln|K(i w)| = h D_hv(w) + a D_av(w), since
// |F|^400 over- or underflows long before the comparison with 1 is decided.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"
#include "ringstab/optimizer.hpp"
#include "ringstab/param.hpp"
#include "ringstab/penetration.hpp"

namespace ringstab {

/// F(s; hv)^hv_power * G(s; av)^av_power.
struct FactorProduct {
  HvParams hv;
  std::int64_t hv_power = 0;
  AvGains av;
  std::int64_t av_power = 0;
};

struct PeakGain {
  double value = 1.0;     // ||K||_inf
  double log_peak = 0.0;  // ln ||K||_inf
  // Peak frequency; empty when the supremum is the w -> 0+ limit |K(0)| = 1.
  std::optional<double> omega;
};

/// ln|K(i w)|.
[[nodiscard]] inline double log_gain(const FactorProduct& k, double w) {
  double g = 0.0;
  if (k.hv_power > 0) g += static_cast<double>(k.hv_power) * log_magnitude(k.hv, w);
  if (k.av_power > 0) g += static_cast<double>(k.av_power) * log_magnitude(k.av, w);
  return g;
}

/// sup_{w > 0} |K(i w)|. The supremum is at least |K(0)| = 1, and ln|K| can
/// only be positive below the largest sqrt(-Delta) among amplifying factors,
/// so the search is confined to that band: grid scan, then golden-section
/// refinement around every grid-local maximum.
[[nodiscard]] inline PeakGain hinf_norm(const FactorProduct& k, double tol = 1e-10) {
  if (k.hv_power < 0 || k.av_power < 0 || k.hv_power + k.av_power < 1) {
    throw DomainError("hinf_norm: exponents must be nonnegative with a positive sum");
  }
  if ((k.hv_power > 0 && !is_hurwitz(k.hv)) || (k.av_power > 0 && !is_hurwitz(k.av))) {
    throw DomainError("hinf_norm: factors must be Hurwitz");
  }
  double edge = 0.0;
  if (k.hv_power > 0 && delta(k.hv) < 0.0) edge = std::max(edge, std::sqrt(-delta(k.hv)));
  if (k.av_power > 0 && delta(k.av) < 0.0) edge = std::max(edge, std::sqrt(-delta(k.av)));

  PeakGain out;
  if (edge == 0.0) return out;

  const std::vector<double> grid = band_grid(edge, 4096);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = log_gain(k, grid[i]);

  constexpr double kInvPhi = 0.6180339887498949;
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double left = i > 0 ? vals[i - 1] : -std::numeric_limits<double>::infinity();
    const double right = i + 1 < grid.size() ? vals[i + 1] : -std::numeric_limits<double>::infinity();
    if (!(vals[i] >= left && vals[i] >= right) || vals[i] <= 0.0) continue;
    double a = i > 0 ? grid[i - 1] : 0.5 * grid[i];
    double b = i + 1 < grid.size() ? grid[i + 1] : 0.5 * (grid[i] + edge);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = log_gain(k, c);
    double fd = log_gain(k, d);
    const double stop = std::max(tol, 1e-15) * edge;
    for (int it = 0; it < 200 && b - a > stop; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kInvPhi * (b - a);
        fc = log_gain(k, c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kInvPhi * (b - a);
        fd = log_gain(k, d);
      }
    }
    double w = 0.5 * (a + b);
    double fw = log_gain(k, w);
    if (vals[i] > fw) {
      w = grid[i];
      fw = vals[i];
    }
    if (fw > best) {
      best = fw;
      out.omega = w;
    }
  }
  out.log_peak = best;
  out.value = std::exp(best);
  return out;
}

/// Log-peak values at or below this count as ||K||_inf <= 1 (rounding only).
inline constexpr double kLogPeakSlack = 1e-12;

/// Fewest AVs a >= 1 with ||F^n_hv G^a||_inf <= 1. The bracket grows by
/// doubling from 1 and is then bisected; J* is never consulted.
[[nodiscard]] inline std::int64_t v_star(const AvGains& av, const HvParams& hv, std::int64_t n_hv) {
  detail::require_worst_case(hv);
  detail::require_nonamplifying(av);
  if (n_hv < 1) throw DomainError("v_star: n_hv must be >= 1");
  auto feasible = [&](std::int64_t a) { return hinf_norm({hv, n_hv, av, a}).log_peak <= kLogPeakSlack; };

  if (feasible(1)) return 1;
  std::int64_t lo = 1;  // infeasible
  std::int64_t hi = 2;
  constexpr std::int64_t kCap = std::int64_t{1} << 40;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kCap) {
      throw ComputeError("v_star: no AV count up to 2^40 stabilizes " + std::to_string(n_hv) + " HVs");
    }
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

struct VStarResult {
  std::int64_t n_av = 0;
  AvGains gains;
  ThetaParams theta;
  int iterations = 0;
};

namespace detail {

// v_star plus a tie-break in [0, 1): the log-peak excess of the last
// infeasible count, squashed. Lexicographic in (v_star, excess), so it keeps
// the integer order while giving the simplex a slope on every plateau.
inline double v_star_surrogate(const AvGains& av, const HvParams& hv, std::int64_t n_hv) {
  const std::int64_t v = v_star(av, hv, n_hv);
  if (v == 1) return 1.0;
  const double excess = std::max(0.0, hinf_norm({hv, n_hv, av, v - 1}).log_peak);
  return static_cast<double>(v) + excess / (1.0 + excess);
}

}  // namespace detail

/// min over theta of v_star(beta(theta), n_hv).
[[nodiscard]] inline VStarResult v_star_star(const HvParams& hv, const GainBounds& bounds, std::int64_t n_hv,
                                             const SimplexConfig& cfg = {}, const ParamConfig& pcfg = {},
                                             const ThetaParams& theta0 = {}) {
  detail::require_worst_case(hv);
  check_bounds(bounds, pcfg);
  if (n_hv < 1) throw DomainError("v_star_star: n_hv must be >= 1");

  auto objective = [&](std::span<const double> x) {
    return detail::v_star_surrogate(beta_from_theta({x[0], x[1], x[2]}, bounds, pcfg), hv, n_hv);
  };
  const auto start = theta0.as_array();
  const SimplexResult sr = nelder_mead(objective, start, cfg);

  VStarResult out;
  out.theta = {sr.x[0], sr.x[1], sr.x[2]};
  out.gains = beta_from_theta(out.theta, bounds, pcfg);
  out.n_av = v_star(out.gains, hv, n_hv);
  out.iterations = sr.iterations;
  return out;
}

}  // namespace ringstab
