#pragma once

// Margin functional J(w) = -D_av(w) / D_hv(w) over the HV amplification band,
// its infimum J*, and the penetration-rate / fleet-size bounds it induces.
//
// For a ring with h HVs and a AVs, stability of the averaged magnitude
// condition (1 - g) D_hv + g D_av <= 0 with g = a / (h + a) holds iff the AV
// factor never amplifies and g >= 1 / (J* + 1).

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"

namespace ringstab {

struct MarginResult {
  double j_star = 0.0;
  // Minimizing frequency; empty when the infimum is the w -> 0+ limit.
  std::optional<double> argmin_omega;
  double limit_at_zero = 0.0;
  std::vector<std::pair<double, double>> critical_points;  // interior local minima (w, J(w))
};

struct FleetBounds {
  double gamma_lower = 0.0;
  std::int64_t n_hv = 0;
  std::int64_t min_avs = 0;  // ceil(n_hv / J**)
  std::int64_t n_av = 0;
  std::int64_t max_hvs = 0;  // floor(J** n_av)
};

namespace detail {

inline void require_worst_case(const HvParams& hv) {
  if (!(delta(hv) < 0.0)) {
    throw NotWorstCaseError("HV factor never amplifies (Delta_hv = " + std::to_string(delta(hv)) +
                            " >= 0); string stability holds without AVs");
  }
}

inline void require_nonamplifying(const AvGains& av) {
  if (delta(av) < -delta_slack(av)) {
    throw DomainError("AV gains amplify some frequency (Delta_av = " + std::to_string(delta(av)) + " < 0)");
  }
}

// Below this fraction of the band edge the ratio is replaced by its limit.
inline constexpr double kSmallOmegaFraction = 1e-6;

// Sign of dJ/dw: sign(D_av D_hv' - D_av' D_hv).
inline double margin_slope_sign_fn(const AvGains& av, const HvParams& hv, double w) {
  return log_magnitude(av, w) * log_magnitude_derivative(hv, w) -
         log_magnitude_derivative(av, w) * log_magnitude(hv, w);
}

}  // namespace detail

/// lim_{w->0+} J(w) = k1_hv^2 / (-Delta_hv) * Delta_av / k1_av^2.
[[nodiscard]] inline double margin_limit_at_zero(const AvGains& av, const HvParams& hv) {
  detail::require_worst_case(hv);
  return hv.stiffness * hv.stiffness / (-delta(hv)) * delta(av) / (av.stiffness * av.stiffness);
}

/// J(w) = -D_av(w) / D_hv(w) for w strictly inside the HV amplification band.
[[nodiscard]] inline double j_ratio(double omega, const AvGains& av, const HvParams& hv) {
  detail::require_worst_case(hv);
  detail::require_nonamplifying(av);
  const Interval band = unstable_band(hv);
  if (!band.contains(omega)) {
    throw DomainError("j_ratio: omega = " + std::to_string(omega) + " outside (0, " + std::to_string(band.hi) + ")");
  }
  if (omega < detail::kSmallOmegaFraction * band.hi) return margin_limit_at_zero(av, hv);
  return -log_magnitude(av, omega) / log_magnitude(hv, omega);
}

/// Infimum of J over the HV amplification band: the minimum of the w -> 0+
/// limit and J at every interior local minimum. Local minima are bracketed by
/// sign changes of dJ/dw on an end-clustered grid, then bisected.
[[nodiscard]] inline MarginResult j_star(const AvGains& av, const HvParams& hv, double tol = 1e-9) {
  detail::require_worst_case(hv);
  detail::require_nonamplifying(av);
  const double edge = unstable_band(hv).hi;

  MarginResult out;
  out.limit_at_zero = margin_limit_at_zero(av, hv);
  out.j_star = out.limit_at_zero;

  const std::vector<double> grid = band_grid(edge, 4096);
  auto slope = [&](double w) { return detail::margin_slope_sign_fn(av, hv, w); };

  double w_prev = grid.front();
  double s_prev = slope(w_prev);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double w = grid[i];
    const double s = slope(w);
    if (s_prev < 0.0 && s >= 0.0) {
      double lo = w_prev;
      double hi = w;
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
        const double jl = j_ratio(lo, av, hv);
        const double jh = j_ratio(hi, av, hv);
        if (std::abs(jl - jh) <= tol * std::abs(jh)) break;
      }
      const double wc = 0.5 * (lo + hi);
      const double jc = j_ratio(wc, av, hv);
      out.critical_points.emplace_back(wc, jc);
      if (jc < out.j_star) {
        out.j_star = jc;
        out.argmin_omega = wc;
      }
    }
    w_prev = w;
    s_prev = s;
  }
  return out;
}

/// gamma >= 1 / (J** + 1).
[[nodiscard]] inline double gamma_lower_bound(double j_star_star) {
  if (!(j_star_star > 0.0)) {
    throw DomainError("gamma_lower_bound: margin must be positive, got " + std::to_string(j_star_star));
  }
  return 1.0 / (j_star_star + 1.0);
}

// ceil(n_hv / J**): fewest AVs that can stabilize n_hv HVs.
[[nodiscard]] inline std::int64_t min_avs_for(double j_star_star, std::int64_t n_hv) {
  if (!(j_star_star > 0.0)) throw DomainError("min_avs_for: margin must be positive");
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(n_hv) / j_star_star));
}

// floor(J** n_av): most HVs that n_av AVs can stabilize.
[[nodiscard]] inline std::int64_t max_hvs_for(double j_star_star, std::int64_t n_av) {
  if (!(j_star_star > 0.0)) throw DomainError("max_hvs_for: margin must be positive");
  return static_cast<std::int64_t>(std::floor(j_star_star * static_cast<double>(n_av)));
}

[[nodiscard]] inline FleetBounds fleet_bounds(double j_star_star, std::int64_t n_hv, std::int64_t n_av) {
  if (n_hv < 1 || n_av < 1) throw DomainError("fleet_bounds: vehicle counts must be >= 1");
  FleetBounds fb;
  fb.gamma_lower = gamma_lower_bound(j_star_star);
  fb.n_hv = n_hv;
  fb.min_avs = min_avs_for(j_star_star, n_hv);
  fb.n_av = n_av;
  fb.max_hvs = max_hvs_for(j_star_star, n_av);
  return fb;
}

}  // namespace ringstab
