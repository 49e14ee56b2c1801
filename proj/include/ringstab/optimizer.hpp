#pragma once

// Nelder-Mead simplex search and the optimal penetration-bound procedure:
// maximize J*(beta(theta)) over theta in R^3, then report 1 / (J** + 1).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"
#include "ringstab/param.hpp"
#include "ringstab/penetration.hpp"

namespace ringstab {

struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int max_iterations = 0;  // 0 -> 2000 * dimension
  double x_tolerance = 1e-10;
  double f_tolerance = 1e-10;
  double initial_step = 0.05;  // relative perturbation of nonzero coordinates
  double zero_step = 0.00025;  // absolute perturbation of zero coordinates

  void validate() const {
    if (!(reflection > 0.0)) throw DomainError("simplex: reflection must be > 0");
    if (!(expansion > 1.0)) throw DomainError("simplex: expansion must be > 1");
    if (!(contraction > 0.0 && contraction < 1.0)) throw DomainError("simplex: contraction must be in (0, 1)");
    if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("simplex: shrink must be in (0, 1)");
    if (!(x_tolerance > 0.0 && f_tolerance > 0.0)) throw DomainError("simplex: tolerances must be > 0");
    if (max_iterations < 0) throw DomainError("simplex: max_iterations must be >= 0");
  }
};

struct SimplexResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> trace;  // best objective after each iteration
};

/// Minimize `objective` from `x0`. Non-finite objective values other than at
/// the start are treated as +inf, so infeasible points can return a sentinel.
template <class Objective>
[[nodiscard]] SimplexResult nelder_mead(Objective&& objective, std::span<const double> x0,
                                        const SimplexConfig& cfg = {}) {
  cfg.validate();
  const std::size_t d = x0.size();
  if (d == 0) throw DomainError("nelder_mead: dimension must be >= 1");
  const int max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : static_cast<int>(2000 * d);

  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = objective(std::span<const double>(x));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> v(d + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> f(d + 1);
  {
    ++res.evaluations;
    const double f0 = objective(x0);
    if (std::isnan(f0)) throw ComputeError("nelder_mead: objective is NaN at the starting point");
    f[0] = f0;
  }
  for (std::size_t i = 0; i < d; ++i) {
    auto& y = v[i + 1];
    y[i] = y[i] != 0.0 ? (1.0 + cfg.initial_step) * y[i] : cfg.zero_step;
    f[i + 1] = eval(y);
  }

  std::vector<std::size_t> order(d + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> v2(d + 1);
    std::vector<double> f2(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      v2[i] = std::move(v[order[i]]);
      f2[i] = f[order[i]];
    }
    v = std::move(v2);
    f = std::move(f2);
  };
  sort_simplex();

  auto affine = [d](const std::vector<double>& a, const std::vector<double>& b, double t) {
    // a + t (a - b)
    std::vector<double> out(d);
    for (std::size_t k = 0; k < d; ++k) out[k] = a[k] + t * (a[k] - b[k]);
    return out;
  };

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    double f_spread = 0.0;
    double x_spread = 0.0;
    for (std::size_t i = 1; i <= d; ++i) {
      f_spread = std::max(f_spread, std::abs(f[i] - f[0]));
      for (std::size_t k = 0; k < d; ++k) x_spread = std::max(x_spread, std::abs(v[i][k] - v[0][k]));
    }
    if (f_spread <= cfg.f_tolerance && x_spread <= cfg.x_tolerance) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) centroid[k] += v[i][k];
    }
    for (auto& c : centroid) c /= static_cast<double>(d);

    const auto& worst = v[d];
    auto xr = affine(centroid, worst, cfg.reflection);
    const double fr = eval(xr);

    bool do_shrink = false;
    if (fr < f[0]) {
      auto xe = affine(centroid, worst, cfg.reflection * cfg.expansion);
      const double fe = eval(xe);
      if (fe < fr) {
        v[d] = std::move(xe);
        f[d] = fe;
      } else {
        v[d] = std::move(xr);
        f[d] = fr;
      }
    } else if (fr < f[d - 1]) {
      v[d] = std::move(xr);
      f[d] = fr;
    } else if (fr < f[d]) {
      auto xc = affine(centroid, worst, cfg.reflection * cfg.contraction);
      const double fc = eval(xc);
      if (fc <= fr) {
        v[d] = std::move(xc);
        f[d] = fc;
      } else {
        do_shrink = true;
      }
    } else {
      auto xcc = affine(centroid, worst, -cfg.contraction);
      const double fcc = eval(xcc);
      if (fcc < f[d]) {
        v[d] = std::move(xcc);
        f[d] = fcc;
      } else {
        do_shrink = true;
      }
    }
    if (do_shrink) {
      for (std::size_t i = 1; i <= d; ++i) {
        for (std::size_t k = 0; k < d; ++k) v[i][k] = v[0][k] + cfg.shrink * (v[i][k] - v[0][k]);
        f[i] = eval(v[i]);
      }
    }
    sort_simplex();
    res.trace.push_back(f[0]);
  }
  res.iterations = iter;
  res.x = v[0];
  res.f = f[0];
  return res;
}

/// Maximization through the negated objective; the returned f is the maximum.
template <class Objective>
[[nodiscard]] SimplexResult nelder_mead_maximize(Objective&& objective, std::span<const double> x0,
                                                 const SimplexConfig& cfg = {}) {
  auto neg = [&](std::span<const double> x) { return -objective(x); };
  SimplexResult r = nelder_mead(neg, x0, cfg);
  r.f = -r.f;
  for (auto& t : r.trace) t = -t;
  return r;
}

struct BoundReport {
  ThetaParams theta_star;
  AvGains beta_star;
  double j_star_star = 0.0;
  double gamma_lower = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// J*(beta(theta)) as a function of the unconstrained coordinates.
[[nodiscard]] inline double margin_of_theta(const ThetaParams& theta, const HvParams& hv, const GainBounds& bounds,
                                            const ParamConfig& pcfg) {
  return j_star(beta_from_theta(theta, bounds, pcfg), hv).j_star;
}

/// Optimal lower bound on the AV penetration rate: maximize J*(beta(theta))
/// from theta0 and report the maximizer, J** and 1 / (J** + 1).
[[nodiscard]] inline BoundReport procedure_lbf(const HvParams& hv, const GainBounds& bounds,
                                               const SimplexConfig& cfg = {}, const ParamConfig& pcfg = {},
                                               const ThetaParams& theta0 = {}) {
  detail::require_worst_case(hv);
  check_bounds(bounds, pcfg);

  auto objective = [&](std::span<const double> x) {
    return margin_of_theta({x[0], x[1], x[2]}, hv, bounds, pcfg);
  };
  const auto start = theta0.as_array();
  const SimplexResult sr = nelder_mead_maximize(objective, start, cfg);

  BoundReport rep;
  rep.theta_star = {sr.x[0], sr.x[1], sr.x[2]};
  rep.beta_star = beta_from_theta(rep.theta_star, bounds, pcfg);
  rep.j_star_star = j_star(rep.beta_star, hv).j_star;
  if (!(rep.j_star_star > 0.0)) {
    throw ComputeError("procedure_lbf: optimal margin is not positive; no finite AV count stabilizes the ring");
  }
  rep.gamma_lower = gamma_lower_bound(rep.j_star_star);
  rep.iterations = sr.iterations;
  rep.converged = sr.converged;
  return rep;
}

/// Deterministic starting points: the {-5, 0, 5}^3 lattice (origin first).
[[nodiscard]] inline std::vector<ThetaParams> multistart_lattice(double spread = 5.0) {
  std::vector<ThetaParams> pts{{0.0, 0.0, 0.0}};
  const std::array<double, 3> vals{-spread, 0.0, spread};
  for (double a : vals) {
    for (double b : vals) {
      for (double c : vals) {
        if (a == 0.0 && b == 0.0 && c == 0.0) continue;
        pts.push_back({a, b, c});
      }
    }
  }
  return pts;
}

/// Best procedure_lbf report over several starting points (ties keep the earliest).
[[nodiscard]] inline BoundReport procedure_lbf_multistart(const HvParams& hv, const GainBounds& bounds,
                                                          const SimplexConfig& cfg, const ParamConfig& pcfg,
                                                          const std::vector<ThetaParams>& starts) {
  if (starts.empty()) throw DomainError("procedure_lbf_multistart: no starting points");
  BoundReport best = procedure_lbf(hv, bounds, cfg, pcfg, starts.front());
  for (std::size_t i = 1; i < starts.size(); ++i) {
    BoundReport r = procedure_lbf(hv, bounds, cfg, pcfg, starts[i]);
    if (r.j_star_star > best.j_star_star) best = r;
  }
  return best;
}

}  // namespace ringstab
