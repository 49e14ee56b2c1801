#pragma once

// Whole-ring analysis of a mixed platoon: eigenmodes of
//   F(s)^(n-m) G(s)^m = 1,
// eigenmode-based string stability, fixed-step simulation of the linearized
// ring, and the window-product conservatism measure with greedy AV placement.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"
#include "ringstab/hinf.hpp"

namespace ringstab {

using Complex = std::complex<double>;

/// Ring composition. Vehicle j + 1 leads vehicle j; vehicle n + 1 is vehicle 1.
/// AV indices are 1-based.
struct PlatoonConfig {
  int n = 0;
  std::vector<int> av_indices;
  HvParams hv;
  AvGains av;

  [[nodiscard]] int m() const noexcept { return static_cast<int>(av_indices.size()); }

  [[nodiscard]] std::vector<bool> av_mask() const {
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    for (int j : av_indices) mask[static_cast<std::size_t>(j - 1)] = true;
    return mask;
  }

  void validate() const {
    if (n < 1) throw DomainError("platoon: n must be >= 1");
    std::set<int> seen;
    for (int j : av_indices) {
      if (j < 1 || j > n) throw DomainError("platoon: AV index " + std::to_string(j) + " outside 1.." + std::to_string(n));
      if (!seen.insert(j).second) throw DomainError("platoon: duplicate AV index " + std::to_string(j));
    }
  }
};

/// Contiguous placement {1, ..., m}.
[[nodiscard]] inline std::vector<int> contiguous_indices(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  std::iota(v.begin(), v.end(), 1);
  return v;
}

// ---------------------------------------------------------------------------
// Eigenmodes
// ---------------------------------------------------------------------------

struct EigenmodeSet {
  std::vector<Complex> roots;  // 2n values
  double max_residual = 0.0;   // max residual over roots (see eigenmodes)
  double max_real_part = 0.0;
};

namespace detail {

// e^z - 1 without cancellation for small z; Im z reduced modulo 2 pi first.
inline Complex expm1(Complex z) {
  const double x = z.real();
  const double y = std::remainder(z.imag(), 2.0 * std::numbers::pi);
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

struct RingCharacteristic {
  HvParams hv;
  AvGains av;
  double n_hv = 0.0;
  double n_av = 0.0;

  // ln R(s) for R = F^(n-m) G^m (any branch; only exp(ln R) matters).
  [[nodiscard]] Complex log_r(Complex s) const {
    Complex acc{0.0, 0.0};
    if (n_hv > 0) {
      acc += n_hv * (std::log(hv.rel_velocity * s + hv.stiffness) - std::log(s * s + hv.damping * s + hv.stiffness));
    }
    if (n_av > 0) {
      acc += n_av * (std::log(av.rel_velocity * s + av.stiffness) - std::log(s * s + av.damping * s + av.stiffness));
    }
    return acc;
  }

  // True when rounding s to a double already moves ln R by more than
  // 1e-10, which happens very close to a pole or a zero of F or G.
  [[nodiscard]] bool ill_conditioned(Complex s) const {
    const double scale = std::max(std::abs(s), std::numeric_limits<double>::min());
    const double shift = std::numeric_limits<double>::epsilon() * scale * std::abs(log_r_derivative(s));
    return !(shift <= 1e-10);
  }

  // |R(s) - 1|. A root can sit far nearer a pole or zero of F or G than
  // double resolution allows R to be evaluated meaningfully (a factor whose
  // pole is almost cancelled by the rest of the ring); there the distance to
  // the nearest root is reported instead.
  [[nodiscard]] double residual(Complex s) const {
    if (!ill_conditioned(s)) return std::abs(expm1(log_r(s)));
    const double d = repeated_zero_distance(s);
    return std::isnan(d) ? std::abs(newton_ratio(s)) : d;
  }

  // At an exact zero of a factor X that appears k >= 2 times, P = X^k Rest - Other
  // and the k roots nearest s lie at distance (|Other| / |Rest|)^(1/k) / |X'|.
  // NaN when s is not on such a zero.
  [[nodiscard]] double repeated_zero_distance(Complex s) const {
    const Complex zero{0.0, 0.0};
    const Complex qa = s * s + hv.damping * s + hv.stiffness;
    const Complex qb = s * s + av.damping * s + av.stiffness;
    const Complex na = hv.rel_velocity * s + hv.stiffness;
    const Complex nb = av.rel_velocity * s + av.stiffness;
    auto log_abs = [](double c, Complex x) { return c > 0 ? c * std::log(std::abs(x)) : 0.0; };
    auto dist = [](double k, double ln_other, double ln_rest, double slope) {
      return std::exp((ln_other - ln_rest) / k) / slope;
    };
    const double ln_num = log_abs(n_hv, na) + log_abs(n_av, nb);
    const double ln_den = log_abs(n_hv, qa) + log_abs(n_av, qb);
    if (n_hv >= 2 && qa == zero) return dist(n_hv, ln_num, log_abs(n_av, qb), std::abs(2.0 * s + hv.damping));
    if (n_av >= 2 && qb == zero) return dist(n_av, ln_num, log_abs(n_hv, qa), std::abs(2.0 * s + av.damping));
    if (n_hv >= 2 && na == zero) return dist(n_hv, ln_den, log_abs(n_av, nb), hv.rel_velocity);
    if (n_av >= 2 && nb == zero) return dist(n_av, ln_den, log_abs(n_hv, na), av.rel_velocity);
    return std::numeric_limits<double>::quiet_NaN();
  }

  // P(s) / P'(s) for the monic degree-2n polynomial P = Num - Den, with
  // Num = NA^(n-m) NB^m and Den = A^(n-m) B^m, from the factored form:
  //   P'/P = (L_num R - L_den) / (R - 1),  R = Num / Den,
  // where L_num, L_den are the log-derivatives of Num and Den. When |R| > 1
  // numerator and denominator are divided by R so neither side blows up near
  // a pole of R; no large terms are ever subtracted.
  [[nodiscard]] Complex newton_ratio(Complex s) const {
    Complex l_den{0.0, 0.0};
    Complex l_num{0.0, 0.0};
    if (n_hv > 0) {
      l_den += n_hv * (2.0 * s + hv.damping) / (s * s + hv.damping * s + hv.stiffness);
      l_num += n_hv * hv.rel_velocity / (hv.rel_velocity * s + hv.stiffness);
    }
    if (n_av > 0) {
      l_den += n_av * (2.0 * s + av.damping) / (s * s + av.damping * s + av.stiffness);
      l_num += n_av * av.rel_velocity / (av.rel_velocity * s + av.stiffness);
    }
    const Complex lr = log_r(s);
    Complex ratio;
    if (lr.real() > 0.0) {
      const Complex rho = std::exp(-lr);  // 1 / R
      ratio = -expm1(-lr) / (l_num - l_den * rho);
    } else {
      const Complex r = std::exp(lr);
      ratio = expm1(lr) / (l_num * r - l_den);
    }
    if (std::isfinite(ratio.real()) && std::isfinite(ratio.imag())) return ratio;
    return newton_ratio_at_zero_factor(s);
  }

  // s rounds exactly onto a zero of one factor of Den or Num, where the
  // log form breaks down. With Den = 0, P = -Num and P'/Num = Den'/Num - L_num;
  // with Num = 0, P = Den and P'/Den = L_den - Num'/Den. The derivative of the
  // vanishing product keeps only the term that differentiates the zero factor,
  // and only when that factor appears once.
  [[nodiscard]] Complex newton_ratio_at_zero_factor(Complex s) const {
    const Complex zero{0.0, 0.0};
    const Complex qa = s * s + hv.damping * s + hv.stiffness;
    const Complex qb = s * s + av.damping * s + av.stiffness;
    const Complex na = hv.rel_velocity * s + hv.stiffness;
    const Complex nb = av.rel_velocity * s + av.stiffness;
    auto ln_pair = [&](Complex x, Complex y) {
      Complex acc = zero;
      if (n_hv > 0) acc += n_hv * std::log(x);
      if (n_av > 0) acc += n_av * std::log(y);
      return acc;
    };
    // d/ds of count * ln(x) summed over the two kinds, skipping zero factors.
    auto log_deriv = [&](Complex x, Complex dx, Complex y, Complex dy) {
      Complex acc = zero;
      if (n_hv > 0) acc += n_hv * dx / x;
      if (n_av > 0) acc += n_av * dy / y;
      return acc;
    };
    // Derivative of a vanishing product over the other product, for a zero
    // factor with count c and derivative d.
    auto lone_term = [&](double c, Complex d, Complex rest_log, Complex other_log) {
      return c == 1.0 ? d * std::exp(rest_log - other_log) : zero;
    };
    const Complex dqa = 2.0 * s + hv.damping, dqb = 2.0 * s + av.damping;
    if ((n_hv > 0 && qa == zero) || (n_av > 0 && qb == zero)) {
      const bool hv_hit = n_hv > 0 && qa == zero;
      const Complex ln_num = ln_pair(na, nb);
      const Complex rest = hv_hit ? (n_av > 0 ? n_av * std::log(qb) : zero) : (n_hv > 0 ? n_hv * std::log(qa) : zero);
      const Complex d_den = hv_hit ? lone_term(n_hv, dqa, rest, ln_num) : lone_term(n_av, dqb, rest, ln_num);
      return -1.0 / (d_den - log_deriv(na, hv.rel_velocity, nb, av.rel_velocity));
    }
    if ((n_hv > 0 && na == zero) || (n_av > 0 && nb == zero)) {
      const bool hv_hit = n_hv > 0 && na == zero;
      const Complex ln_den = ln_pair(qa, qb);
      const Complex rest = hv_hit ? (n_av > 0 ? n_av * std::log(nb) : zero) : (n_hv > 0 ? n_hv * std::log(na) : zero);
      const Complex d_num = hv_hit ? lone_term(n_hv, hv.rel_velocity, rest, ln_den)
                                   : lone_term(n_av, av.rel_velocity, rest, ln_den);
      return 1.0 / (log_deriv(qa, dqa, qb, dqb) - d_num);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }

  // d ln R / ds
  [[nodiscard]] Complex log_r_derivative(Complex s) const {
    Complex l_r{0.0, 0.0};
    if (n_hv > 0) {
      l_r += n_hv * (hv.rel_velocity / (hv.rel_velocity * s + hv.stiffness) -
                     (2.0 * s + hv.damping) / (s * s + hv.damping * s + hv.stiffness));
    }
    if (n_av > 0) {
      l_r += n_av * (av.rel_velocity / (av.rel_velocity * s + av.stiffness) -
                     (2.0 * s + av.damping) / (s * s + av.damping * s + av.stiffness));
    }
    return l_r;
  }
};

// Seeds: roots of F_eff(s) = exp(2 pi i k / n), k = 0..n-1, for the
// count-weighted average factor; two per branch, 2n in total.
inline std::vector<Complex> eigen_seeds(const PlatoonConfig& cfg) {
  const double n = cfg.n;
  const double wh = static_cast<double>(cfg.n - cfg.m()) / n;
  const double wa = static_cast<double>(cfg.m()) / n;
  const double k1 = wh * cfg.hv.stiffness + wa * cfg.av.stiffness;
  const double k2 = wh * cfg.hv.damping + wa * cfg.av.damping;
  const double k3 = wh * cfg.hv.rel_velocity + wa * cfg.av.rel_velocity;
  std::vector<Complex> seeds;
  seeds.reserve(static_cast<std::size_t>(2 * cfg.n));
  for (int k = 0; k < cfg.n; ++k) {
    const Complex c = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    const Complex b = k2 - c * k3;
    const Complex q = k1 * (1.0 - c);
    const Complex disc = std::sqrt(b * b - 4.0 * q);
    seeds.push_back(0.5 * (-b + disc));
    seeds.push_back(0.5 * (-b - disc));
  }
  // Aberth needs pairwise distinct starting points.
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(seeds[i] - seeds[j]) < 1e-10) {
        seeds[i] += Complex{1e-7 * static_cast<double>(i % 7 + 1), 1e-7 * static_cast<double>(i % 5 + 1)};
      }
    }
  }
  return seeds;
}

}  // namespace detail

/// All 2n eigenmodes by Aberth-Ehrlich simultaneous iteration on the
/// characteristic polynomial, evaluated through its factored form (the
/// expanded coefficients are never formed). Seeds come from the branch
/// equations of an averaged factor. Throws ComputeError listing the root
/// indices whose residual stays above `tol`; the residual is |F^(n-m) G^m - 1|
/// except right beside a zero of F or G, where it is the distance to the root.
[[nodiscard]] inline EigenmodeSet eigenmodes(const PlatoonConfig& cfg, double tol = 1e-8) {
  cfg.validate();
  if (!is_hurwitz(cfg.hv) || (cfg.m() > 0 && !is_hurwitz(cfg.av))) {
    throw DomainError("eigenmodes: factors must be Hurwitz");
  }
  const detail::RingCharacteristic ch{cfg.hv, cfg.av, static_cast<double>(cfg.n - cfg.m()),
                                      static_cast<double>(cfg.m())};
  std::vector<Complex> z = detail::eigen_seeds(cfg);
  const std::size_t deg = z.size();
  std::vector<bool> done(deg, false);

  for (int iter = 0; iter < 5000; ++iter) {
    bool all_done = true;
    for (std::size_t k = 0; k < deg; ++k) {
      if (done[k]) continue;
      const Complex ratio = ch.newton_ratio(z[k]);
      Complex sum{0.0, 0.0};
      for (std::size_t j = 0; j < deg; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      Complex w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
        w = Complex{1e-6, 1e-6};  // landed on a singular point; nudge off it
      }
      z[k] -= w;
      if (std::abs(w) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(z[k]), 1e-3)) {
        done[k] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }

  // Newton polish on ln R - 2 pi i k, which is well conditioned near a root.
  for (auto& s : z) {
    for (int it = 0; it < 3; ++it) {
      const Complex lr = ch.log_r(s);
      const double turns = std::round(lr.imag() / (2.0 * std::numbers::pi));
      const Complex phi = lr - Complex{0.0, 2.0 * std::numbers::pi * turns};
      const Complex step = phi / ch.log_r_derivative(s);
      const Complex cand = s - step;
      if (!(std::isfinite(cand.real()) && std::isfinite(cand.imag())) || ch.residual(cand) >= ch.residual(s)) break;
      s = cand;
    }
  }

  EigenmodeSet out;
  out.roots = std::move(z);
  out.max_real_part = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < deg; ++k) {
    const double r = ch.residual(out.roots[k]);
    out.max_residual = std::max(out.max_residual, r);
    out.max_real_part = std::max(out.max_real_part, out.roots[k].real());
    if (!(r <= tol)) bad.push_back(k);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "eigenmodes: " << bad.size() << " root(s) did not converge to residual " << tol << "; indices:";
    for (std::size_t k : bad) os << ' ' << k;
    throw ComputeError(os.str());
  }
  std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return out;
}

/// Real-part threshold separating unstable modes from the structural s = 0
/// mode and numerical noise.
inline constexpr double kUnstableRealPart = 1e-6;

[[nodiscard]] inline std::size_t count_unstable(const EigenmodeSet& modes, double tol = kUnstableRealPart) {
  return static_cast<std::size_t>(
      std::count_if(modes.roots.begin(), modes.roots.end(), [tol](Complex s) { return s.real() > tol; }));
}

/// All eigenmodes in the closed left half plane (up to tol).
[[nodiscard]] inline bool string_stable(const EigenmodeSet& modes, double tol = kUnstableRealPart) {
  return modes.max_real_part <= tol;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct RingState {
  std::vector<double> y;  // position deviations (m)
  std::vector<double> u;  // velocity deviations (m/s)
};

/// Zero state except y_vehicle(0) = magnitude (vehicle is 1-based).
[[nodiscard]] inline RingState single_perturbation(int n, int vehicle, double magnitude = 1.0) {
  if (vehicle < 1 || vehicle > n) throw DomainError("single_perturbation: vehicle index out of range");
  RingState s{std::vector<double>(static_cast<std::size_t>(n), 0.0), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  s.y[static_cast<std::size_t>(vehicle - 1)] = magnitude;
  return s;
}

struct TrajectoryRecord {
  std::vector<double> time;
  std::vector<std::vector<double>> y;  // y[vehicle][sample]
  std::vector<std::vector<double>> u;
};

/// Classic fixed-step RK4 integration of the linearized ring. Samples are
/// stored every `record_every` steps (t = 0 always included).
[[nodiscard]] inline TrajectoryRecord simulate(const PlatoonConfig& cfg, const RingState& initial, double horizon,
                                               double dt, int record_every = 1) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n);
  if (!(dt > 0.0) || !(horizon >= dt)) throw DomainError("simulate: need dt > 0 and horizon >= dt");
  if (record_every < 1) throw DomainError("simulate: record_every must be >= 1");
  if (initial.y.size() != n || initial.u.size() != n) throw DomainError("simulate: initial state has wrong size");

  const std::vector<bool> mask = cfg.av_mask();
  std::vector<double> c1(n), c2(n), c3(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = mask[j] ? cfg.av.as_array() : cfg.hv.as_array();
    c1[j] = p[0];
    c2[j] = p[1];
    c3[j] = p[2];
  }

  // state layout: [y_0..y_{n-1}, u_0..u_{n-1}]
  auto deriv = [&](const std::vector<double>& x, std::vector<double>& dx) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lead = (j + 1) % n;
      dx[j] = x[n + j];
      dx[n + j] = c1[j] * (x[lead] - x[j]) + c3[j] * x[n + lead] - c2[j] * x[n + j];
    }
  };

  std::vector<double> x(2 * n), k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), w(2 * n);
  std::copy(initial.y.begin(), initial.y.end(), x.begin());
  std::copy(initial.u.begin(), initial.u.end(), x.begin() + static_cast<std::ptrdiff_t>(n));

  const auto steps = static_cast<std::int64_t>(std::llround(horizon / dt));
  TrajectoryRecord rec;
  rec.y.assign(n, {});
  rec.u.assign(n, {});
  auto record = [&](double t) {
    rec.time.push_back(t);
    for (std::size_t j = 0; j < n; ++j) {
      rec.y[j].push_back(x[j]);
      rec.u[j].push_back(x[n + j]);
    }
  };
  record(0.0);

  for (std::int64_t step = 1; step <= steps; ++step) {
    deriv(x, k1);
    for (std::size_t i = 0; i < 2 * n; ++i) w[i] = x[i] + 0.5 * dt * k1[i];
    deriv(w, k2);
    for (std::size_t i = 0; i < 2 * n; ++i) w[i] = x[i] + 0.5 * dt * k2[i];
    deriv(w, k3);
    for (std::size_t i = 0; i < 2 * n; ++i) w[i] = x[i] + dt * k3[i];
    deriv(w, k4);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(x[i])) {
        throw ComputeError("simulate: non-finite state at step " + std::to_string(step));
      }
    }
    if (step % record_every == 0 || step == steps) record(static_cast<double>(step) * dt);
  }
  return rec;
}

/// max_j |y_j - mean(y)| at sample k: oscillation about the uniform shift the
/// ring settles to.
[[nodiscard]] inline double spread_at(const TrajectoryRecord& rec, std::size_t sample) {
  double mean = 0.0;
  for (const auto& yj : rec.y) mean += yj[sample];
  mean /= static_cast<double>(rec.y.size());
  double s = 0.0;
  for (const auto& yj : rec.y) s = std::max(s, std::abs(yj[sample] - mean));
  return s;
}

/// Largest spread_at over the recorded samples with t0 <= t < t1.
[[nodiscard]] inline double spread_envelope(const TrajectoryRecord& rec, double t0, double t1) {
  double s = 0.0;
  for (std::size_t k = 0; k < rec.time.size(); ++k) {
    if (rec.time[k] >= t0 && rec.time[k] < t1) s = std::max(s, spread_at(rec, k));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Conservatism measure and placement
// ---------------------------------------------------------------------------

/// Sum over window lengths 2..n-1 and start positions of the peak gain of the
/// window's factor product. A window's peak depends only on how many HV and
/// AV factors it contains, so norms are memoized per (h, a).
class ChiEvaluator {
 public:
  ChiEvaluator(int n, HvParams hv, AvGains av) : n_(n), hv_(hv), av_(av) {
    if (n < 3) throw DomainError("chi: n must be >= 3");
  }

  [[nodiscard]] double window_norm(std::int64_t h, std::int64_t a) {
    const auto key = std::make_pair(h, a);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double v = hinf_norm({hv_, h, av_, a}).value;
    memo_.emplace(key, v);
    return v;
  }

  [[nodiscard]] double operator()(const std::vector<int>& av_indices) {
    const auto n = static_cast<std::size_t>(n_);
    // prefix[i] = AVs among positions 0..i-1 of the doubled ring
    std::vector<int> prefix(2 * n + 1, 0);
    std::vector<bool> mask(n, false);
    for (int j : av_indices) {
      if (j < 1 || j > n_) throw DomainError("chi: AV index out of range");
      mask[static_cast<std::size_t>(j - 1)] = true;
    }
    for (std::size_t i = 0; i < 2 * n; ++i) prefix[i + 1] = prefix[i] + (mask[i % n] ? 1 : 0);
    double total = 0.0;
    for (std::size_t len = 2; len + 1 <= n; ++len) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t a = prefix[i + len] - prefix[i];
        total += window_norm(static_cast<std::int64_t>(len) - a, a);
      }
    }
    return total;
  }

  [[nodiscard]] std::size_t memo_size() const noexcept { return memo_.size(); }

 private:
  int n_;
  HvParams hv_;
  AvGains av_;
  std::map<std::pair<std::int64_t, std::int64_t>, double> memo_;
};

[[nodiscard]] inline double chi(const PlatoonConfig& cfg) {
  cfg.validate();
  ChiEvaluator eval(cfg.n, cfg.hv, cfg.av);
  return eval(cfg.av_indices);
}

/// Rotation of the index set that contains 1 and is lexicographically smallest.
[[nodiscard]] inline std::vector<int> canonical_rotation(const std::vector<int>& idx, int n) {
  if (idx.empty()) return {};
  std::vector<int> best;
  for (int pivot : idx) {
    std::vector<int> rot;
    rot.reserve(idx.size());
    for (int j : idx) rot.push_back(((j - pivot) % n + n) % n + 1);
    std::sort(rot.begin(), rot.end());
    if (best.empty() || rot < best) best = std::move(rot);
  }
  return best;
}

/// Sequential insertion: m times, add the free index that minimizes chi of
/// the enlarged set (lowest index on ties within 1e-12 relative), then rotate
/// so that vehicle 1 is an AV.
[[nodiscard]] inline std::vector<int> greedy_placement(int n, int m, const HvParams& hv, const AvGains& av) {
  if (m < 1 || m >= n) throw DomainError("greedy_placement: need 1 <= m < n");
  ChiEvaluator eval(n, hv, av);
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
  for (int step = 0; step < m; ++step) {
    int best_idx = -1;
    double best_val = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      std::vector<int> cand = chosen;
      cand.push_back(j);
      const double v = eval(cand);
      if (best_idx < 0 || v < best_val * (1.0 - 1e-12)) {
        best_idx = j;
        best_val = v;
      }
    }
    chosen.push_back(best_idx);
    used[static_cast<std::size_t>(best_idx)] = true;
  }
  return canonical_rotation(chosen, n);
}

}  // namespace ringstab
