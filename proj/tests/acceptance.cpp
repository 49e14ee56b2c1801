// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ringstab/hinf.hpp"
#include "ringstab/optimizer.hpp"
#include "ringstab/param.hpp"
#include "ringstab/penetration.hpp"
#include "ringstab/platoon.hpp"

using namespace ringstab;

namespace {

const HvParams kHv{0.3 * std::numbers::pi, 1.5, 0.9};
const GainBounds kWideBounds{{0.01, 0.01, 0.01}, {2, 2, 2}};
const GainBounds kSecondBounds{{0.8, 0.8, 0.8}, {2, 2, 2}};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Results shared between criteria.
BoundReport g_wide;
BoundReport g_second;
EigenmodeSet g_one_av;

Outcome c1_wide_box_bound() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  g_wide = procedure_lbf(kHv, kWideBounds);
  const double dt = seconds_since(t0);
  o.note("J**=" + fmt("%.6f", g_wide.j_star_star) + " gamma=" + fmt("%.6f", g_wide.gamma_lower) +
         " beta*=(" + fmt("%.5f", g_wide.beta_star.stiffness) + "," + fmt("%.5f", g_wide.beta_star.damping) + "," +
         fmt("%.5f", g_wide.beta_star.rel_velocity) + ") t=" + fmt("%.2fs", dt));
  o.require(std::abs(g_wide.j_star_star - 184.9594) <= 0.01 * 184.9594, "J** within 1% of 184.9594");
  o.require(std::abs(g_wide.gamma_lower - 0.0054) <= 0.0002, "gamma within 0.0002 of 0.0054");
  o.require(dt < 10.0, "runtime < 10 s");
  return o;
}

Outcome c2_second_scenario() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  g_second = procedure_lbf(kHv, kSecondBounds);
  const double dt = seconds_since(t0);
  const auto& b = g_second.beta_star;
  o.note("J**=" + fmt("%.6f", g_second.j_star_star) + " gamma=" + fmt("%.6f", g_second.gamma_lower) + " beta*=(" +
         fmt("%.5f", b.stiffness) + "," + fmt("%.5f", b.damping) + "," + fmt("%.5f", b.rel_velocity) +
         ") t=" + fmt("%.2fs", dt));
  o.require(std::abs(g_second.j_star_star - 5.4898) <= 0.01 * 5.4898, "J** within 1% of 5.4898");
  o.require(std::abs(g_second.gamma_lower - 0.1541) <= 0.002, "gamma within 0.002 of 0.1541");
  o.require(std::abs(b.stiffness - 0.8) <= 1e-2 && std::abs(b.damping - 2.0) <= 1e-2 &&
                std::abs(b.rel_velocity - 0.8) <= 1e-2,
            "beta* within 1e-2 of (0.8, 2, 0.8)");
  o.require(dt < 10.0, "runtime < 10 s");
  return o;
}

Outcome c3_fleet_bounds() {
  Outcome o;
  const std::int64_t a = min_avs_for(g_wide.j_star_star, 400);
  const std::int64_t h1 = max_hvs_for(g_wide.j_star_star, 1);
  const std::int64_t h5 = max_hvs_for(g_second.j_star_star, 5);
  o.note("N_HV=400 -> N_AV>=" + std::to_string(a) + ", N_AV=1 -> N_HV<=" + std::to_string(h1) +
         ", N_AV=5 (second gains) -> N_HV<=" + std::to_string(h5));
  o.require(a == 3, "N_AV = 3");
  o.require(h1 == 184, "N_HV = 184");
  o.require(h5 == 27, "N_HV = 27");
  return o;
}

Outcome c4_cross_route() {
  Outcome o;
  const std::int64_t v400 = v_star(g_wide.beta_star, kHv, 400);
  const std::int64_t v184 = v_star(g_wide.beta_star, kHv, 184);
  o.note("v_star(400)=" + std::to_string(v400) + " v_star(184)=" + std::to_string(v184));
  o.require(v400 == 3, "v_star(beta*, 400) = 3");
  o.require(v184 == 1, "v_star(beta*, 184) = 1");
  o.require(v400 == min_avs_for(g_wide.j_star_star, 400) && v184 == min_avs_for(g_wide.j_star_star, 184),
            "matches ceil(N_HV / J**)");
  return o;
}

Outcome c5_eigenmodes() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const EigenmodeSet none = eigenmodes({185, {}, kHv, g_wide.beta_star});
  const double t_none = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  g_one_av = eigenmodes({185, {1}, kHv, g_wide.beta_star});
  const double t_one = seconds_since(t0);
  const std::size_t u0 = count_unstable(none), u1 = count_unstable(g_one_av);
  const double res = std::max(none.max_residual, g_one_av.max_residual);
  o.note("m=0: " + std::to_string(u0) + " roots with Re>1e-6 (" + fmt("%.2fs", t_none) + "), m=1: " +
         std::to_string(u1) + " (" + fmt("%.2fs", t_one) + "), max residual " + fmt("%.2e", res));
  o.require(none.roots.size() == 370 && g_one_av.roots.size() == 370, "2n roots");
  o.require(u0 == 30, "30 unstable roots without AV");
  o.require(u1 == 0, "no unstable roots with one AV");
  o.require(res <= 1e-8, "max residual <= 1e-8");
  o.require(t_none < 30.0 && t_one < 30.0, "runtime < 30 s per spectrum");
  return o;
}

Outcome c6_companion_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const int m = static_cast<int>(rng() % n);
    const HvParams hv = oracle::random_rdc<HumanRole>(rng);
    const AvGains av = oracle::random_rdc<AutonomousRole>(rng);
    try {
      const EigenmodeSet e = eigenmodes({n, contiguous_indices(m), hv, av});
      const double d = oracle::matched_distance(e.roots, oracle::companion_roots(oracle::characteristic_poly(n, m, hv, av)));
      worst = std::max(worst, d);
      if (!(d <= 1e-6)) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }
  o.note("50 configs, n<=12, worst matched distance " + fmt("%.2e", worst));
  o.require(failures == 0, std::to_string(failures) + " configs off by more than 1e-6");
  return o;
}

Outcome c7_grid_oracle() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> th(0.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AvGains b = beta_from_theta({th(rng), th(rng), th(rng)}, kWideBounds, {});
    const double ours = j_star(b, kHv).j_star;
    const double grid = oracle::dense_grid_j_star(b, kHv, 1'000'000).value;
    worst = std::max(worst, std::abs(ours - grid) / grid);
  }
  o.note("100 random feasible beta, 1e6-point grid, worst relative gap " + fmt("%.2e", worst));
  o.require(worst <= 1e-4, "relative gap <= 1e-4");
  return o;
}

Outcome c8_parameterization() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> th(0.0, 10.0);
  int bad_theta = 0;
  for (int i = 0; i < 10000; ++i) {
    const GainBounds& b = i % 2 == 0 ? kWideBounds : kSecondBounds;
    const AvGains g = beta_from_theta({th(rng), th(rng), th(rng)}, b, {});
    if (!check_rdc(g) || !(delta(g) >= 0.0) || !in_box(g, b)) ++bad_theta;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad_pqr = 0;
  double worst_ulps = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = 1e-3 + 5.0 * u(rng), q = 1e-3 + 5.0 * u(rng);
    const double r = (p * q + 0.5 * q * q) * 0.999 * u(rng);
    const AvGains g = beta_from_pqr({p, q, r});
    const double scale = std::max({2.0 * g.stiffness, g.damping * g.damping, g.rel_velocity * g.rel_velocity});
    const double ulps = std::abs(delta(g) - 2.0 * r) / (std::numeric_limits<double>::epsilon() * scale);
    worst_ulps = std::max(worst_ulps, ulps);
    if (ulps > 8.0) ++bad_pqr;
  }
  o.note("1e4 theta: " + std::to_string(bad_theta) + " violations; 1e4 pqr: worst |Delta-2r| = " +
         fmt("%.2f", worst_ulps) + " ulp of operand scale");
  o.require(bad_theta == 0, "RDC, Delta >= 0 and box membership for every theta");
  o.require(bad_pqr == 0, "Delta = 2r to 8 ulp");
  return o;
}

Outcome c9_sweeps() {
  Outcome o;
  auto floor_j = [](const GainBounds& b) {
    return static_cast<std::int64_t>(std::floor(procedure_lbf(kHv, b).j_star_star));
  };
  std::vector<std::int64_t> up, down;
  for (int k = 0; k < 30; ++k) {
    const double i = std::round(1.0 + k * 299.0 / 29.0);
    up.push_back(floor_j({{0.01, 0.01, 0.01}, {i, i, i}}));
  }
  for (int k = 0; k < 30; ++k) {
    const double i = std::round(1.0 + k * 300.0 / 29.0);
    const double lo = std::pow(10.0, (i - 301.0) / 25.0);
    down.push_back(floor_j({{lo, lo, lo}, {2, 2, 2}}));
  }
  const std::int64_t endpoint = floor_j(kWideBounds);
  const bool up_ok = std::is_sorted(up.begin(), up.end());
  const bool down_ok = std::is_sorted(down.rbegin(), down.rend());
  o.note("upper sweep floor(J**) " + std::to_string(up.front()) + ".." + std::to_string(up.back()) +
         ", lower sweep " + std::to_string(down.front()) + ".." + std::to_string(down.back()) +
         ", endpoint " + std::to_string(endpoint));
  o.require(up_ok, "upper sweep nondecreasing");
  o.require(down_ok, "lower sweep nonincreasing");
  o.require(endpoint == 184, "floor(J**) = 184 at beta_upper = 2");
  return o;
}

Outcome c10_placement() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const AvGains beta{0.8, 2, 0.8};
  const std::vector<int> g = greedy_placement(32, 5, kHv, beta);
  ChiEvaluator eval(32, kHv, beta);
  const double cg = eval(g), cc = eval(contiguous_indices(5)), cp = eval({1, 9, 17, 21, 25});
  const std::vector<int> g4 = greedy_placement(4, 2, kHv, beta);
  ChiEvaluator eval4(4, kHv, beta);
  double best4 = std::numeric_limits<double>::infinity();
  for (int a = 1; a <= 4; ++a) {
    for (int b = a + 1; b <= 4; ++b) best4 = std::min(best4, eval4({a, b}));
  }
  const double dt = seconds_since(t0);
  std::string set = "{";
  for (std::size_t i = 0; i < g.size(); ++i) set += (i ? "," : "") + std::to_string(g[i]);
  set += "}";
  o.note("greedy " + set + " chi=" + fmt("%.6f", cg) + " contiguous=" + fmt("%.6f", cc) + " reference=" +
         fmt("%.6f", cp) + " t=" + fmt("%.2fs", dt));
  o.require(cg <= cc, "chi(greedy) <= chi(contiguous)");
  o.require(cg <= cp * (1.0 + 1e-9), "chi(greedy) <= chi({1,9,17,21,25})");
  o.require(eval4(g4) <= best4 * (1.0 + 1e-12), "(2,4) greedy equals exhaustive optimum");
  o.require(dt < 60.0, "runtime < 60 s");
  return o;
}

Outcome c11_simulation() {
  Outcome o;
  const PlatoonConfig zero_ring{185, {1}, kHv, g_wide.beta_star};
  const auto zero = simulate(zero_ring, {std::vector<double>(185, 0.0), std::vector<double>(185, 0.0)}, 100.0, 0.01, 10);
  bool exact = true;
  for (const auto& yj : zero.y) {
    for (double v : yj) exact = exact && v == 0.0 && !std::signbit(v);
  }
  for (const auto& uj : zero.u) {
    for (double v : uj) exact = exact && v == 0.0 && !std::signbit(v);
  }
  o.require(exact, "zero input gives bit-exact zero output");

  const double horizon = 12000.0, window = 1000.0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rec = simulate(zero_ring, single_perturbation(185, 185, 1.0), horizon, 0.01, 100);
  const double dt = seconds_since(t0);
  double peak = 0.0;
  for (const auto& yj : rec.y) {
    for (double v : yj) peak = std::max(peak, std::abs(v));
  }
  std::vector<double> env;
  for (double t = 0.0; t < horizon; t += window) env.push_back(spread_envelope(rec, t, t + window));
  bool decaying = true;
  for (std::size_t k = 2; k < env.size(); ++k) decaying = decaying && env[k] <= env[k - 1];
  auto sample_at = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(rec.time.begin(), rec.time.end(), t - 1e-9) - rec.time.begin());
  };
  bool t4t = true;
  for (double T : {1000.0, 2000.0, 3000.0}) {
    t4t = t4t && spread_at(rec, sample_at(4.0 * T)) <= spread_at(rec, sample_at(T)) + 1e-8;
  }
  o.note("eigen verdict " + std::string(string_stable(g_one_av) ? "stable" : "unstable") + ", max |y| " +
         fmt("%.3f", peak) + ", spread envelope per 1000 s " + fmt("%.3f", env[1]) + " -> " + fmt("%.4f", env.back()) +
         ", t=" + fmt("%.2fs", dt));
  o.require(string_stable(g_one_av), "eigenmode verdict is stable");
  o.require(peak <= 10.0, "|y_j(t)| bounded by 10");
  o.require(decaying, "oscillation envelope decreasing after the first window");
  o.require(t4t, "spread(4T) <= spread(T) for T = 1000, 2000, 3000 s");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"C1 penetration bound, wide gain box", c1_wide_box_bound},
      {"C2 penetration bound, second scenario", c2_second_scenario},
      {"C3 fleet-size bounds", c3_fleet_bounds},
      {"C4 peak-gain bisection cross-route", c4_cross_route},
      {"C5 185-vehicle eigenmodes", c5_eigenmodes},
      {"C6 companion-matrix oracle", c6_companion_oracle},
      {"C7 J* dense-grid oracle", c7_grid_oracle},
      {"C8 parameterization properties", c8_parameterization},
      {"C9 sweep monotonicity", c9_sweeps},
      {"C10 greedy placement", c10_placement},
      {"C11 simulation sanity", c11_simulation},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
