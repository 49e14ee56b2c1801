#pragma once

// Subcommand bodies of the command-line tool. Each writes its artifact into
// the output directory, prints a short summary and returns the computed
// result so tests can inspect it without parsing files.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "ringstab/cli/scenario.hpp"
#include "ringstab/errors.hpp"
#include "ringstab/hinf.hpp"
#include "ringstab/optimizer.hpp"
#include "ringstab/penetration.hpp"
#include "ringstab/platoon.hpp"

namespace ringstab::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInfeasible = 2, kNotWorstCase = 3, kComputeFailure = 4 };

struct RunOptions {
  std::filesystem::path output_dir = "./out";
  unsigned jobs = 1;
  std::ostream* log = &std::cout;
};

/// %.12g
[[nodiscard]] inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

[[nodiscard]] inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

inline std::ofstream open_output(const RunOptions& opt, const std::string& name, const std::string& command) {
  std::filesystem::create_directories(opt.output_dir);
  const auto path = opt.output_dir / name;
  std::ofstream f(path);
  if (!f) throw ComputeError("cannot open " + path.string() + " for writing");
  f << "# ringstab " << command << " generated " << utc_timestamp() << '\n';
  return f;
}

inline std::string triple(const AvGains& g) {
  return "(" + num(g.stiffness) + ", " + num(g.damping) + ", " + num(g.rel_velocity) + ")";
}

inline std::string index_list(const std::vector<int>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
  return s + "}";
}

inline BoundReport run_procedure(const ScenarioConfig& cfg, const GainBounds& bounds) {
  if (cfg.simplex.multistart) {
    return procedure_lbf_multistart(cfg.model.hv, bounds, cfg.simplex.simplex, cfg.model.param, multistart_lattice());
  }
  return procedure_lbf(cfg.model.hv, bounds, cfg.simplex.simplex, cfg.model.param, cfg.simplex.theta0);
}

// AV gains for ring-level commands: configured, or the procedure optimum.
inline AvGains ring_gains(const ScenarioConfig& cfg) {
  if (cfg.platoon.av) return *cfg.platoon.av;
  return run_procedure(cfg, cfg.model.bounds).beta_star;
}

inline PlatoonConfig ring_config(const ScenarioConfig& cfg) {
  PlatoonConfig pc;
  pc.n = cfg.platoon.n;
  pc.hv = cfg.model.hv;
  if (cfg.platoon.m == 0) {
    pc.av = cfg.platoon.av.value_or(recast<AutonomousRole>(cfg.model.hv));
    return pc;
  }
  pc.av = ring_gains(cfg);
  switch (cfg.platoon.placement) {
    case Placement::Contiguous:
      pc.av_indices = contiguous_indices(cfg.platoon.m);
      break;
    case Placement::Explicit:
      pc.av_indices = cfg.platoon.av_indices;
      break;
    case Placement::Greedy:
      pc.av_indices = greedy_placement(pc.n, cfg.platoon.m, pc.hv, pc.av);
      break;
  }
  return pc;
}

}  // namespace detail

/// Optimal penetration bound; writes bound.csv.
inline BoundReport cmd_bound(const ScenarioConfig& cfg, const RunOptions& opt) {
  const BoundReport rep = detail::run_procedure(cfg, cfg.model.bounds);
  const FleetBounds fb = fleet_bounds(rep.j_star_star, cfg.fleet.n_hv, cfg.fleet.n_av);

  auto f = detail::open_output(opt, "bound.csv", "bound");
  f << "beta1,beta2,beta3,j_star_star,gamma_lower,min_avs,max_hvs\n";
  f << num(rep.beta_star.stiffness) << ',' << num(rep.beta_star.damping) << ',' << num(rep.beta_star.rel_velocity)
    << ',' << num(rep.j_star_star) << ',' << num(rep.gamma_lower) << ',' << fb.min_avs << ',' << fb.max_hvs << '\n';

  auto& log = *opt.log;
  log << "optimal AV gains beta* = " << detail::triple(rep.beta_star) << '\n'
      << "J** = " << num(rep.j_star_star) << ", penetration rate >= " << num(rep.gamma_lower) << '\n'
      << fb.n_hv << " HVs need at least " << fb.min_avs << " AV(s); " << fb.n_av << " AV(s) stabilize at most "
      << fb.max_hvs << " HVs\n"
      << "simplex: " << rep.iterations << " iterations, " << (rep.converged ? "converged" : "iteration cap reached")
      << '\n';
  return rep;
}

struct SweepRow {
  SweepPoint point;
  double j_star_star = std::nan("");
  std::string status = "ok";
};

/// Procedure sweep over one bound coordinate; writes sweep.csv. Grid points
/// run on up to opt.jobs threads; failures become status rows.
inline std::vector<SweepRow> cmd_sweep(const ScenarioConfig& cfg, const RunOptions& opt) {
  const std::vector<SweepPoint> pts = sweep_points(cfg.sweep);
  std::vector<SweepRow> rows(pts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pts.size(); i = next++) {
      rows[i].point = pts[i];
      try {
        rows[i].j_star_star = detail::run_procedure(cfg, pts[i].bounds).j_star_star;
      } catch (const InfeasibleBoundsError&) {
        rows[i].status = "infeasible";
      } catch (const NotWorstCaseError&) {
        rows[i].status = "not_worst_case";
      } catch (const Error&) {
        rows[i].status = "compute_error";
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(pts.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  auto f = detail::open_output(opt, "sweep.csv", "sweep");
  f << "sweep_value,j_star_star,floor_j_star_star,status\n";
  std::size_t failed = 0;
  for (const auto& r : rows) {
    f << num(r.point.value) << ',';
    if (r.status == "ok") {
      f << num(r.j_star_star) << ',' << static_cast<std::int64_t>(std::floor(r.j_star_star));
    } else {
      ++failed;
      f << ',';
    }
    f << ',' << r.status << '\n';
  }
  *opt.log << "sweep (" << (cfg.sweep.scenario == SweepScenario::Upper ? "upper" : "lower") << "): " << rows.size()
           << " points, " << failed << " failed\n";
  return rows;
}

struct EigReport {
  PlatoonConfig platoon;
  EigenmodeSet modes;
  std::size_t unstable = 0;
  bool stable = false;
};

/// Ring spectrum; writes eig.csv with the verdict in a comment line.
inline EigReport cmd_eig(const ScenarioConfig& cfg, const RunOptions& opt) {
  EigReport r;
  r.platoon = detail::ring_config(cfg);
  r.modes = eigenmodes(r.platoon, cfg.platoon.eig_tol);
  r.unstable = count_unstable(r.modes);
  r.stable = string_stable(r.modes);

  auto f = detail::open_output(opt, "eig.csv", "eig");
  f << "# verdict=" << (r.stable ? "stable" : "unstable") << " unstable_roots=" << r.unstable
    << " n=" << r.platoon.n << " m=" << r.platoon.m() << '\n';
  f << "re,im\n";
  for (const auto& s : r.modes.roots) f << num(s.real()) << ',' << num(s.imag()) << '\n';

  *opt.log << "n = " << r.platoon.n << ", m = " << r.platoon.m() << ", AVs at " << detail::index_list(r.platoon.av_indices)
           << '\n'
           << r.modes.roots.size() << " eigenmodes, " << r.unstable << " with Re > " << num(kUnstableRealPart)
           << ", max Re = " << num(r.modes.max_real_part) << ", max residual = " << num(r.modes.max_residual) << '\n'
           << "verdict: " << (r.stable ? "string stable" : "string unstable") << '\n';
  return r;
}

/// Perturbation response; writes traj.csv (t, y_1..y_n).
inline TrajectoryRecord cmd_simulate(const ScenarioConfig& cfg, const RunOptions& opt) {
  const PlatoonConfig pc = detail::ring_config(cfg);
  const auto& sim = cfg.simulation;
  const int vehicle = sim.vehicle == 0 ? pc.n : sim.vehicle;
  const TrajectoryRecord rec =
      simulate(pc, single_perturbation(pc.n, vehicle, sim.magnitude), sim.horizon, sim.dt, sim.record_every);

  auto f = detail::open_output(opt, "traj.csv", "simulate");
  f << 't';
  for (int j = 1; j <= pc.n; ++j) f << ",y_" << j;
  f << '\n';
  for (std::size_t k = 0; k < rec.time.size(); ++k) {
    f << num(rec.time[k]);
    for (const auto& yj : rec.y) f << ',' << num(yj[k]);
    f << '\n';
  }
  *opt.log << "simulated " << pc.n << " vehicles for " << num(sim.horizon) << " s (dt = " << num(sim.dt) << "), "
           << rec.time.size() << " samples; final spread " << num(spread_at(rec, rec.time.size() - 1)) << '\n';
  return rec;
}

struct PlaceReport {
  std::vector<int> greedy;
  double chi_greedy = 0.0;
  double chi_contiguous = 0.0;
  std::vector<std::pair<std::vector<int>, double>> compared;
};

/// Greedy AV placement; writes place.txt with chi for greedy, contiguous and
/// every configured comparison set.
inline PlaceReport cmd_place(const ScenarioConfig& cfg, const RunOptions& opt) {
  const int n = cfg.platoon.n;
  const int m = cfg.platoon.m;
  if (m < 1) throw DomainError("place: platoon.m must be >= 1");
  if (n < 3) throw DomainError("place: platoon.n must be >= 3");
  const AvGains av = detail::ring_gains(cfg);

  PlaceReport r;
  ChiEvaluator eval(n, cfg.model.hv, av);
  r.greedy = greedy_placement(n, m, cfg.model.hv, av);
  r.chi_greedy = eval(r.greedy);
  r.chi_contiguous = eval(contiguous_indices(m));
  std::vector<std::vector<int>> extra = cfg.platoon.compare;
  if (cfg.platoon.placement == Placement::Explicit) extra.push_back(cfg.platoon.av_indices);
  for (const auto& set : extra) r.compared.emplace_back(set, eval(set));

  auto f = detail::open_output(opt, "place.txt", "place");
  f << "n = " << n << "\nm = " << m << "\nav_gains = " << detail::triple(av) << '\n';
  f << "greedy = " << detail::index_list(r.greedy) << "\nchi_greedy = " << num(r.chi_greedy) << '\n';
  f << "contiguous = " << detail::index_list(contiguous_indices(m)) << "\nchi_contiguous = " << num(r.chi_contiguous)
    << '\n';
  for (const auto& [set, value] : r.compared) {
    f << "compare " << detail::index_list(set) << " chi = " << num(value) << '\n';
  }
  *opt.log << "greedy placement " << detail::index_list(r.greedy) << ": chi = " << num(r.chi_greedy)
           << " (contiguous " << num(r.chi_contiguous) << ")\n";
  return r;
}

/// Fewest AVs through peak-gain bisection, minimized over the gains;
/// writes vstar.txt.
inline VStarResult cmd_vstar(const ScenarioConfig& cfg, const RunOptions& opt) {
  const VStarResult r = v_star_star(cfg.model.hv, cfg.model.bounds, cfg.fleet.n_hv, cfg.simplex.simplex,
                                    cfg.model.param, cfg.simplex.theta0);
  const double j = j_star(r.gains, cfg.model.hv).j_star;
  const std::int64_t via_margin = j > 0.0 ? min_avs_for(j, cfg.fleet.n_hv) : -1;

  auto f = detail::open_output(opt, "vstar.txt", "vstar");
  f << "n_hv = " << cfg.fleet.n_hv << "\nn_av = " << r.n_av << "\nbeta = " << detail::triple(r.gains)
    << "\nj_star = " << num(j) << "\nn_av_from_margin = " << via_margin << "\nsimplex_iterations = " << r.iterations
    << '\n';
  *opt.log << r.n_av << " AV(s) suffice for " << cfg.fleet.n_hv << " HVs with beta = " << detail::triple(r.gains)
           << " (margin route: " << via_margin << ")\n";
  return r;
}

}  // namespace ringstab::cli
