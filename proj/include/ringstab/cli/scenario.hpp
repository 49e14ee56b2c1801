#pragma once

// Scenario configuration for the command-line tool: built-in presets, TOML
// ingestion with strict key checking, and the sweep grids.
//
//   [model]       hv, beta_lower, beta_upper, epsilon, zeta, sigmoid
//   [simplex]     reflection, expansion, contraction, shrink, max_iterations,
//                 x_tolerance, f_tolerance, initial_step, zero_step, theta0, multistart
//   [fleet]       n_hv, n_av
//   [sweep]       scenario ("upper" | "lower"), first, last, stride
//   [platoon]     n, m, placement ("contiguous" | "greedy" | "explicit"),
//                 av_indices, av, compare, eig_tol
//   [simulation]  horizon, dt, record_every, vehicle, magnitude
//   [output]      dir

#include <toml.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ringstab/core.hpp"
#include "ringstab/errors.hpp"
#include "ringstab/optimizer.hpp"
#include "ringstab/param.hpp"

namespace ringstab::cli {

/// Malformed or inconsistent configuration (maps to the usage exit code).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class SweepScenario { Upper, Lower };
enum class Placement { Contiguous, Greedy, Explicit };

struct ModelSection {
  HvParams hv{0.3 * std::numbers::pi, 1.5, 0.9};
  GainBounds bounds{{0.01, 0.01, 0.01}, {2.0, 2.0, 2.0}};
  ParamConfig param;
};

struct SimplexSection {
  SimplexConfig simplex;
  ThetaParams theta0;
  bool multistart = false;
};

struct FleetSection {
  std::int64_t n_hv = 400;
  std::int64_t n_av = 1;
};

struct SweepSection {
  SweepScenario scenario = SweepScenario::Upper;
  int first = 1;
  int last = 0;  // 0 -> end of the scenario grid
  int stride = 1;
};

struct PlatoonSection {
  int n = 185;
  int m = 1;
  Placement placement = Placement::Contiguous;
  std::vector<int> av_indices;         // used when placement is explicit
  std::optional<AvGains> av;           // empty -> optimal gains from the bound procedure
  std::vector<std::vector<int>> compare;  // extra index sets scored by `place`
  double eig_tol = 1e-8;
};

struct SimulationSection {
  double horizon = 4000.0;
  double dt = 0.01;
  int record_every = 100;
  int vehicle = 0;  // 0 -> vehicle n
  double magnitude = 1.0;
};

struct ScenarioConfig {
  ModelSection model;
  SimplexSection simplex;
  FleetSection fleet;
  SweepSection sweep;
  PlatoonSection platoon;
  SimulationSection simulation;
  std::string output_dir = "./out";

  /// Checks that can be made without running anything. Gain-bound
  /// feasibility is left to the library so it keeps its own exit code.
  void validate() const {
    if (!check_rdc(model.hv)) throw ConfigError("model.hv violates the driving constraints k1 > 0, k2 > k3 > 0");
    if (!(model.param.epsilon > 0.0)) throw ConfigError("model.epsilon must be positive");
    if (!(model.param.zeta > 0.0)) throw ConfigError("model.zeta must be positive");
    try {
      simplex.simplex.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    if (fleet.n_hv < 1 || fleet.n_av < 1) throw ConfigError("fleet.n_hv and fleet.n_av must be >= 1");
    if (sweep.first < 1 || sweep.stride < 1 || sweep.last < 0) {
      throw ConfigError("sweep.first and sweep.stride must be >= 1, sweep.last >= 0");
    }
    const auto& p = platoon;
    if (p.n < 2) throw ConfigError("platoon.n must be >= 2");
    if (p.m < 0 || p.m >= p.n) throw ConfigError("platoon.m must satisfy 0 <= m < n");
    if (p.placement == Placement::Explicit) {
      check_index_set(p.av_indices, "platoon.av_indices");
      if (static_cast<int>(p.av_indices.size()) != p.m) {
        throw ConfigError("platoon.av_indices has " + std::to_string(p.av_indices.size()) + " entries but m = " +
                          std::to_string(p.m));
      }
    }
    for (const auto& c : p.compare) check_index_set(c, "platoon.compare");
    if (p.av && !check_rdc(*p.av)) throw ConfigError("platoon.av violates the driving constraints");
    if (!(p.eig_tol > 0.0)) throw ConfigError("platoon.eig_tol must be positive");
    const auto& s = simulation;
    if (!(s.dt > 0.0) || !(s.horizon >= s.dt)) throw ConfigError("simulation needs dt > 0 and horizon >= dt");
    if (s.record_every < 1) throw ConfigError("simulation.record_every must be >= 1");
    if (s.vehicle < 0 || s.vehicle > p.n) throw ConfigError("simulation.vehicle must be in 1..n (0 for n)");
    if (!std::isfinite(s.magnitude)) throw ConfigError("simulation.magnitude must be finite");
  }

 private:
  void check_index_set(const std::vector<int>& idx, const std::string& what) const {
    std::set<int> seen;
    for (int i : idx) {
      if (i < 1 || i > platoon.n) throw ConfigError(what + ": index " + std::to_string(i) + " outside 1..n");
      if (!seen.insert(i).second) throw ConfigError(what + ": duplicate index " + std::to_string(i));
    }
  }
};

[[nodiscard]] inline std::vector<std::string> preset_names() {
  return {"paper-iv", "appendix-g", "sweep-upper", "sweep-lower"};
}

/// Built-in scenarios.
///   paper-iv     bounds 0.01..2, 400 HVs, 185-vehicle ring with one AV
///   appendix-g   bounds 0.8..2, five AVs, 32-vehicle ring, greedy placement
///   sweep-upper  paper-iv with the upper-bound sweep i = 1..300
///   sweep-lower  paper-iv with the lower-bound sweep i = 1..301
[[nodiscard]] inline ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  if (name == "paper-iv") return c;
  if (name == "sweep-upper") {
    c.sweep.scenario = SweepScenario::Upper;
    return c;
  }
  if (name == "sweep-lower") {
    c.sweep.scenario = SweepScenario::Lower;
    return c;
  }
  if (name == "appendix-g") {
    c.model.bounds = {{0.8, 0.8, 0.8}, {2.0, 2.0, 2.0}};
    c.fleet = {27, 5};
    c.platoon.n = 32;
    c.platoon.m = 5;
    c.platoon.placement = Placement::Greedy;
    c.platoon.compare = {{1, 9, 17, 21, 25}};
    c.simulation.vehicle = 32;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

namespace detail {

inline void reject_unknown(const toml::table& t, std::string_view section, std::initializer_list<std::string_view> keys) {
  for (const auto& [k, v] : t) {
    if (std::find(keys.begin(), keys.end(), k.str()) == keys.end()) {
      throw ConfigError("unknown key '" + std::string(section) + (section.empty() ? "" : ".") + std::string(k.str()) +
                        "'");
    }
  }
}

inline std::string where(std::string_view section, std::string_view key) {
  return std::string(section) + "." + std::string(key);
}

inline const toml::table* subtable(const toml::table& root, std::string_view name) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError("'" + std::string(name) + "' must be a table");
  return n->as_table();
}

inline void read(const toml::table& t, std::string_view sec, std::string_view key, double& out) {
  const toml::node* n = t.get(key);
  if (!n) return;
  if (auto v = n->value<double>()) {
    out = *v;
    return;
  }
  throw ConfigError(where(sec, key) + " must be a number");
}

template <class Int>
  requires std::is_integral_v<Int>
inline void read(const toml::table& t, std::string_view sec, std::string_view key, Int& out) {
  const toml::node* n = t.get(key);
  if (!n) return;
  if (auto v = n->value_exact<std::int64_t>()) {
    out = static_cast<Int>(*v);
    return;
  }
  throw ConfigError(where(sec, key) + " must be an integer");
}

inline void read(const toml::table& t, std::string_view sec, std::string_view key, bool& out) {
  const toml::node* n = t.get(key);
  if (!n) return;
  if (auto v = n->value_exact<bool>()) {
    out = *v;
    return;
  }
  throw ConfigError(where(sec, key) + " must be a boolean");
}

inline std::optional<std::string> read_string(const toml::table& t, std::string_view key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value_exact<std::string>()) return *v;
  throw ConfigError("'" + std::string(key) + "' must be a string");
}

// A number c (meaning (c, c, c)) or an array of three numbers.
inline std::optional<std::array<double, 3>> read_triple(const toml::table& t, std::string_view sec,
                                                        std::string_view key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value<double>()) return std::array<double, 3>{*v, *v, *v};
  if (const toml::array* a = n->as_array(); a && a->size() == 3) {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
      auto v = (*a)[i].value<double>();
      if (!v) throw ConfigError(where(sec, key) + " entries must be numbers");
      out[i] = *v;
    }
    return out;
  }
  throw ConfigError(where(sec, key) + " must be a number or an array of three numbers");
}

inline std::vector<int> read_index_array(const toml::node& n, const std::string& what) {
  const toml::array* a = n.as_array();
  if (!a) throw ConfigError(what + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : *a) {
    auto v = e.value_exact<std::int64_t>();
    if (!v) throw ConfigError(what + " must be an array of integers");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

}  // namespace detail

/// Overlay the values present in `root` onto `cfg`. Unknown sections or keys
/// and ill-typed values throw ConfigError.
inline void apply_toml(ScenarioConfig& cfg, const toml::table& root) {
  using namespace detail;
  reject_unknown(root, "", {"model", "simplex", "fleet", "sweep", "platoon", "simulation", "output"});

  if (const auto* t = subtable(root, "model")) {
    reject_unknown(*t, "model", {"hv", "beta_lower", "beta_upper", "epsilon", "zeta", "sigmoid"});
    if (auto v = read_triple(*t, "model", "hv")) cfg.model.hv = HvParams::from_array(*v);
    if (auto v = read_triple(*t, "model", "beta_lower")) cfg.model.bounds.lower = AvGains::from_array(*v);
    if (auto v = read_triple(*t, "model", "beta_upper")) cfg.model.bounds.upper = AvGains::from_array(*v);
    read(*t, "model", "epsilon", cfg.model.param.epsilon);
    read(*t, "model", "zeta", cfg.model.param.zeta);
    if (auto s = read_string(*t, "sigmoid")) {
      if (*s == "logistic") {
        cfg.model.param.sigmoid = SigmoidKind::Logistic;
      } else if (*s == "tanh") {
        cfg.model.param.sigmoid = SigmoidKind::Tanh;
      } else if (*s == "arctan") {
        cfg.model.param.sigmoid = SigmoidKind::Arctan;
      } else if (*s == "erf") {
        cfg.model.param.sigmoid = SigmoidKind::Erf;
      } else {
        throw ConfigError("model.sigmoid must be one of logistic, tanh, arctan, erf");
      }
    }
  }

  if (const auto* t = subtable(root, "simplex")) {
    reject_unknown(*t, "simplex",
                   {"reflection", "expansion", "contraction", "shrink", "max_iterations", "x_tolerance",
                    "f_tolerance", "initial_step", "zero_step", "theta0", "multistart"});
    auto& s = cfg.simplex.simplex;
    read(*t, "simplex", "reflection", s.reflection);
    read(*t, "simplex", "expansion", s.expansion);
    read(*t, "simplex", "contraction", s.contraction);
    read(*t, "simplex", "shrink", s.shrink);
    read(*t, "simplex", "max_iterations", s.max_iterations);
    read(*t, "simplex", "x_tolerance", s.x_tolerance);
    read(*t, "simplex", "f_tolerance", s.f_tolerance);
    read(*t, "simplex", "initial_step", s.initial_step);
    read(*t, "simplex", "zero_step", s.zero_step);
    if (auto v = read_triple(*t, "simplex", "theta0")) cfg.simplex.theta0 = ThetaParams::from_array(*v);
    read(*t, "simplex", "multistart", cfg.simplex.multistart);
  }

  if (const auto* t = subtable(root, "fleet")) {
    reject_unknown(*t, "fleet", {"n_hv", "n_av"});
    read(*t, "fleet", "n_hv", cfg.fleet.n_hv);
    read(*t, "fleet", "n_av", cfg.fleet.n_av);
  }

  if (const auto* t = subtable(root, "sweep")) {
    reject_unknown(*t, "sweep", {"scenario", "first", "last", "stride"});
    if (auto s = read_string(*t, "scenario")) {
      if (*s == "upper") {
        cfg.sweep.scenario = SweepScenario::Upper;
      } else if (*s == "lower") {
        cfg.sweep.scenario = SweepScenario::Lower;
      } else {
        throw ConfigError("sweep.scenario must be 'upper' or 'lower'");
      }
    }
    read(*t, "sweep", "first", cfg.sweep.first);
    read(*t, "sweep", "last", cfg.sweep.last);
    read(*t, "sweep", "stride", cfg.sweep.stride);
  }

  if (const auto* t = subtable(root, "platoon")) {
    reject_unknown(*t, "platoon", {"n", "m", "placement", "av_indices", "av", "compare", "eig_tol"});
    read(*t, "platoon", "n", cfg.platoon.n);
    read(*t, "platoon", "m", cfg.platoon.m);
    if (auto s = read_string(*t, "placement")) {
      if (*s == "contiguous") {
        cfg.platoon.placement = Placement::Contiguous;
      } else if (*s == "greedy") {
        cfg.platoon.placement = Placement::Greedy;
      } else if (*s == "explicit") {
        cfg.platoon.placement = Placement::Explicit;
      } else {
        throw ConfigError("platoon.placement must be contiguous, greedy or explicit");
      }
    }
    if (const toml::node* n = t->get("av_indices")) {
      cfg.platoon.av_indices = read_index_array(*n, "platoon.av_indices");
      if (!t->get("placement")) cfg.platoon.placement = Placement::Explicit;
    }
    if (auto v = read_triple(*t, "platoon", "av")) cfg.platoon.av = AvGains::from_array(*v);
    if (const toml::node* n = t->get("compare")) {
      const toml::array* a = n->as_array();
      if (!a) throw ConfigError("platoon.compare must be an array of index arrays");
      cfg.platoon.compare.clear();
      for (const auto& e : *a) cfg.platoon.compare.push_back(read_index_array(e, "platoon.compare"));
    }
    read(*t, "platoon", "eig_tol", cfg.platoon.eig_tol);
  }

  if (const auto* t = subtable(root, "simulation")) {
    reject_unknown(*t, "simulation", {"horizon", "dt", "record_every", "vehicle", "magnitude"});
    read(*t, "simulation", "horizon", cfg.simulation.horizon);
    read(*t, "simulation", "dt", cfg.simulation.dt);
    read(*t, "simulation", "record_every", cfg.simulation.record_every);
    read(*t, "simulation", "vehicle", cfg.simulation.vehicle);
    read(*t, "simulation", "magnitude", cfg.simulation.magnitude);
  }

  if (const auto* t = subtable(root, "output")) {
    reject_unknown(*t, "output", {"dir"});
    if (auto s = read_string(*t, "dir")) cfg.output_dir = *s;
  }
}

inline void apply_toml_text(ScenarioConfig& cfg, std::string_view text, std::string_view source = "<string>") {
  try {
    apply_toml(cfg, toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    throw ConfigError(std::string(source) + ": " + std::string(e.description()));
  }
}

inline void apply_toml_file(ScenarioConfig& cfg, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  try {
    apply_toml(cfg, toml::parse_file(path.string()));
  } catch (const toml::parse_error& e) {
    throw ConfigError(path.string() + ": " + std::string(e.description()));
  }
}

/// One sweep point: the swept value and the gain box it induces.
struct SweepPoint {
  int index = 0;
  double value = 0.0;
  GainBounds bounds;
};

[[nodiscard]] inline int sweep_grid_size(SweepScenario s) { return s == SweepScenario::Upper ? 300 : 301; }

/// Upper: beta_upper = (i, i, i), i = 1..300, with beta_lower = 0.01 (1, 1, 1).
/// Lower: beta_lower = 10^((i - 301) / 25) (1, 1, 1), i = 1..301, with beta_upper = 2 (1, 1, 1).
[[nodiscard]] inline SweepPoint sweep_point(SweepScenario s, int i) {
  if (i < 1 || i > sweep_grid_size(s)) throw ConfigError("sweep index " + std::to_string(i) + " outside the grid");
  SweepPoint p;
  p.index = i;
  if (s == SweepScenario::Upper) {
    p.value = static_cast<double>(i);
    p.bounds = {{0.01, 0.01, 0.01}, {p.value, p.value, p.value}};
  } else {
    p.value = std::pow(10.0, static_cast<double>(i - 301) / 25.0);
    p.bounds = {{p.value, p.value, p.value}, {2.0, 2.0, 2.0}};
  }
  return p;
}

[[nodiscard]] inline std::vector<SweepPoint> sweep_points(const SweepSection& s) {
  const int last = s.last == 0 ? sweep_grid_size(s.scenario) : s.last;
  if (last > sweep_grid_size(s.scenario) || s.first > last) {
    throw ConfigError("sweep range " + std::to_string(s.first) + ".." + std::to_string(last) + " outside 1.." +
                      std::to_string(sweep_grid_size(s.scenario)));
  }
  std::vector<SweepPoint> out;
  for (int i = s.first; i <= last; i += s.stride) out.push_back(sweep_point(s.scenario, i));
  return out;
}

}  // namespace ringstab::cli
