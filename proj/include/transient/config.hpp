#pragma once

// Run configuration loaded from JSON.
//
// {
//   "units":   {"paper": true} | {"e_u":..,"p_u":..,"l_u":..,"m_u":..,"t_u":..},
//   "hbar":    optional action override in scaled units (default: units' hbar),
//   "barrier": {"V0":..,"d":..,"m":..},
//   "packet":  {"delta_x":..,"p_c":.., "x0":.. | "alpha":..},
//   "engine":  "analytic" | "oracle" | "both",
//   "grid":    {"n":..,"x_min":..,"x_max":..,"dt":..}   (oracle only)
//   ... task blocks: "evolve", "gqmax", "argand", "poles", "compare"
// }

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "transient/analytic.hpp"
#include "transient/barrier.hpp"
#include "transient/errors.hpp"
#include "transient/split_operator.hpp"
#include "transient/units.hpp"

namespace transient {

enum class Engine { Analytic, Oracle, Both };

inline std::string to_string(Engine e) {
  switch (e) {
    case Engine::Analytic: return "analytic";
    case Engine::Oracle: return "oracle";
    case Engine::Both: return "both";
  }
  return "?";
}

struct GridSettings {
  SpatialGrid grid{-400.0, 400.0, std::size_t{1} << 16};
  double dt = 1e-4;
};

struct RunConfig {
  UnitSystem units = paper_units();
  double hbar = 1.0;
  BarrierSpec barrier;
  GaussianPacket packet;
  Engine engine = Engine::Both;
  GridSettings grid;
  bool grid_overridden = false;
  nlohmann::json tasks = nlohmann::json::object();

  bool uses_analytic() const { return engine != Engine::Oracle; }
  bool uses_oracle() const { return engine != Engine::Analytic; }

  /// Task block by name, or an empty object.
  const nlohmann::json& task(const std::string& name) const {
    static const nlohmann::json empty = nlohmann::json::object();
    auto it = tasks.find(name);
    return it == tasks.end() ? empty : *it;
  }

  nlohmann::json resolved() const {
    nlohmann::json j;
    j["units"] = units;
    j["hbar"] = hbar;
    j["barrier"] = {{"V0", barrier.V0}, {"d", barrier.d}, {"m", barrier.m}};
    j["packet"] = {{"delta_x", packet.delta_x}, {"p_c", packet.p_c}, {"alpha", packet.alpha},
                   {"x0", packet.x0()}};
    j["engine"] = to_string(engine);
    if (uses_oracle()) {
      j["grid"] = {{"n", grid.grid.n}, {"x_min", grid.grid.x_min}, {"x_max", grid.grid.x_max},
                   {"dt", grid.dt}};
    }
    for (auto it = tasks.begin(); it != tasks.end(); ++it) j[it.key()] = it.value();
    return j;
  }
};

namespace detail {

inline double positive_number(const nlohmann::json& obj, const std::string& block,
                              const std::string& key) {
  if (!obj.contains(key)) throw InputError(block + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InputError(block + "." + key + ": not a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw InputError(block + "." + key + ": must be positive");
  return x;
}

inline double number(const nlohmann::json& obj, const std::string& block, const std::string& key) {
  if (!obj.contains(key)) throw InputError(block + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InputError(block + "." + key + ": not a number");
  return v.get<double>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config: top level must be an object");
  RunConfig c;

  if (j.contains("units")) {
    c.units = j.at("units").get<UnitSystem>();
    const auto check = validate(c.units);
    if (!check.consistent) throw InputError("units: " + check.violations.front());
  }
  c.hbar = c.units.hbar_scaled;
  if (j.contains("hbar")) c.hbar = detail::positive_number(j, "config", "hbar");

  if (!j.contains("barrier") || !j.at("barrier").is_object()) throw InputError("barrier: missing block");
  const auto& b = j.at("barrier");
  if (!b.contains("V0") || !b.at("V0").is_number()) throw InputError("barrier.V0: missing or not a number");
  c.barrier.V0 = b.at("V0").get<double>();
  if (!(c.barrier.V0 >= 0.0)) throw InputError("barrier.V0: must be >= 0");
  c.barrier.d = detail::positive_number(b, "barrier", "d");
  c.barrier.m = detail::positive_number(b, "barrier", "m");

  if (!j.contains("packet") || !j.at("packet").is_object()) throw InputError("packet: missing block");
  const auto& p = j.at("packet");
  const double delta_x = detail::positive_number(p, "packet", "delta_x");
  const double p_c = detail::positive_number(p, "packet", "p_c");
  if (p.contains("x0") == p.contains("alpha")) {
    throw InputError("packet.x0: give exactly one of x0 or alpha");
  }
  if (p.contains("x0")) {
    const double x0 = detail::number(p, "packet", "x0");
    if (!(x0 < 0.0)) throw InputError("packet.x0: must be negative (left of the barrier)");
    c.packet = GaussianPacket::from_center(delta_x, p_c, x0, c.hbar);
  } else {
    c.packet = {delta_x, p_c, detail::positive_number(p, "packet", "alpha"), c.hbar};
  }

  if (j.contains("engine")) {
    if (!j.at("engine").is_string()) throw InputError("engine: must be a string");
    const auto e = j.at("engine").get<std::string>();
    if (e == "analytic") c.engine = Engine::Analytic;
    else if (e == "oracle") c.engine = Engine::Oracle;
    else if (e == "both") c.engine = Engine::Both;
    else throw InputError("engine: expected analytic, oracle or both");
  }

  if (j.contains("grid")) {
    if (c.engine == Engine::Analytic) throw InputError("grid: overrides require the oracle engine");
    const auto& g = j.at("grid");
    if (!g.is_object()) throw InputError("grid: must be an object");
    c.grid_overridden = true;
    if (g.contains("n")) {
      if (!g.at("n").is_number_integer() || g.at("n").get<long long>() < 2) {
        throw InputError("grid.n: must be an integer power of two");
      }
      c.grid.grid.n = g.at("n").get<std::size_t>();
    }
    if (g.contains("x_min")) c.grid.grid.x_min = detail::number(g, "grid", "x_min");
    if (g.contains("x_max")) c.grid.grid.x_max = detail::number(g, "grid", "x_max");
    if (g.contains("dt")) c.grid.dt = detail::positive_number(g, "grid", "dt");
    c.grid.grid.validate();
  }

  c.barrier.validate();
  c.packet.validate(c.barrier);

  for (const char* name : {"evolve", "gqmax", "argand", "poles", "compare"}) {
    if (j.contains(name)) {
      if (!j.at(name).is_object()) throw InputError(std::string(name) + ": must be an object");
      c.tasks[name] = j.at(name);
    }
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace transient
