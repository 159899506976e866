#pragma once

// Scaled unit system. Each unit is stored as a conversion factor to atomic
// units; hbar_scaled is the reduced Planck constant (1 a.u. of action)
// expressed in momentum_unit * length_unit.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "transient/errors.hpp"

namespace transient {

struct UnitSystem {
  double energy_unit = 1.0;
  double momentum_unit = 1.0;
  double length_unit = 1.0;
  double mass_unit = 1.0;
  double time_unit = 1.0;
  double hbar_scaled = 1.0;

  static UnitSystem from_factors(double e_u, double p_u, double l_u, double m_u,
                                 double t_u) {
    return {e_u, p_u, l_u, m_u, t_u, 1.0 / (p_u * l_u)};
  }

  double energy_to_au(double e) const { return e * energy_unit; }
  double momentum_to_au(double p) const { return p * momentum_unit; }
  double length_to_au(double x) const { return x * length_unit; }
  double mass_to_au(double m) const { return m * mass_unit; }
  double time_to_au(double t) const { return t * time_unit; }
};

/// The scaled units of the ultracold-rubidium figures:
/// e_u = 1e-13, p_u = 1e-4, l_u = 2e6, m_u = 1e5, t_u = 2e15 (atomic units).
inline UnitSystem paper_units() {
  return UnitSystem::from_factors(1e-13, 1e-4, 2e6, 1e5, 2e15);
}

struct UnitCheck {
  bool consistent = true;
  std::vector<std::string> violations;
};

inline UnitCheck validate(const UnitSystem& u, double rel_tol = 1e-12) {
  const double fields[] = {u.energy_unit, u.momentum_unit, u.length_unit,
                           u.mass_unit,   u.time_unit,     u.hbar_scaled};
  for (double f : fields) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw InputError("unit system: every conversion factor must be positive and finite");
    }
  }
  UnitCheck check;
  auto relation = [&](double lhs, double rhs, const char* name) {
    if (std::abs(lhs - rhs) > rel_tol * std::max(std::abs(lhs), std::abs(rhs))) {
      check.consistent = false;
      check.violations.emplace_back(name);
    }
  };
  relation(u.momentum_unit * u.momentum_unit / u.mass_unit, u.energy_unit,
           "kinetic energy consistency (p_u^2/m_u == e_u)");
  relation(u.energy_unit * u.time_unit, u.momentum_unit * u.length_unit,
           "action consistency (e_u*t_u == p_u*l_u)");
  relation(u.momentum_unit * u.time_unit / u.mass_unit, u.length_unit,
           "velocity consistency (p_u*t_u/m_u == l_u)");
  relation(u.hbar_scaled, 1.0 / (u.momentum_unit * u.length_unit),
           "hbar consistency (hbar == 1/(p_u*l_u))");
  return check;
}

inline double momentum_from_energy(double energy, double mass) {
  return std::sqrt(2.0 * mass * energy);
}

inline double energy_from_momentum(double p, double mass) { return p * p / (2.0 * mass); }

inline void to_json(nlohmann::json& j, const UnitSystem& u) {
  j = nlohmann::json{{"e_u", u.energy_unit}, {"p_u", u.momentum_unit},
                     {"l_u", u.length_unit}, {"m_u", u.mass_unit},
                     {"t_u", u.time_unit}};
}

/// Accepts either {"paper": true} or the five factors e_u, p_u, l_u, m_u, t_u.
inline void from_json(const nlohmann::json& j, UnitSystem& u) {
  if (j.is_string() && j.get<std::string>() == "paper") {
    u = paper_units();
    return;
  }
  if (!j.is_object()) throw InputError("units: expected an object or \"paper\"");
  if (j.value("paper", false)) {
    u = paper_units();
    return;
  }
  auto factor = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw InputError(std::string("units.") + key + ": missing or not a number");
    }
    const double v = j.at(key).get<double>();
    if (!(v > 0.0)) throw InputError(std::string("units.") + key + ": must be positive");
    return v;
  };
  const double e_u = factor("e_u");
  const double p_u = factor("p_u");
  const double l_u = factor("l_u");
  const double m_u = factor("m_u");
  const double t_u = factor("t_u");
  u = UnitSystem::from_factors(e_u, p_u, l_u, m_u, t_u);
}

}  // namespace transient
