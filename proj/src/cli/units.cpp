#include "emitsim/cli/units.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace emitsim::cli {

std::string to_string(Dimension d) {
  switch (d) {
  case Dimension::dimensionless: return "dimensionless";
  case Dimension::angle: return "angle";
  case Dimension::length: return "length";
  case Dimension::wavenumber: return "wavenumber";
  case Dimension::dipole: return "dipole moment";
  case Dimension::time_si: return "time (SI)";
  case Dimension::rate_si: return "rate (SI)";
  case Dimension::time_natural: return "time (natural units)";
  case Dimension::energy_natural: return "energy (natural units)";
  }
  return "?";
}

namespace {

enum class Scale { fixed, tau_f, gamma, epsilon };

struct Unit {
  Dimension dim;
  double factor;
  Scale scale = Scale::fixed;
};

const std::map<std::string, Unit>& units() {
  static const std::map<std::string, Unit> table = {
      {"1", {Dimension::dimensionless, 1}},
      {"rad", {Dimension::angle, 1}},
      {"deg", {Dimension::angle, std::numbers::pi / 180}},
      {"m", {Dimension::length, 1}},
      {"mm", {Dimension::length, 1e-3}},
      {"um", {Dimension::length, 1e-6}},
      {"nm", {Dimension::length, 1e-9}},
      {"1/m", {Dimension::wavenumber, 1}},
      {"1/mm", {Dimension::wavenumber, 1e3}},
      {"C*m", {Dimension::dipole, 1}},
      {"s", {Dimension::time_si, 1}},
      {"ms", {Dimension::time_si, 1e-3}},
      {"us", {Dimension::time_si, 1e-6}},
      {"ns", {Dimension::time_si, 1e-9}},
      {"ps", {Dimension::time_si, 1e-12}},
      {"1/s", {Dimension::rate_si, 1}},
      {"natural", {Dimension::time_natural, 1}},
      {"tau_F", {Dimension::time_natural, 1, Scale::tau_f}},
      {"energy", {Dimension::energy_natural, 1}},
      {"epsilon", {Dimension::energy_natural, 1, Scale::epsilon}},
      {"Gamma", {Dimension::energy_natural, 1, Scale::gamma}},
  };
  return table;
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw ConfigError("config '" + key + "': " + why);
}

} // namespace

double parse_quantity(const nlohmann::json& j, Dimension expected, const std::string& key,
                      const UnitContext& ctx) {
  double value = 0;
  std::string unit;
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    if (!(in >> value)) fail(key, "expected '<number> <unit>'");
    if (!(in >> unit)) fail(key, "missing unit");
    std::string extra;
    if (in >> extra) fail(key, "trailing text '" + extra + "'");
  } else if (j.is_object()) {
    if (!j.contains("value") || !j["value"].is_number()) fail(key, "missing numeric 'value'");
    if (!j.contains("unit") || !j["unit"].is_string()) fail(key, "missing unit");
    value = j["value"].get<double>();
    unit = j["unit"].get<std::string>();
  } else if (j.is_number() && expected == Dimension::dimensionless) {
    value = j.get<double>();
    unit = "1";
  } else {
    fail(key, "expected a quantity with an explicit unit");
  }
  const auto it = units().find(unit);
  if (it == units().end()) fail(key, "unknown unit '" + unit + "'");
  const Unit& u = it->second;
  if (u.dim != expected)
    fail(key, "unit '" + unit + "' is a " + to_string(u.dim) + ", expected " + to_string(expected));
  double scale = u.factor;
  switch (u.scale) {
  case Scale::fixed: break;
  case Scale::tau_f:
    if (!(ctx.tau_f > 0)) fail(key, "tau_F is not defined here");
    scale *= ctx.tau_f;
    break;
  case Scale::gamma:
    if (!(ctx.gamma > 0)) fail(key, "Gamma is not defined here");
    scale *= ctx.gamma;
    break;
  case Scale::epsilon:
    if (!(ctx.epsilon > 0)) fail(key, "epsilon is not defined here");
    scale *= ctx.epsilon;
    break;
  }
  const double v = value * scale;
  if (!std::isfinite(v)) fail(key, "value is not finite");
  return v;
}

} // namespace emitsim::cli
