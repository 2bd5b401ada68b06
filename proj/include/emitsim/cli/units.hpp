#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace emitsim::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Dimension {
  dimensionless,
  angle,          // rad
  length,         // m
  wavenumber,     // 1/m
  dipole,         // C m
  time_si,        // s
  rate_si,        // 1/s
  time_natural,   // hbar / energy unit
  energy_natural, // energy unit (epsilon scale)
};

std::string to_string(Dimension d);

/// Scales that turn relative units into base units of the natural models.
struct UnitContext {
  double tau_f = 0; // golden-rule decay time, natural time units
  double gamma = 0; // natural linewidth 2 pi eta^2 / epsilon, energy units
  double epsilon = 0;
};

/// Parses "<number> <unit>" or {"value": x, "unit": "u"} into the base unit
/// of `expected`. A missing, unknown or mismatched unit is a ConfigError.
double parse_quantity(const nlohmann::json& j, Dimension expected, const std::string& key,
                      const UnitContext& ctx = {});

} // namespace emitsim::cli
