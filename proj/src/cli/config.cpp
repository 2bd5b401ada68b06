#include "emitsim/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace emitsim::cli {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

namespace {

void allow_keys(const json& j, const std::set<std::string>& keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

const json& need(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config: missing '" + key + "'");
  return j.at(key);
}

Index integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("config '" + key + "': expected an integer");
  return j.get<Index>();
}

void check_experiment(const json& j, const std::string& name) {
  const json& e = need(j, "experiment");
  if (!e.is_string() || e.get<std::string>() != name)
    throw ConfigError("config: 'experiment' must be \"" + name + "\"");
}

// "L" (oscillators at k epsilon, 1 <= |k| <= L) or "N" = 2L + 1 states.
Index band(const json& j) {
  if (j.contains("L") && j.contains("N")) throw ConfigError("config: give either 'L' or 'N'");
  Index l;
  if (j.contains("N")) {
    const Index n = integer(j["N"], "N");
    if (n < 3 || n % 2 == 0) throw ConfigError("config 'N': must be odd and >= 3");
    l = (n - 1) / 2;
  } else {
    l = integer(need(j, "L"), "L");
  }
  if (l < 1) throw ConfigError("config 'L': must be >= 1");
  return l;
}

Eigen::VectorXd time_grid(const json& j, Dimension dim, const UnitContext& ctx) {
  allow_keys(j, {"start", "stop", "points"}, "times");
  const double a = parse_quantity(need(j, "start"), dim, "times.start", ctx);
  const double b = parse_quantity(need(j, "stop"), dim, "times.stop", ctx);
  const Index n = integer(need(j, "points"), "times.points");
  if (n < 1) throw ConfigError("config 'times.points': must be >= 1");
  if (a < 0 || b < a) throw ConfigError("config 'times': need 0 <= start <= stop");
  if (n == 1) return Eigen::VectorXd::Constant(1, a);
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

struct NaturalModel {
  double epsilon, eta;
  UnitContext ctx;
};

NaturalModel natural_model(const json& j) {
  NaturalModel m;
  m.epsilon = parse_quantity(need(j, "epsilon"), Dimension::energy_natural, "epsilon");
  m.eta = m.epsilon *
          parse_quantity(need(j, "eta_over_epsilon"), Dimension::dimensionless, "eta_over_epsilon");
  if (!(m.epsilon > 0)) throw ConfigError("config 'epsilon': must be > 0");
  if (!(m.eta > 0)) throw ConfigError("config 'eta_over_epsilon': must be > 0");
  m.ctx.epsilon = m.epsilon;
  m.ctx.tau_f = natural_units_timescale(m.epsilon, m.eta);
  m.ctx.gamma = 1 / m.ctx.tau_f;
  return m;
}

} // namespace

Exact1DRun parse_exact1d(const json& j) {
  allow_keys(j, {"experiment", "epsilon", "eta_over_epsilon", "L", "N", "times", "spectrum"},
             "exact1d config");
  check_experiment(j, "exact1d");
  const NaturalModel m = natural_model(j);
  Exact1DRun r;
  r.model = {m.epsilon, m.eta, band(j)};
  r.times = time_grid(need(j, "times"), Dimension::time_natural, m.ctx);
  r.spectrum_time = 8 * m.ctx.tau_f;
  double half = 10 * m.ctx.gamma;
  if (j.contains("spectrum")) {
    const json& s = j["spectrum"];
    allow_keys(s, {"time", "half_width"}, "spectrum");
    if (s.contains("time"))
      r.spectrum_time = parse_quantity(s["time"], Dimension::time_natural, "spectrum.time", m.ctx);
    if (s.contains("half_width"))
      half = parse_quantity(s["half_width"], Dimension::energy_natural, "spectrum.half_width", m.ctx);
  }
  if (r.spectrum_time < 0) throw ConfigError("config 'spectrum.time': must be >= 0");
  if (!(half > 0)) throw ConfigError("config 'spectrum.half_width': must be > 0");
  r.spectrum_half_width = std::min<Index>(r.model.L, static_cast<Index>(std::ceil(half / m.epsilon)));
  return r;
}

Box3DRun parse_box3d(const json& j) {
  allow_keys(j, {"experiment", "preset", "target_modes", "box", "normalization", "mode_cap",
                 "times", "spectrum_time", "angular_bins"},
             "box3d config");
  check_experiment(j, "box3d");
  Box3DRun r;
  r.preset = need(j, "preset").get<std::string>();
  if (r.preset == "hydrogen-table2") {
    r.box = hydrogen_reference_box();
  } else if (r.preset == "desk") {
    const double target = j.contains("target_modes")
                              ? static_cast<double>(integer(j["target_modes"], "target_modes"))
                              : 2000.0;
    if (target < 1) throw ConfigError("config 'target_modes': must be >= 1");
    r.box = desk_box(target);
  } else if (r.preset == "custom") {
    const json& b = need(j, "box");
    allow_keys(b, {"lengths", "lambda0", "k0", "delta", "mu"}, "box");
    const json& l = need(b, "lengths");
    if (!l.is_array() || l.size() != 3) throw ConfigError("config 'box.lengths': need 3 lengths");
    for (int a = 0; a < 3; ++a)
      r.box.lengths(a) = parse_quantity(l[a], Dimension::length, "box.lengths");
    if (b.contains("lambda0") == b.contains("k0"))
      throw ConfigError("config 'box': give exactly one of 'lambda0' or 'k0'");
    r.box.k0 = b.contains("k0")
                   ? parse_quantity(b["k0"], Dimension::wavenumber, "box.k0")
                   : 2 * std::numbers::pi / parse_quantity(b["lambda0"], Dimension::length, "box.lambda0");
    r.box.delta = parse_quantity(need(b, "delta"), Dimension::wavenumber, "box.delta");
    r.box.mu = b.contains("mu") ? parse_quantity(b["mu"], Dimension::dipole, "box.mu")
                                : hydrogen_dipole_moment();
  } else {
    throw ConfigError("config 'preset': expected hydrogen-table2, desk or custom");
  }
  if (j.contains("normalization")) {
    const std::string n = j["normalization"].get<std::string>();
    if (n == "single_photon") r.box.normalization = FieldNormalization::single_photon;
    else if (n == "literal") r.box.normalization = FieldNormalization::literal;
    else throw ConfigError("config 'normalization': expected single_photon or literal");
  }
  try {
    r.box.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config 'box': ") + e.what());
  }
  r.mode_cap = integer(need(j, "mode_cap"), "mode_cap");
  if (r.mode_cap < 1) throw ConfigError("config 'mode_cap': must be >= 1");
  r.times = time_grid(need(j, "times"), Dimension::time_si, {});
  r.spectrum_time = j.contains("spectrum_time")
                        ? parse_quantity(j["spectrum_time"], Dimension::time_si, "spectrum_time")
                        : r.times(r.times.size() - 1);
  if (j.contains("angular_bins")) r.angular_bins = static_cast<int>(integer(j["angular_bins"], "angular_bins"));
  if (r.angular_bins < 1) throw ConfigError("config 'angular_bins': must be >= 1");
  return r;
}

KicksRun parse_kicks(const json& j) {
  allow_keys(j, {"experiment", "epsilon", "eta_over_epsilon", "L", "N", "phi", "tau_r",
                 "total_time", "harmonics"},
             "kicks config");
  check_experiment(j, "kicks");
  const NaturalModel m = natural_model(j);
  KicksRun r;
  r.epsilon = m.epsilon;
  r.eta = m.eta;
  r.L = band(j);
  const double phi = parse_quantity(need(j, "phi"), Dimension::angle, "phi");
  const double tau_r = parse_quantity(need(j, "tau_r"), Dimension::time_natural, "tau_r", m.ctx);
  const double total = j.contains("total_time")
                           ? parse_quantity(j["total_time"], Dimension::time_natural, "total_time", m.ctx)
                           : 10 * m.ctx.tau_f;
  if (!(tau_r > 0)) throw ConfigError("config 'tau_r': must be > 0");
  if (!(total >= tau_r)) throw ConfigError("config 'total_time': must be >= tau_r");
  r.schedule = KickSchedule::periodic(phi, tau_r, total);
  if (j.contains("harmonics")) r.harmonics = static_cast<int>(integer(j["harmonics"], "harmonics"));
  if (r.harmonics < 1) throw ConfigError("config 'harmonics': must be >= 1");
  return r;
}

TwoAtomRun parse_two_atom(const json& j) {
  allow_keys(j, {"experiment", "epsilon", "eta_over_epsilon", "L", "N", "delta1", "delta2",
                 "omega_d", "initial", "spectrum_time", "times"},
             "two-atom config");
  check_experiment(j, "two-atom");
  const NaturalModel m = natural_model(j);
  TwoAtomRun r;
  r.spec.epsilon = m.epsilon;
  r.spec.eta = m.eta;
  r.spec.L = band(j);
  auto energy = [&](const char* key) {
    return j.contains(key) ? parse_quantity(j[key], Dimension::energy_natural, key, m.ctx) : 0.0;
  };
  r.spec.delta1 = energy("delta1");
  r.spec.delta2 = energy("delta2");
  r.spec.omega_d = energy("omega_d");
  const json& init = need(j, "initial");
  if (!init.is_string()) throw ConfigError("config 'initial': expected a state tag");
  try {
    r.spec.initial = parse_initial_state(init.get<std::string>());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config 'initial': ") + e.what());
  }
  r.times = time_grid(need(j, "times"), Dimension::time_natural, m.ctx);
  r.spectrum_time = j.contains("spectrum_time")
                        ? parse_quantity(j["spectrum_time"], Dimension::time_natural, "spectrum_time", m.ctx)
                        : 8 * m.ctx.tau_f;
  if (r.spectrum_time < 0) throw ConfigError("config 'spectrum_time': must be >= 0");
  return r;
}

} // namespace emitsim::cli
