#pragma once

#include "emitsim/box3d.hpp"
#include "emitsim/dynamics.hpp"
#include "emitsim/exact1d.hpp"
#include "emitsim/cli/units.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace emitsim::cli {

/// Parsed experiment configurations. All natural-model quantities are in
/// natural units (energy unit set by "epsilon"); box3d uses SI.

struct Exact1DRun {
  Exact1DConfig model;
  Eigen::VectorXd times;
  double spectrum_time = 0;
  Index spectrum_half_width = 0; // oscillators k with |k| <= this are written
};

struct Box3DRun {
  std::string preset; // "hydrogen-table2", "desk" or "custom"
  BoxSpec box;
  Index mode_cap = 0;
  Eigen::VectorXd times; // s
  double spectrum_time = 0;
  int angular_bins = 60;
};

struct KicksRun {
  double epsilon = 1, eta = 1;
  Index L = 1;
  KickSchedule schedule;
  int harmonics = 3;
  double tau_f() const { return natural_units_timescale(epsilon, eta); }
};

struct TwoAtomRun {
  TwoAtomSpec spec;
  Eigen::VectorXd times;
  double spectrum_time = 0;
};

nlohmann::json load_json(const std::filesystem::path& path);

Exact1DRun parse_exact1d(const nlohmann::json& j);
Box3DRun parse_box3d(const nlohmann::json& j);
KicksRun parse_kicks(const nlohmann::json& j);
TwoAtomRun parse_two_atom(const nlohmann::json& j);

} // namespace emitsim::cli
