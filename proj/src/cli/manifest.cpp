#include "emitsim/cli/manifest.hpp"
#include "emitsim/cli/checksum.hpp"

#include <fstream>

#ifndef EMITSIM_VERSION
#define EMITSIM_VERSION "0.0.0"
#endif

namespace emitsim::cli {

std::string code_version() { return EMITSIM_VERSION; }

void RunManifest::write(const std::filesystem::path& dir) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["config"] = config;
  j["code_version"] = code_version;
  j["wall_time_s"] = wall_time;
  j["outputs"] = nlohmann::json::array();
  for (auto& o : outputs) {
    o.checksum = hex64(file_checksum(dir / o.name));
    j["outputs"].push_back({{"file", o.name}, {"fnv1a64", o.checksum}});
  }
  j["results"] = results;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::read(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  const nlohmann::json j = nlohmann::json::parse(in);
  RunManifest m;
  m.experiment = j.at("experiment").get<std::string>();
  m.config = j.at("config");
  m.code_version = j.at("code_version").get<std::string>();
  m.wall_time = j.at("wall_time_s").get<double>();
  for (const auto& o : j.at("outputs"))
    m.outputs.push_back({o.at("file").get<std::string>(), o.at("fnv1a64").get<std::string>()});
  if (j.contains("results")) m.results = j["results"];
  return m;
}

bool RunManifest::verify(const std::filesystem::path& dir, std::string* problem) const {
  for (const auto& o : outputs) {
    const auto p = dir / o.name;
    if (!std::filesystem::exists(p)) {
      if (problem) *problem = "missing " + o.name;
      return false;
    }
    if (hex64(file_checksum(p)) != o.checksum) {
      if (problem) *problem = "checksum mismatch for " + o.name;
      return false;
    }
  }
  return true;
}

} // namespace emitsim::cli
