#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace emitsim::cli {

struct OutputFile {
  std::string name; // relative to the output directory
  std::string checksum;
};

struct RunManifest {
  std::string experiment;
  nlohmann::json config;
  std::string code_version;
  double wall_time = 0; // s
  std::vector<OutputFile> outputs;
  nlohmann::json results = nlohmann::json::object();

  /// Checksums every output in `dir` and writes manifest.json there.
  void write(const std::filesystem::path& dir);
  static RunManifest read(const std::filesystem::path& file);
  /// True when each listed file exists and matches its checksum.
  bool verify(const std::filesystem::path& dir, std::string* problem = nullptr) const;
};

std::string code_version();

} // namespace emitsim::cli
