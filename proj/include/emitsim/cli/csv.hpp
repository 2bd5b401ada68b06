#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace emitsim::cli {

struct Column {
  std::string name;
  std::string unit; // "1" for dimensionless
  const Eigen::VectorXd* data;
};

/// '#' header lines (title, then "name [unit]" per column) followed by
/// comma-separated rows at 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::string& title,
               const std::vector<Column>& columns);

/// Numeric rows of a file written by write_csv.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path);

} // namespace emitsim::cli
