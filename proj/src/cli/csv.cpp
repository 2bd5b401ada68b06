#include "emitsim/cli/csv.hpp"
#include "emitsim/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace emitsim::cli {

void write_csv(const std::filesystem::path& path, const std::string& title,
               const std::vector<Column>& columns) {
  if (columns.empty()) throw DomainError("write_csv: no columns");
  const Index rows = columns.front().data->size();
  for (const auto& c : columns)
    if (c.data->size() != rows) throw DomainError("write_csv: ragged columns in " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# " << title << '\n';
  out << "# columns:";
  for (const auto& c : columns) out << ' ' << c.name << " [" << c.unit << ']';
  out << '\n';
  char buf[32];
  for (Index i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", (*columns[c].data)(i));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace emitsim::cli
