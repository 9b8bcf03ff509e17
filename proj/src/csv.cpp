#include "fcpd/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fcpd {

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> out;
  std::size_t col = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    std::string cell = line.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    // Trim surrounding whitespace.
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cell = a == std::string::npos ? std::string() : cell.substr(a, b - a + 1);
    ++col;
    if (cell.empty()) {
      throw std::invalid_argument("csv: empty cell at line " + std::to_string(lineno) +
                                  ", column " + std::to_string(col));
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != cell.size() || !std::isfinite(value)) {
      throw std::invalid_argument("csv: bad numeric value '" + cell + "' at line " +
                                  std::to_string(lineno) + ", column " +
                                  std::to_string(col));
    }
    out.push_back(value);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

FSeries read_csv(const std::string& path, bool first_row_is_grid) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::optional<std::vector<double>> grid_points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row = parse_row(line, lineno);
    if (first_row_is_grid && !grid_points) {
      grid_points = std::move(row);
      continue;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument(
          "csv: line " + std::to_string(lineno) + " has " +
          std::to_string(row.size()) + " columns, expected " +
          std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) {
    throw std::invalid_argument("csv: need at least 2 data rows in '" + path + "'");
  }
  const auto m = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), m);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      data(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  if (grid_points) {
    if (static_cast<Eigen::Index>(grid_points->size()) != m) {
      throw std::invalid_argument("csv: grid row length does not match data columns");
    }
    Eigen::VectorXd pts(m);
    for (Eigen::Index j = 0; j < m; ++j) pts[j] = (*grid_points)[static_cast<std::size_t>(j)];
    return FSeries(std::move(data), Grid::trapezoid(std::move(pts)));
  }
  return FSeries(std::move(data), Grid::equispaced01(m));
}

void write_csv(const std::string& path, const FSeries& xs, bool grid_row,
               const std::optional<std::string>& comment) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("csv: cannot write '" + path + "'");
  out.precision(17);
  if (comment) {
    std::istringstream lines(*comment);
    std::string line;
    while (std::getline(lines, line)) out << "# " << line << "\n";
  }
  const auto write_row = [&](const Eigen::VectorXd& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (j) out << ',';
      out << v[j];
    }
    out << "\n";
  };
  if (grid_row) write_row(xs.grid().points());
  for (Eigen::Index i = 0; i < xs.n(); ++i) {
    write_row(xs.data().row(i).transpose());
  }
  if (!out) throw std::invalid_argument("csv: write failed for '" + path + "'");
}

}  // namespace fcpd
