#include "cli/artifacts.hpp"

#include "dofoc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace dofoc::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream os;
    os << path.string() << ":" << line << ": not a number: '" << text << "'";
    throw ArtifactError(os.str());
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc()) throw ArtifactError("number formatting failed");
  return std::string(buf, ptr);
}

std::string trajectory_csv(const Trajectory& traj, const std::string& prefix) {
  std::string out = "t";
  for (int k = 1; k <= traj.dim(); ++k) out += "," + prefix + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj.grid()[i]);
    for (int k = 0; k < traj.dim(); ++k) {
      out += ',';
      out += format_double(traj(i, k));
    }
    out += '\n';
  }
  return out;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid, int dim,
                               const std::string& prefix) {
  std::ifstream in(path);
  if (!in) throw ArtifactError("cannot read " + path.string());
  std::string line;
  std::string expected = "t";
  for (int k = 1; k <= dim; ++k) expected += "," + prefix + std::to_string(k);
  if (!std::getline(in, line) || line != expected) {
    throw ArtifactError(path.string() + ": header must be '" + expected + "'");
  }
  SampleMatrix values(static_cast<Eigen::Index>(grid.size()), dim);
  std::size_t row = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (row >= grid.size()) throw GridMismatchError(path.string() + ": more rows than grid nodes");
    const std::vector<std::string> cells = split(line);
    if (static_cast<int>(cells.size()) != dim + 1) {
      throw ArtifactError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
    }
    const double t = parse_double(cells[0], path, line_no);
    const double node = grid[row];
    if (std::abs(t - node) > 1e-9 * std::max(1.0, std::abs(node))) {
      throw GridMismatchError(path.string() + ":" + std::to_string(line_no) + ": time " + cells[0] +
                              " does not match grid node " + format_double(node));
    }
    for (int k = 0; k < dim; ++k) {
      values(static_cast<Eigen::Index>(row), k) = parse_double(cells[static_cast<std::size_t>(k) + 1], path, line_no);
    }
    ++row;
  }
  if (row != grid.size()) {
    throw GridMismatchError(path.string() + ": " + std::to_string(row) + " rows for " +
                            std::to_string(grid.size()) + " grid nodes");
  }
  try {
    return Trajectory(grid, std::move(values));
  } catch (const GridMismatchError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ArtifactError(path.string() + ": " + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArtifactError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ArtifactError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ArtifactError("cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace dofoc::cli
