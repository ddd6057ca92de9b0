#pragma once

#include "dofoc/time_grid.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace dofoc::cli {

/// Unreadable or malformed artifact file.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest locale-independent text carrying 17 significant digits.
std::string format_double(double value);

/// CSV with header "t,<prefix>1,...,<prefix>n" and one row per node.
std::string trajectory_csv(const Trajectory& traj, const std::string& prefix);

/// Reads a CSV written by trajectory_csv. Throws ArtifactError on malformed
/// text and GridMismatchError when rows or times disagree with grid.
Trajectory read_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid, int dim,
                               const std::string& prefix);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace dofoc::cli
