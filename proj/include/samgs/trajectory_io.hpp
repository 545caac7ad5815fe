#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "samgs/metrics.hpp"

namespace samgs {

/// Column names of the trajectory file, in order.
inline constexpr const char* kTrajectoryHeader =
    "t,theta_1,theta_2,loss_1,loss_2,loss_mtl,psi,branch,gnorm_1,gnorm_2";

/// Shortest decimal form that reads back to the identical double.
std::string format_double(double value);

/// Writes one header row and one comma-separated row per record. Quantities
/// a method does not produce (psi and branch outside SAM-GS, everything
/// gradient-related in row 0) are left empty.
void write_trajectory(std::ostream& out, std::span<const TrajectoryRecord> rows);
void write_trajectory_file(const std::string& path, std::span<const TrajectoryRecord> rows);

std::vector<TrajectoryRecord> read_trajectory(std::istream& in);

}  // namespace samgs
