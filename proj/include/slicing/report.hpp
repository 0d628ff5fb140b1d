#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slicing/metrics.hpp"

namespace slicing {

inline constexpr const char* kReportHeader =
    "num_small_cells,users_per_cell,slice,mean_capacity_bps,std_bps,num_seeds";

// Rows sorted by (num_small_cells, users_per_cell, slice in eMBB, uRLLC, IoT
// order); capacities as fixed-point decimals with three digits.
std::string format_report_csv(std::vector<SliceReport> reports);

// Throws Error(Io) naming the path.
void write_report(const std::vector<SliceReport>& reports, const std::filesystem::path& path);

// One line chart per slice (capacity_<slice>.svg), one polyline per users-per-cell
// value. Returns the written paths.
std::vector<std::filesystem::path> write_svg_charts(const std::vector<SliceReport>& reports,
                                                    const std::filesystem::path& dir);

std::string format_svg_chart(const std::vector<SliceReport>& reports, Slice slice);

// Writes the string exactly; throws Error(Io) naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace slicing
