// svg.hpp — self-contained SVG renderers for tables

#pragma once

#include <string>

#include "cli/table.hpp"

namespace hierenv::cli {

// Line plot of column y_column against x_column.
std::string svg_line_plot(const Table& table, const std::string& x_column,
                          const std::string& y_column, const std::string& title);

// Heat map of `metric` over the (omega, n) plane with the phase boundary
// drawn as a step polyline. Speedup cells are classified by
// qsl_ratio < 1 - 1e-9, non-Markovian cells by nonmarkovianity > 1e-6.
std::string svg_heat_map(const Table& table, const std::string& metric,
                         const std::string& title);

}  // namespace hierenv::cli
