#pragma once

#include <string>

#include "dlab/descent.hpp"
#include "dlab/flow.hpp"

namespace dlab {

// Formats a double with 17 significant digits (round-trips bitwise).
std::string format_double(double v);

// Trace CSV, one header row:
//   k,x_0..x_{p-1},F,grad_norm,lambda_min,lambda_max,chi
// chi is evaluated around z = 0 with the given radius. UTF-8, LF endings.
void write_trace_csv(const std::string& path, const Trace& trace, double chi_radius);
Trace read_trace_csv(const std::string& path);

// FlowTrace CSV, one header row:
//   t,y_0..y_{p-1},F,grad_norm,dissipation,winding
void write_flow_csv(const std::string& path, const FlowTrace& trace);
FlowTrace read_flow_csv(const std::string& path);

std::size_t csv_row_count(const std::string& path);  // data rows (header excluded)

}  // namespace dlab
