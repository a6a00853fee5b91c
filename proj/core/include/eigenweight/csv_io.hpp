#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "eigenweight/grid.hpp"
#include "eigenweight/optimize.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

/// All floating-point output uses 17 significant digits so that emitted
/// values parse back bit-exactly.
std::string format_double(double x);
double parse_double(const std::string& token);  // accepts inf/-inf/nan

std::string emit_weight_csv(const Weight& w);                     // header element,value
Weight parse_weight_csv(const std::string& text, double element_measure);

std::string emit_step_csv(const StepRearrangement& r);            // header breakpoint,level
StepRearrangement parse_step_csv(const std::string& text);

std::string emit_trace_csv(const std::vector<TracePoint>& trace); // header iter,mu1,lambda1,gap
std::vector<TracePoint> parse_trace_csv(const std::string& text);

std::string emit_sweep_csv(const std::vector<SweepRow>& rows);    // header k,mu1,lambda1

std::string emit_eigenfunction_csv(const Grid& grid, const Eigen::VectorXd& u_full);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace eigenweight
