#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "eigenweight/config.hpp"

namespace eigenweight {

/// Executes one configured task and writes its artifacts (summary,
/// trace.csv, weight.csv, eigenfunction.csv, and for maximize under
/// Dirichlet the computed and analytic rearrangement CSVs) into the
/// output directory. Returns the process exit status: 0 when the task
/// converged (a weight without positive eigenvalues is a valid solve
/// outcome), nonzero otherwise.
int run(const RunConfig& config, std::ostream& log, const std::string& output_dir_override = "");

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

/// The invariant battery: homogeneity, derivative versus central finite
/// differences, convexity along random segments, the Hardy-Littlewood
/// bracket, and both optimizers against exhaustive permutation search on
/// six cells. Deterministic for a fixed seed.
ValidationReport validate_suite(std::uint64_t seed = 42);

}  // namespace eigenweight
