#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eigenweight/grid.hpp"

namespace eigenweight {

enum class Task { Solve, Minimize, Maximize, Sweep, Probe };

std::string task_name(Task t);

/// Two-valued ("bang-bang") weight: v_plus on round(fraction_plus * n)
/// elements (lowest element indices first), v_minus on the rest.
struct TwoValuedSpec {
  double v_plus = 0.0;
  double fraction_plus = 0.0;
  double v_minus = 0.0;
};

struct WeightFileSpec {
  std::string path;
};

using WeightSpec = std::variant<std::vector<double>, TwoValuedSpec, WeightFileSpec>;

/// One experiment, parsed from the flat key = value config format.
///
/// Keys: domain, elements_per_axis, bc, sigma (Robin only), task, one of
/// weight_values | weight_twovalued | weight_file, and the optional tol,
/// max_iter, seed, output_dir, stripes. Unknown keys are rejected.
struct RunConfig {
  DomainSpec domain;
  int elements_per_axis = 0;
  BcSpec bc;
  WeightSpec weight;
  Task task = Task::Solve;
  double tol = 0.0;       // 0 = task default
  int max_iter = 0;       // 0 = task default
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  std::vector<int> stripes{2, 4, 8, 16};
};

/// Parses and validates a config. Throws std::invalid_argument with a
/// message naming the offending key on unknown keys, missing keys, type
/// errors, and regime mismatches that are decidable from the text alone
/// (inline weights only; file weights are checked when loaded).
RunConfig parse_config(const std::string& text);

/// Materializes the weight on a built grid (reads weight_file here).
class Grid;
struct Weight;
Weight realize_weight(const RunConfig& config, const Grid& grid);

}  // namespace eigenweight
