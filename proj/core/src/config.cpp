#include "eigenweight/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eigenweight/csv_io.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

std::string task_name(Task t) {
  switch (t) {
    case Task::Solve: return "solve";
    case Task::Minimize: return "minimize";
    case Task::Maximize: return "maximize";
    case Task::Sweep: return "sweep";
    case Task::Probe: return "probe";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("key '" + key + "': empty list entry");
    try {
      out.push_back(parse_double(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("key '" + key + "': '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw std::invalid_argument("key '" + key + "': empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (double v : parse_double_list(key, value)) {
    if (v != std::floor(v))
      throw std::invalid_argument("key '" + key + "': expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const auto list = parse_int_list(key, value);
  if (list.size() != 1) throw std::invalid_argument("key '" + key + "': expected one integer");
  return list.front();
}

const std::set<std::string> kKnownKeys = {
    "domain", "elements_per_axis", "bc",    "sigma",      "weight_values",
    "weight_twovalued", "weight_file",      "task",       "tol",
    "max_iter", "seed",  "output_dir",      "stripes"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw std::invalid_argument("unknown key '" + key + "'");
    if (kv.count(key))
      throw std::invalid_argument("duplicate key '" + key + "'");
    if (value.empty())
      throw std::invalid_argument("key '" + key + "' has no value");
    kv[key] = value;
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing required key '" + key + "'");
    return it->second;
  };

  RunConfig cfg;

  const auto extents = parse_double_list("domain", require("domain"));
  if (extents.size() == 2) {
    cfg.domain.dimension = 1;
    cfg.domain.lo = {extents[0], 0.0};
    cfg.domain.hi = {extents[1], 0.0};
  } else if (extents.size() == 4) {
    cfg.domain.dimension = 2;
    cfg.domain.lo = {extents[0], extents[1]};
    cfg.domain.hi = {extents[2], extents[3]};
  } else {
    throw std::invalid_argument(
        "key 'domain': expected 2 numbers (interval) or 4 (rectangle corners ax,ay,bx,by)");
  }

  cfg.elements_per_axis = parse_int("elements_per_axis", require("elements_per_axis"));

  const std::string bc = require("bc");
  if (bc == "dirichlet") {
    cfg.bc.kind = BcKind::Dirichlet;
    if (kv.count("sigma"))
      throw std::invalid_argument("key 'sigma' given but bc = dirichlet");
  } else if (bc == "robin") {
    cfg.bc.kind = BcKind::Robin;
    cfg.bc.sigma = parse_double_list("sigma", require("sigma"));
  } else {
    throw std::invalid_argument("key 'bc': expected dirichlet or robin, got '" + bc + "'");
  }

  const std::string task = require("task");
  if (task == "solve") cfg.task = Task::Solve;
  else if (task == "minimize") cfg.task = Task::Minimize;
  else if (task == "maximize") cfg.task = Task::Maximize;
  else if (task == "sweep") cfg.task = Task::Sweep;
  else if (task == "probe") cfg.task = Task::Probe;
  else throw std::invalid_argument("key 'task': unknown task '" + task + "'");

  const int weight_keys = static_cast<int>(kv.count("weight_values")) +
                          static_cast<int>(kv.count("weight_twovalued")) +
                          static_cast<int>(kv.count("weight_file"));
  if (weight_keys != 1)
    throw std::invalid_argument(
        "exactly one of weight_values, weight_twovalued, weight_file is required");
  if (kv.count("weight_values")) {
    cfg.weight = parse_double_list("weight_values", kv["weight_values"]);
  } else if (kv.count("weight_twovalued")) {
    const auto v = parse_double_list("weight_twovalued", kv["weight_twovalued"]);
    if (v.size() != 3)
      throw std::invalid_argument("key 'weight_twovalued': expected v_plus,fraction_plus,v_minus");
    if (!(v[1] >= 0.0 && v[1] <= 1.0))
      throw std::invalid_argument("key 'weight_twovalued': fraction_plus must be in [0,1]");
    cfg.weight = TwoValuedSpec{v[0], v[1], v[2]};
  } else {
    cfg.weight = WeightFileSpec{kv["weight_file"]};
  }

  if (kv.count("tol")) {
    cfg.tol = parse_double(kv["tol"]);
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("key 'tol': must be positive");
  }
  if (kv.count("max_iter")) {
    cfg.max_iter = parse_int("max_iter", kv["max_iter"]);
    if (cfg.max_iter < 1) throw std::invalid_argument("key 'max_iter': must be >= 1");
  }
  if (kv.count("seed")) {
    const int s = parse_int("seed", kv["seed"]);
    if (s < 0) throw std::invalid_argument("key 'seed': must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (kv.count("output_dir")) cfg.output_dir = kv["output_dir"];
  if (kv.count("stripes")) {
    cfg.stripes = parse_int_list("stripes", kv["stripes"]);
    for (int k : cfg.stripes)
      if (k < 1) throw std::invalid_argument("key 'stripes': stripe counts must be >= 1");
  }

  // regime checks that are decidable from the text alone
  const int n_elements = cfg.domain.dimension == 1
                             ? cfg.elements_per_axis
                             : cfg.elements_per_axis * cfg.elements_per_axis;
  std::optional<double> total;
  std::optional<double> maxval;
  if (const auto* values = std::get_if<std::vector<double>>(&cfg.weight)) {
    if (static_cast<int>(values->size()) != n_elements)
      throw std::invalid_argument("key 'weight_values': got " + std::to_string(values->size()) +
                                  " values for " + std::to_string(n_elements) + " elements");
    total = 0.0;
    maxval = -std::numeric_limits<double>::infinity();
    for (double v : *values) {
      *total += v;
      *maxval = std::max(*maxval, v);
    }
  } else if (const auto* tv = std::get_if<TwoValuedSpec>(&cfg.weight)) {
    const auto n_plus = static_cast<long>(std::lround(tv->fraction_plus * n_elements));
    total = static_cast<double>(n_plus) * tv->v_plus +
            static_cast<double>(n_elements - n_plus) * tv->v_minus;
    maxval = n_plus > 0 ? std::max(tv->v_plus, n_plus < n_elements ? tv->v_minus : tv->v_plus)
                        : tv->v_minus;
  }
  if (total) {
    if (cfg.task == Task::Maximize && !(*total > 0.0))
      throw std::invalid_argument(
          "task 'maximize' needs a weight with positive total integral: with a nonpositive "
          "total the supremum of lambda1 over the class is infinite and no maximizer exists "
          "(use task 'sweep' to explore that regime)");
    if (cfg.task == Task::Sweep && *total > 0.0)
      throw std::invalid_argument(
          "task 'sweep' needs a weight with nonpositive total integral; with a positive total "
          "a maximizer exists (use task 'maximize')");
    if ((cfg.task == Task::Minimize || cfg.task == Task::Sweep) && !(*maxval > 0.0))
      throw std::invalid_argument(
          "task '" + task_name(cfg.task) +
          "' needs some positive weight values (otherwise there is no positive eigenvalue)");
  }

  return cfg;
}

Weight realize_weight(const RunConfig& config, const Grid& grid) {
  const int n = grid.num_elements();
  if (const auto* values = std::get_if<std::vector<double>>(&config.weight)) {
    if (static_cast<int>(values->size()) != n)
      throw std::invalid_argument("weight_values size does not match the element count");
    return Weight{*values, grid.element_measure};
  }
  if (const auto* tv = std::get_if<TwoValuedSpec>(&config.weight)) {
    const auto n_plus = static_cast<long>(std::lround(tv->fraction_plus * n));
    Weight w{std::vector<double>(static_cast<std::size_t>(n), tv->v_minus), grid.element_measure};
    for (long e = 0; e < n_plus && e < n; ++e) w.values[static_cast<std::size_t>(e)] = tv->v_plus;
    return w;
  }
  const auto& file = std::get<WeightFileSpec>(config.weight);
  Weight w = parse_weight_csv(read_text_file(file.path), grid.element_measure);
  if (static_cast<int>(w.values.size()) != n)
    throw std::invalid_argument("weight file '" + file.path + "' has " +
                                std::to_string(w.values.size()) + " values for " +
                                std::to_string(n) + " elements");
  return w;
}

}  // namespace eigenweight
