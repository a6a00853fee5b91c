#include "eigenweight/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "eigenweight/assembly.hpp"
#include "eigenweight/csv_io.hpp"
#include "eigenweight/eigensolver.hpp"
#include "eigenweight/optimize.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

namespace fs = std::filesystem;

namespace {

constexpr double kDefaultSolveTol = 1e-10;
constexpr double kDefaultMinimizeTol = 1e-10;
constexpr double kDefaultMaximizeTol = 1e-9;
constexpr int kDefaultOptimizerIters = 2000;

class Summary {
 public:
  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, bool value) { add(key, value ? std::string("true") : std::string("false")); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }

  std::string text() const {
    std::string out;
    for (const auto& [k, v] : rows_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

void validate_regime(Task task, const Weight& w) {
  const double total = w.total_integral();
  const double maxval = w.max_value();
  if (task == Task::Maximize && !(total > 0.0))
    throw std::invalid_argument(
        "task 'maximize' needs a weight with positive total integral: with a nonpositive "
        "total the supremum of lambda1 over the class is infinite and no maximizer exists "
        "(use task 'sweep' to explore that regime)");
  if (task == Task::Sweep && total > 0.0)
    throw std::invalid_argument(
        "task 'sweep' needs a weight with nonpositive total integral; with a positive total "
        "a maximizer exists (use task 'maximize')");
  if ((task == Task::Minimize || task == Task::Sweep) && !(maxval > 0.0))
    throw std::invalid_argument("task '" + task_name(task) +
                                "' needs some positive weight values (otherwise there is no "
                                "positive eigenvalue)");
}

std::string status_name(OptStatus s) {
  switch (s) {
    case OptStatus::Converged: return "converged";
    case OptStatus::IterLimit: return "iter-limit";
    case OptStatus::NoMaximizerRegime: return "no-maximizer-regime";
  }
  return "?";
}

void write_artifact(const fs::path& dir, const std::string& name, const std::string& content,
                    std::ostream& log) {
  const fs::path p = dir / name;
  write_text_file(p.string(), content);
  log << "wrote " << p.string() << "\n";
}

int run_solve(const RunConfig& config, const Grid& grid, const Weight& w, const fs::path& out,
              std::ostream& log) {
  SolverOptions solver;
  solver.tol = config.tol > 0.0 ? config.tol : kDefaultSolveTol;
  if (config.max_iter > 0) solver.max_iter = config.max_iter;

  const StiffnessForm K = assemble_stiffness(grid);
  const WeightedMassForm M = assemble_weighted_mass(grid, w);
  const PrincipalResult pr = principal_eigenpair(K, M, solver);
  const PersistenceThreshold pt = persistence_threshold(pr);

  Summary summary;
  summary.add("task", std::string("solve"));
  std::vector<TracePoint> trace;
  if (has_eigenpair(pr)) {
    const EigenPair& pair = eigenpair(pr);
    summary.add("status", std::string("converged"));
    summary.add("mu1", pair.mu1);
    summary.add("lambda1", pair.lambda1);
    summary.add("d_star", *pt.d_star);
    summary.add("residual", pair.residual);
    trace.push_back({0, pair.mu1, 0.0});
    write_artifact(out, "eigenfunction.csv", emit_eigenfunction_csv(grid, pair.u), log);
  } else {
    summary.add("status", std::string("no-positive-eigenvalue"));
    summary.add("mu1", 0.0);
    summary.add("lambda1", std::numeric_limits<double>::infinity());
    summary.add("d_star", std::string("extinct-for-all-d"));
    summary.add("diagnostic", std::get<NoPositiveEigenvalue>(pr).diagnostic);
    trace.push_back({0, 0.0, 0.0});
  }
  write_artifact(out, "trace.csv", emit_trace_csv(trace), log);
  write_artifact(out, "weight.csv", emit_weight_csv(w), log);
  write_artifact(out, "summary", summary.text(), log);
  log << "status: " << (has_eigenpair(pr) ? "converged" : "no-positive-eigenvalue") << "\n";
  return 0;
}

int run_optimize(const RunConfig& config, const Grid& grid, const Weight& w, const fs::path& out,
                 std::ostream& log) {
  const RearrangementClass cls = RearrangementClass::from_weight(w);
  OptOptions opts;
  opts.tol = config.tol > 0.0
                 ? config.tol
                 : (config.task == Task::Minimize ? kDefaultMinimizeTol : kDefaultMaximizeTol);
  opts.max_iter = config.max_iter > 0 ? config.max_iter : kDefaultOptimizerIters;

  const OptResult result = config.task == Task::Minimize ? minimize_lambda1(cls, grid, opts)
                                                         : maximize_lambda1(cls, grid, opts);

  Summary summary;
  summary.add("task", task_name(config.task));
  summary.add("status", status_name(result.status));
  summary.add("mu1", result.final_mu1);
  summary.add("lambda1", result.final_lambda1);
  summary.add("d_star", result.final_mu1);
  summary.add("in_class", result.in_class);
  summary.add("iterations", result.iterations);
  if (!result.trace.empty()) summary.add("final_gap", result.trace.back().gap);
  if (result.gamma) summary.add("gamma", *result.gamma);

  write_artifact(out, "trace.csv", emit_trace_csv(result.trace), log);
  write_artifact(out, "weight.csv", emit_weight_csv(result.final_weight), log);
  if (result.final_u.size() > 0)
    write_artifact(out, "eigenfunction.csv", emit_eigenfunction_csv(grid, result.final_u), log);
  if (config.task == Task::Maximize && grid.bc_kind == BcKind::Dirichlet) {
    write_artifact(out, "rearrangement_computed.csv",
                   emit_step_csv(decreasing_rearrangement(result.final_weight)), log);
    if (result.analytic_rearrangement)
      write_artifact(out, "rearrangement_analytic.csv",
                     emit_step_csv(*result.analytic_rearrangement), log);
  }
  write_artifact(out, "summary", summary.text(), log);
  log << "status: " << status_name(result.status) << "\n";
  return result.status == OptStatus::Converged ? 0 : 1;
}

int run_sweep(const RunConfig& config, const Grid& grid, const Weight& w, const fs::path& out,
              std::ostream& log) {
  SolverOptions solver;
  solver.tol = config.tol > 0.0 ? config.tol : kDefaultSolveTol;
  const RearrangementClass cls = RearrangementClass::from_weight(w);
  const SweepResult sweep = fragmentation_sweep(cls, config.stripes, grid, solver);

  bool monotone = true;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i)
    if (!(sweep.rows[i].mu1 < sweep.rows[i - 1].mu1)) monotone = false;

  Summary summary;
  summary.add("task", std::string("sweep"));
  summary.add("status", std::string("converged"));
  summary.add("rows", static_cast<int>(sweep.rows.size()));
  summary.add("mu1_strictly_decreasing", monotone);
  summary.add("mean_mu1", sweep.mean_mu_tilde);
  summary.add("mean_status", std::string(sweep.mean_no_positive ? "no-positive-eigenvalue"
                                                                : "positive-eigenvalue"));
  write_artifact(out, "trace.csv", emit_sweep_csv(sweep.rows), log);
  write_artifact(out, "weight.csv", emit_weight_csv(w), log);
  write_artifact(out, "summary", summary.text(), log);
  log << "status: converged\n";
  return 0;
}

struct FdResult {
  double exact = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
};

FdResult fd_derivative_check(const PencilCache& cache, const Grid& grid, const Weight& m,
                             const std::vector<double>& v, double eps) {
  const PrincipalResult pr = cache.solve(m);
  const std::vector<double> g = gateaux_derivative(grid, eigenpair(pr));
  FdResult r;
  for (std::size_t e = 0; e < v.size(); ++e) r.exact += g[e] * v[e];

  Weight plus = m, minus = m;
  for (std::size_t e = 0; e < v.size(); ++e) {
    plus.values[e] += eps * v[e];
    minus.values[e] -= eps * v[e];
  }
  r.fd = (cache.mu_tilde_of(plus) - cache.mu_tilde_of(minus)) / (2.0 * eps);
  r.rel_err = std::abs(r.fd - r.exact) / std::max(std::abs(r.exact), 1e-300);
  return r;
}

int run_probe(const RunConfig& config, const Grid& grid, const Weight& w, const fs::path& out,
              std::ostream& log) {
  SolverOptions solver;
  solver.tol = config.tol > 0.0 ? config.tol : kDefaultSolveTol;
  PencilCache cache(grid, solver);

  const PrincipalResult pr = cache.solve(w);
  if (!has_eigenpair(pr))
    throw std::invalid_argument("probe needs a weight with a positive principal eigenvalue: " +
                                std::get<NoPositiveEigenvalue>(pr).diagnostic);
  const EigenPair& pair = eigenpair(pr);
  std::mt19937_64 rng(config.seed);

  Summary summary;
  summary.add("task", std::string("probe"));
  bool all_pass = true;

  // homogeneity at three scales
  double homo_max_rel = 0.0;
  for (double alpha : {0.5, 2.0, 3.7}) {
    const HomogeneityReport rep = homogeneity_check(grid, w, alpha, solver);
    homo_max_rel = std::max(homo_max_rel, rep.abs_error / (alpha * rep.mu_base));
    if (!rep.pass) all_pass = false;
  }
  summary.add("homogeneity_max_rel_error", homo_max_rel);

  // derivative against central differences in seeded random directions
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double fd_max_rel = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v(w.values.size());
    for (double& x : v) x = unit(rng);
    const FdResult fd = fd_derivative_check(cache, grid, w, v, 1e-5);
    fd_max_rel = std::max(fd_max_rel, fd.rel_err);
  }
  if (fd_max_rel >= 1e-5) all_pass = false;
  summary.add("derivative_max_rel_error", fd_max_rel);

  // Euler identity sum_e g_e m_e = mu1
  const std::vector<double> g = gateaux_derivative(grid, pair);
  double euler = 0.0;
  for (std::size_t e = 0; e < g.size(); ++e) euler += g[e] * w.values[e];
  const double euler_err = std::abs(euler - pair.mu1);
  if (euler_err > 1e-10) all_pass = false;
  summary.add("euler_identity_error", euler_err);

  // convexity along the segment toward a random rearrangement
  Weight q = w;
  std::shuffle(q.values.begin(), q.values.end(), rng);
  const ConvexityReport conv = convexity_probe(w, q, {0.25, 0.5, 0.75}, grid, solver);
  if (conv.max_violation > 1e-10) all_pass = false;
  summary.add("convexity_max_violation", conv.max_violation);
  if (conv.strictness_margin_half)
    summary.add("convexity_strictness_margin", *conv.strictness_margin_half);

  // Hardy-Littlewood bracket around the eigenfunction pairing
  const RearrangementClass cls = RearrangementClass::from_weight(w);
  const std::vector<double> qe = element_square_integrals(grid, pair.u);
  const Weight smax = hl_max_pairing(cls, qe);
  const Weight smin = hl_min_pairing(cls, qe);
  double v_lo = 0.0, v_mid = 0.0, v_hi = 0.0;
  for (std::size_t e = 0; e < qe.size(); ++e) {
    v_lo += smin.values[e] * qe[e];
    v_mid += w.values[e] * qe[e];
    v_hi += smax.values[e] * qe[e];
  }
  const double slack = 1e-14 * std::max(1.0, std::abs(v_mid));
  if (!(v_lo <= v_mid + slack && v_mid <= v_hi + slack)) all_pass = false;
  summary.add("bracket_low", v_lo);
  summary.add("bracket_value", v_mid);
  summary.add("bracket_high", v_hi);

  summary.add("status", std::string(all_pass ? "converged" : "failed"));
  summary.add("mu1", pair.mu1);
  summary.add("lambda1", pair.lambda1);
  summary.add("d_star", pair.mu1);

  write_artifact(out, "trace.csv", emit_trace_csv({{0, pair.mu1, 0.0}}), log);
  write_artifact(out, "weight.csv", emit_weight_csv(w), log);
  write_artifact(out, "eigenfunction.csv", emit_eigenfunction_csv(grid, pair.u), log);
  write_artifact(out, "summary", summary.text(), log);
  log << "status: " << (all_pass ? "converged" : "failed") << "\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log, const std::string& output_dir_override) {
  const Grid grid = build_grid(config.domain, config.elements_per_axis, config.bc);
  const Weight w = realize_weight(config, grid);
  validate_regime(config.task, w);

  const fs::path out(output_dir_override.empty() ? config.output_dir : output_dir_override);
  fs::create_directories(out);

  switch (config.task) {
    case Task::Solve: return run_solve(config, grid, w, out, log);
    case Task::Minimize:
    case Task::Maximize: return run_optimize(config, grid, w, out, log);
    case Task::Sweep: return run_sweep(config, grid, w, out, log);
    case Task::Probe: return run_probe(config, grid, w, out, log);
  }
  throw std::logic_error("unhandled task");
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

namespace {

Grid unit_interval_grid(int n, BcKind bc) {
  BcSpec spec;
  spec.kind = bc;
  if (bc == BcKind::Robin) spec.sigma = {1.0};
  return build_grid(DomainSpec{1, {0.0, 0.0}, {1.0, 0.0}}, n, spec);
}

Weight random_sign_changing_weight(std::mt19937_64& rng, const Grid& grid) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Weight w{std::vector<double>(static_cast<std::size_t>(grid.num_elements())), grid.element_measure};
  for (double& v : w.values) v = unit(rng);
  std::size_t e = 0;
  while (w.max_value() <= 0.1) w.values[e++ % w.values.size()] += 1.0;
  return w;
}

double brute_force_best_mu(const PencilCache& cache, const RearrangementClass& cls, bool maximize) {
  std::vector<double> v = cls.generator_values;
  std::sort(v.begin(), v.end());
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  do {
    const double mu = cache.mu_tilde_of(Weight{v, cls.element_measure});
    best = maximize ? std::max(best, mu) : std::min(best, mu);
  } while (std::next_permutation(v.begin(), v.end()));
  return best;
}

}  // namespace

ValidationReport validate_suite(std::uint64_t seed) {
  ValidationReport report;
  std::mt19937_64 rng(seed);

  {  // homogeneity
    const Grid grid = unit_interval_grid(40, BcKind::Dirichlet);
    const Weight m = random_sign_changing_weight(rng, grid);
    double max_rel = 0.0;
    bool pass = true;
    for (double alpha : {0.5, 2.0, 3.7}) {
      const HomogeneityReport rep = homogeneity_check(grid, m, alpha);
      max_rel = std::max(max_rel, rep.abs_error / (alpha * rep.mu_base));
      pass = pass && rep.pass;
    }
    report.checks.push_back({"homogeneity", pass, "max relative error " + format_double(max_rel)});
  }

  {  // derivative vs central differences
    const Grid grid = unit_interval_grid(50, BcKind::Dirichlet);
    PencilCache cache(grid);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double max_rel = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const Weight m = random_sign_changing_weight(rng, grid);
      std::vector<double> v(m.values.size());
      for (double& x : v) x = unit(rng);
      const FdResult fd = fd_derivative_check(cache, grid, m, v, 1e-5);
      max_rel = std::max(max_rel, fd.rel_err);
    }
    report.checks.push_back({"gateaux-derivative", max_rel < 1e-5,
                             "max relative error " + format_double(max_rel)});
  }

  {  // convexity of mu~1 along random segments
    const Grid grid = unit_interval_grid(40, BcKind::Dirichlet);
    double max_violation = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Weight m = random_sign_changing_weight(rng, grid);
      const Weight q = random_sign_changing_weight(rng, grid);
      const ConvexityReport rep = convexity_probe(m, q, {0.25, 0.5, 0.75}, grid);
      max_violation = std::max(max_violation, rep.max_violation);
    }
    report.checks.push_back({"convexity", max_violation <= 1e-10,
                             "max violation " + format_double(max_violation)});
  }

  {  // Hardy-Littlewood bracket on random members and random q
    const Grid grid = unit_interval_grid(12, BcKind::Dirichlet);
    const Weight m0 = random_sign_changing_weight(rng, grid);
    const RearrangementClass cls = RearrangementClass::from_weight(m0);
    std::uniform_real_distribution<double> nonneg(0.0, 1.0);
    bool pass = true;
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 20; ++trial) {
      Weight m = m0;
      std::shuffle(m.values.begin(), m.values.end(), rng);
      std::vector<double> q(m.values.size());
      for (double& x : q) x = nonneg(rng);
      const Weight smax = hl_max_pairing(cls, q);
      const Weight smin = hl_min_pairing(cls, q);
      double lo = 0.0, mid = 0.0, hi = 0.0;
      for (std::size_t e = 0; e < q.size(); ++e) {
        lo += smin.values[e] * q[e];
        mid += m.values[e] * q[e];
        hi += smax.values[e] * q[e];
      }
      worst = std::min(std::min(mid - lo, hi - mid), worst);
      pass = pass && lo <= mid + 1e-14 && mid <= hi + 1e-14;
    }
    report.checks.push_back({"hardy-littlewood-bracket", pass,
                             "worst margin " + format_double(worst)});
  }

  {  // bathtub ascent against exhaustive permutation search, both bc kinds
    bool pass = true;
    std::string detail;
    for (BcKind bc : {BcKind::Dirichlet, BcKind::Robin}) {
      const Grid grid = unit_interval_grid(6, bc);
      const Weight m0{{1.4, -0.6, 0.9, -0.3, 0.2, -0.8}, grid.element_measure};
      const RearrangementClass cls = RearrangementClass::from_weight(m0);
      PencilCache cache(grid);
      const double best = brute_force_best_mu(cache, cls, /*maximize=*/true);
      const OptResult result = minimize_lambda1(cls, grid);
      const double err = std::abs(result.final_mu1 - best);
      pass = pass && err <= 1e-12;
      detail += (bc == BcKind::Dirichlet ? "dirichlet " : "robin ") + format_double(err) + " ";
    }
    report.checks.push_back({"bathtub-brute-force", pass, "|mu - exhaustive| " + detail});
  }

  {  // conditional gradient on six cells: the closure value beats every
     // vertex, and the duality gap inequality holds against all 720
     // vertices at the last iterate
    const Grid grid = unit_interval_grid(6, BcKind::Dirichlet);
    const Weight m0{{1.4, -0.6, 0.9, -0.3, 0.2, -0.8}, grid.element_measure};
    const RearrangementClass cls = RearrangementClass::from_weight(m0);
    PencilCache cache(grid);
    const double vertex_min = brute_force_best_mu(cache, cls, /*maximize=*/false);
    OptOptions opts;
    opts.tol = 1e-6;
    opts.max_iter = 400;
    const OptResult result = maximize_lambda1(cls, grid, opts);
    bool pass = result.final_mu1 <= vertex_min + 1e-10;

    const StiffnessForm K = assemble_stiffness(grid);
    const PrincipalResult pr = principal_eigenpair(K, assemble_weighted_mass(grid, result.final_weight));
    if (!has_eigenpair(pr)) {
      report.checks.push_back({"frank-wolfe-vertex-bound", false, "final iterate lost mu1 > 0"});
      return report;
    }
    const std::vector<double> q = gateaux_derivative(grid, eigenpair(pr));
    double base = 0.0;
    for (std::size_t e = 0; e < q.size(); ++e) base += result.final_weight.values[e] * q[e];
    double worst = 0.0;
    std::vector<double> v = cls.generator_values;
    std::sort(v.begin(), v.end());
    do {
      double linear = -base;
      for (std::size_t e = 0; e < q.size(); ++e) linear += v[e] * q[e];
      const double mu_vertex = cache.mu_tilde_of(Weight{v, cls.element_measure});
      worst = std::min(worst, mu_vertex - (result.final_mu1 + linear));
    } while (std::next_permutation(v.begin(), v.end()));
    pass = pass && worst >= -1e-12;
    report.checks.push_back({"frank-wolfe-vertex-bound", pass,
                             "closure mu " + format_double(result.final_mu1) + " vs vertex min " +
                                 format_double(vertex_min) + ", worst subgradient slack " +
                                 format_double(worst)});
  }

  return report;
}

}  // namespace eigenweight
