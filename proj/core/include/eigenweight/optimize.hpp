#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "eigenweight/eigensolver.hpp"
#include "eigenweight/grid.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

enum class OptStatus { Converged, IterLimit, NoMaximizerRegime };

struct TracePoint {
  int iteration = 0;
  double mu1 = 0.0;
  double gap = 0.0;
};

struct OptOptions {
  double tol = 1e-10;            // stopping threshold on the linearized gap
  int max_iter = 2000;
  double line_search_tol = 1e-8; // golden-section interval width (maximize)
  SolverOptions solver;
  /// Start iterate. Defaults: the k = 2 checkerboard for minimize (not a
  /// fixed point), the sorted-ascending vertex for maximize.
  std::optional<Weight> initial_weight;
  /// Test hook, called with every iterate before it is updated.
  std::function<void(const Weight&)> on_iterate;
};

struct OptResult {
  Weight final_weight;
  double final_mu1 = 0.0;
  double final_lambda1 = 0.0;
  std::vector<TracePoint> trace;
  OptStatus status = OptStatus::Converged;
  bool in_class = false;                 // membership in G(m0) at value tolerance 1e-9
  std::optional<double> gamma;           // maximize under Dirichlet only
  std::optional<StepRearrangement> analytic_rearrangement;  // the truncation target
  Eigen::VectorXd final_u;               // full nodal eigenfunction (empty if mu1 = 0)
  int iterations = 0;
};

/// Minimizes lambda1 (maximizes mu1) over the rearrangement class by the
/// alternating pairing scheme: each step replaces the weight with the
/// Hardy-Littlewood max pairing against the element square integrals of
/// the current eigenfunction, which cannot decrease mu1. Fixed points are
/// exactly the weights that are an increasing function of u. Stops when
/// the linearized improvement falls below tol or the pairing repeats.
OptResult minimize_lambda1(const RearrangementClass& cls, const Grid& grid,
                           const OptOptions& opts = {});

/// Maximizes lambda1 (minimizes the convex mu~1) over the weak* closure
/// of the class by conditional gradient with away steps: the linear
/// minimization oracle over the closure is the Hardy-Littlewood min
/// pairing (attained at a class vertex), step sizes come from
/// golden-section line search, and the duality gap bounds the objective
/// error. Because the minimizer sits on a low-curvature face where
/// first-order iterates stall, the driver periodically rounds the
/// iterate onto the characterized maximizer shape (the decreasing
/// arrangement of the truncation multiset under Dirichlet, of the
/// generator itself under Robin with a nonnegative generator) and keeps
/// the rounded weight only when its own duality gap certifies optimality
/// at the requested tolerance. Weights with a nonpositive total integral
/// have no maximizer (status NoMaximizerRegime; the mean constant
/// minimizes mu~1 in the closure).
OptResult maximize_lambda1(const RearrangementClass& cls, const Grid& grid,
                           const OptOptions& opts = {});

struct SweepRow {
  int stripes = 0;
  double mu1 = 0.0;
  double lambda1 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool mean_no_positive = false;  // the constant mean weight has mu~1 = 0
  double mean_mu_tilde = 0.0;
};

/// Evaluates mu1 on checkerboard rearrangements of increasing stripe
/// count. Requires a nonpositive total integral with some positive
/// generator values: the regime in which fragmentation drives lambda1 to
/// infinity and the closure infimum of mu~1 is 0 (the constant mean).
SweepResult fragmentation_sweep(const RearrangementClass& cls, const std::vector<int>& stripe_counts,
                                const Grid& grid, const SolverOptions& solver = {});

enum class Direction { Increasing, Decreasing };

struct ComonotoneReport {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::size_t>> violations;
};

/// Literal pairwise test that the weight is a monotone function of q:
/// (q_i - q_j)(m_i - m_j) >= 0 for all pairs (increasing; reversed sign
/// for decreasing). Pairs whose weight values differ by at most
/// value_tie_tol count as ties.
ComonotoneReport comonotone_check(const Weight& w, std::span<const double> q, Direction dir,
                                  double value_tie_tol = 0.0);

struct ConvexityReport {
  double max_violation = 0.0;  // max over t of mu~1(segment) - chord
  std::optional<double> strictness_margin_half;  // chord - mu~1 at t = 1/2
  bool linearly_independent = false;
};

/// Checks the convexity inequality of mu~1 along the segment from q to m
/// at each t in t_grid, and the strict inequality at t = 1/2 when the
/// weights are linearly independent with positive mu1.
ConvexityReport convexity_probe(const Weight& m, const Weight& q, const std::vector<double>& t_grid,
                                const Grid& grid, const SolverOptions& solver = {});

struct PersistenceThreshold {
  std::optional<double> d_star;  // critical diffusion rate 1/lambda1 = mu1
  bool extinct_for_all_d = false;
};

/// The diffusion threshold of the logistic model: persistence for
/// d < d* = 1/lambda1. Without a positive eigenvalue the population goes
/// extinct for every diffusion rate.
PersistenceThreshold persistence_threshold(const PrincipalResult& r);

}  // namespace eigenweight
