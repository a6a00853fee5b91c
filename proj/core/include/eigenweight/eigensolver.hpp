#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eigenweight/assembly.hpp"
#include "eigenweight/grid.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

/// Principal eigenpair of the discrete pencil: mu1 is the largest
/// (positive) eigenvalue of K^-1 M_m, lambda1 = 1/mu1, and u is the full
/// nodal eigenfunction, positive at every free node and normalized so
/// that ||u||_K = 1 (equivalently u^T M_m u = mu1).
struct EigenPair {
  double mu1 = 0.0;
  double lambda1 = 0.0;
  Eigen::VectorXd u;        // all nodes; Dirichlet boundary entries are 0
  double residual = 0.0;    // ||M u - mu1 K u|| / ||K u||
};

/// Returned when the pencil has no positive eigenvalue: either the weight
/// is nonpositive (no iteration is attempted) or the computed top of the
/// spectrum is below the solver tolerance.
struct NoPositiveEigenvalue {
  std::string diagnostic;
};

using PrincipalResult = std::variant<EigenPair, NoPositiveEigenvalue>;

/// The extension of mu1 by zero onto weights without a positive part.
double mu_tilde(const PrincipalResult& r);

inline bool has_eigenpair(const PrincipalResult& r) { return std::holds_alternative<EigenPair>(r); }
inline const EigenPair& eigenpair(const PrincipalResult& r) { return std::get<EigenPair>(r); }

struct SolverOptions {
  double tol = 1e-10;        // relative eigenresidual
  int max_iter = 5000;       // operator applications for the Krylov path
  int dense_threshold = 500; // at or below this many free nodes, solve densely
};

/// Largest positive eigenvalue of K^-1 M_m with its positive eigenfunction.
///
/// The weight may be indefinite, so the dominant eigenvalue in magnitude
/// can sit on the negative branch; the solver always resolves the largest
/// algebraic eigenvalue (dense symmetric reduction up to the dense
/// threshold, otherwise a Lanczos iteration in the K inner product whose
/// Ritz values bracket both spectral ends). Throws on a non-SPD stiffness
/// form, on non-convergence, and if the converged eigenfunction is not
/// strictly positive at every free node.
PrincipalResult principal_eigenpair(const StiffnessForm& K, const WeightedMassForm& M,
                                    const SolverOptions& opts = {});

/// (f^T M f) / (f^T K f). Accepts a free-node vector or a full nodal
/// vector. Never exceeds mu1 when mu1 > 0.
double rayleigh_quotient(const Eigen::VectorXd& f, const StiffnessForm& K,
                         const WeightedMassForm& M);

/// Full spectrum of K^-1 M_m by dense symmetric reduction; the validation
/// oracle. positive holds mu_1 >= mu_2 >= ... > 0; negative holds the
/// negative branch ordered most negative first (mu_-1 <= mu_-2 <= ... < 0).
struct SpectrumReport {
  std::vector<double> positive;
  std::vector<double> negative;
  int zero_count = 0;

  std::vector<double> positive_lambdas() const;  // 1/mu_k
};

SpectrumReport dense_spectrum_oracle(const StiffnessForm& K, const WeightedMassForm& M);

/// Per-element carrier of the derivative of mu1 at m: g_e = integral of
/// u^2 over element e, so the directional derivative in direction v is
/// sum_e g_e v_e.
std::vector<double> gateaux_derivative(const Grid& grid, const EigenPair& pair);

struct HomogeneityReport {
  double alpha = 1.0;
  double mu_base = 0.0;    // mu1(m)
  double mu_scaled = 0.0;  // mu1(alpha m)
  double abs_error = 0.0;  // |mu1(alpha m) - alpha mu1(m)|
  double bound = 0.0;      // 1e-12 * alpha * mu1(m)
  bool pass = false;
};

/// Checks mu1(alpha m) = alpha mu1(m) with two independent eigensolves.
HomogeneityReport homogeneity_check(const Grid& grid, const Weight& m, double alpha,
                                    const SolverOptions& opts = {});

/// Caches the stiffness assembly and factorization of one grid for
/// repeated solves with varying weights (the optimizers' inner loop).
class PencilCache {
 public:
  explicit PencilCache(const Grid& grid, SolverOptions opts = {});
  ~PencilCache();
  PencilCache(PencilCache&&) noexcept;
  PencilCache& operator=(PencilCache&&) noexcept;

  const Grid& grid() const { return grid_; }
  const StiffnessForm& stiffness() const { return stiffness_; }
  const SolverOptions& options() const { return opts_; }

  PrincipalResult solve(const Weight& m) const;
  double mu_tilde_of(const Weight& m) const;

  /// Eigenvalue-only evaluations of mu~1 along (1-t) a + t b; the
  /// transformed operators of the endpoints are prepared once.
  class Segment {
   public:
    double mu_tilde_at(double t) const;
    ~Segment();
    Segment(Segment&&) noexcept;

   private:
    friend class PencilCache;
    struct Impl;
    explicit Segment(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
  };
  Segment segment(const Weight& a, const Weight& b) const;

 private:
  struct Impl;
  Grid grid_;
  StiffnessForm stiffness_;
  SolverOptions opts_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eigenweight
