#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "eigenweight/grid.hpp"
#include "eigenweight/rearrange.hpp"

namespace eigenweight {

/// The discrete W_sigma inner product on P1 basis functions, reduced to
/// the free nodes: integral of grad u . grad v, plus the boundary term
/// integral of sigma u v for Robin grids. Symmetric positive definite.
struct StiffnessForm {
  Eigen::SparseMatrix<double> K;
  int node_count = 0;
  std::vector<int> free_of_node;
  std::vector<int> node_of_free;

  int free_count() const { return static_cast<int>(K.rows()); }

  /// Restrict a full nodal vector to the free nodes.
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;
  /// Expand a free vector to all nodes (constrained nodes get 0).
  Eigen::VectorXd expand_to_full(const Eigen::VectorXd& free) const;
};

/// The weighted mass pairing integral of m u v with m constant per
/// element, reduced to the free nodes. Linear in the weight.
struct WeightedMassForm {
  Eigen::SparseMatrix<double> M;
  Weight weight;
};

StiffnessForm assemble_stiffness(const Grid& grid);

WeightedMassForm assemble_weighted_mass(const Grid& grid, const Weight& weight);

/// Exact per-element integrals q_e of u^2 for a P1 function given by its
/// full nodal vector (Dirichlet boundary values must be 0). q_e >= 0 and
/// sum_e q_e equals the integral of u^2 over the domain.
std::vector<double> element_square_integrals(const Grid& grid, const Eigen::VectorXd& u_full);

}  // namespace eigenweight
