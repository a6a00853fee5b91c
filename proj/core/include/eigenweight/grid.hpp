#pragma once

#include <array>
#include <vector>

namespace eigenweight {

enum class BcKind { Dirichlet, Robin };

/// One boundary face of the mesh: a domain endpoint in 1D (measure 1,
/// point evaluation) or an axis-aligned boundary edge in 2D (measure =
/// edge length). Robin grids carry one sigma value per face.
struct BoundaryFace {
  int id = 0;
  double measure = 0.0;
  double sigma = 0.0;
  std::array<int, 2> nodes{-1, -1};  // node ids; nodes[1] == -1 in 1D
  int node_count = 0;
};

struct DomainSpec {
  int dimension = 1;              // 1 or 2
  std::array<double, 2> lo{0, 0}; // interval left / rectangle lower-left
  std::array<double, 2> hi{1, 0}; // interval right / rectangle upper-right
};

struct BcSpec {
  BcKind kind = BcKind::Dirichlet;
  // Robin only: one value (constant sigma) or one value per boundary face,
  // in face id order. Empty for Dirichlet.
  std::vector<double> sigma;
};

/// Uniform rectilinear mesh of an interval or a rectangle. Cells are the
/// weight-carrying units and all have equal measure; in 2D each cell is
/// triangulated along the lower-left to upper-right diagonal for P1
/// assembly. Immutable after construction.
struct Grid {
  int dimension = 1;
  std::array<double, 2> lo{0, 0};
  std::array<double, 2> hi{1, 0};
  int elements_per_axis = 0;
  double element_measure = 0.0;
  std::vector<BoundaryFace> boundary_faces;
  BcKind bc_kind = BcKind::Dirichlet;

  // node -> free index (-1 for constrained), and its inverse
  std::vector<int> free_of_node;
  std::vector<int> node_of_free;

  int num_elements() const;
  int num_nodes() const;
  int num_free_nodes() const { return static_cast<int>(node_of_free.size()); }
  double domain_measure() const;
  double mesh_width(int axis) const;

  /// Coordinates of a node (y = 0 in 1D).
  std::array<double, 2> node_coordinates(int node) const;

  /// Node ids of element e: 2 endpoints in 1D, 4 cell corners in 2D
  /// (lower-left, lower-right, upper-right, upper-left).
  std::array<int, 4> element_nodes(int e) const;

  bool node_on_boundary(int node) const;
};

/// Builds the uniform grid. Rejects degenerate extents, Robin data with
/// any sigma < 0 and the excluded sigma == 0 everywhere case, and grids
/// without free nodes (Dirichlet needs elements_per_axis >= 2).
Grid build_grid(const DomainSpec& domain, int elements_per_axis, const BcSpec& bc);

}  // namespace eigenweight
