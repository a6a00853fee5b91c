#include "eigenweight/assembly.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace eigenweight {

Eigen::VectorXd StiffnessForm::restrict_to_free(const Eigen::VectorXd& full) const {
  if (full.size() != node_count) throw std::invalid_argument("nodal vector has wrong length");
  Eigen::VectorXd out(node_of_free.size());
  for (std::size_t i = 0; i < node_of_free.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[node_of_free[i]];
  return out;
}

Eigen::VectorXd StiffnessForm::expand_to_full(const Eigen::VectorXd& free) const {
  if (free.size() != static_cast<Eigen::Index>(node_of_free.size()))
    throw std::invalid_argument("free vector has wrong length");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(node_count);
  for (std::size_t i = 0; i < node_of_free.size(); ++i) out[node_of_free[i]] = free[static_cast<Eigen::Index>(i)];
  return out;
}

namespace {

using Triplet = Eigen::Triplet<double>;

void add_free(std::vector<Triplet>& trip, const std::vector<int>& free_of_node,
              int node_i, int node_j, double value) {
  const int fi = free_of_node[node_i];
  const int fj = free_of_node[node_j];
  if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, value);
}

// P1 stiffness of a triangle from the classic b/c coefficients.
void triangle_stiffness(const std::array<std::array<double, 2>, 3>& p,
                        std::array<std::array<double, 3>, 3>& ke, double& area) {
  const double b0 = p[1][1] - p[2][1], b1 = p[2][1] - p[0][1], b2 = p[0][1] - p[1][1];
  const double c0 = p[2][0] - p[1][0], c1 = p[0][0] - p[2][0], c2 = p[1][0] - p[0][0];
  area = 0.5 * std::abs(b0 * c1 - b1 * c0);
  const std::array<double, 3> b{b0, b1, b2}, c{c0, c1, c2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ke[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
}

}  // namespace

StiffnessForm assemble_stiffness(const Grid& grid) {
  StiffnessForm form;
  form.node_count = grid.num_nodes();
  form.free_of_node = grid.free_of_node;
  form.node_of_free = grid.node_of_free;

  std::vector<Triplet> trip;
  const int n = grid.elements_per_axis;

  if (grid.dimension == 1) {
    const double h = grid.mesh_width(0);
    for (int e = 0; e < n; ++e) {
      const auto nodes = grid.element_nodes(e);
      const double k = 1.0 / h;
      add_free(trip, form.free_of_node, nodes[0], nodes[0], k);
      add_free(trip, form.free_of_node, nodes[1], nodes[1], k);
      add_free(trip, form.free_of_node, nodes[0], nodes[1], -k);
      add_free(trip, form.free_of_node, nodes[1], nodes[0], -k);
    }
  } else {
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto cell = grid.element_nodes(e);
      // diagonal lower-left to upper-right, fixed orientation
      const std::array<std::array<int, 3>, 2> tris{{{cell[0], cell[1], cell[2]},
                                                    {cell[0], cell[2], cell[3]}}};
      for (const auto& t : tris) {
        std::array<std::array<double, 2>, 3> p;
        for (int i = 0; i < 3; ++i) p[i] = grid.node_coordinates(t[i]);
        std::array<std::array<double, 3>, 3> ke;
        double area = 0.0;
        triangle_stiffness(p, ke, area);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) add_free(trip, form.free_of_node, t[i], t[j], ke[i][j]);
      }
    }
  }

  if (grid.bc_kind == BcKind::Robin) {
    for (const auto& face : grid.boundary_faces) {
      if (face.sigma == 0.0) continue;
      if (face.node_count == 1) {
        add_free(trip, form.free_of_node, face.nodes[0], face.nodes[0], face.sigma * face.measure);
      } else {
        // exact edge quadrature of sigma u v for P1 traces
        const double s = face.sigma * face.measure / 6.0;
        add_free(trip, form.free_of_node, face.nodes[0], face.nodes[0], 2.0 * s);
        add_free(trip, form.free_of_node, face.nodes[1], face.nodes[1], 2.0 * s);
        add_free(trip, form.free_of_node, face.nodes[0], face.nodes[1], s);
        add_free(trip, form.free_of_node, face.nodes[1], face.nodes[0], s);
      }
    }
  }

  const int nf = grid.num_free_nodes();
  form.K.resize(nf, nf);
  form.K.setFromTriplets(trip.begin(), trip.end());
  form.K.makeCompressed();
  return form;
}

WeightedMassForm assemble_weighted_mass(const Grid& grid, const Weight& weight) {
  if (static_cast<int>(weight.values.size()) != grid.num_elements())
    throw std::invalid_argument("weight has one value per element; size mismatch");

  std::vector<Triplet> trip;
  const int n = grid.elements_per_axis;

  if (grid.dimension == 1) {
    const double h = grid.mesh_width(0);
    for (int e = 0; e < n; ++e) {
      const auto nodes = grid.element_nodes(e);
      const double me = weight.values[e] * h / 6.0;
      add_free(trip, grid.free_of_node, nodes[0], nodes[0], 2.0 * me);
      add_free(trip, grid.free_of_node, nodes[1], nodes[1], 2.0 * me);
      add_free(trip, grid.free_of_node, nodes[0], nodes[1], me);
      add_free(trip, grid.free_of_node, nodes[1], nodes[0], me);
    }
  } else {
    const double area = grid.element_measure / 2.0;  // each cell holds two triangles
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto cell = grid.element_nodes(e);
      const std::array<std::array<int, 3>, 2> tris{{{cell[0], cell[1], cell[2]},
                                                    {cell[0], cell[2], cell[3]}}};
      const double me = weight.values[e] * area / 12.0;
      for (const auto& t : tris)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            add_free(trip, grid.free_of_node, t[i], t[j], (i == j ? 2.0 : 1.0) * me);
    }
  }

  WeightedMassForm form;
  form.weight = weight;
  const int nf = grid.num_free_nodes();
  form.M.resize(nf, nf);
  form.M.setFromTriplets(trip.begin(), trip.end());
  form.M.makeCompressed();
  return form;
}

std::vector<double> element_square_integrals(const Grid& grid, const Eigen::VectorXd& u_full) {
  if (u_full.size() != grid.num_nodes())
    throw std::invalid_argument("nodal vector has wrong length");

  std::vector<double> q(grid.num_elements(), 0.0);
  if (grid.dimension == 1) {
    const double h = grid.mesh_width(0);
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto nodes = grid.element_nodes(e);
      const double a = u_full[nodes[0]], b = u_full[nodes[1]];
      q[e] = (h / 3.0) * (a * a + a * b + b * b);
    }
  } else {
    const double area = grid.element_measure / 2.0;
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto cell = grid.element_nodes(e);
      const std::array<std::array<int, 3>, 2> tris{{{cell[0], cell[1], cell[2]},
                                                    {cell[0], cell[2], cell[3]}}};
      for (const auto& t : tris) {
        const double a = u_full[t[0]], b = u_full[t[1]], c = u_full[t[2]];
        q[e] += (area / 6.0) * (a * a + b * b + c * c + a * b + a * c + b * c);
      }
    }
  }
  return q;
}

}  // namespace eigenweight
