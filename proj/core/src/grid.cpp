#include "eigenweight/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eigenweight {

int Grid::num_elements() const {
  const int n = elements_per_axis;
  return dimension == 1 ? n : n * n;
}

int Grid::num_nodes() const {
  const int n = elements_per_axis + 1;
  return dimension == 1 ? n : n * n;
}

double Grid::domain_measure() const {
  double m = hi[0] - lo[0];
  if (dimension == 2) m *= hi[1] - lo[1];
  return m;
}

double Grid::mesh_width(int axis) const {
  return (hi[axis] - lo[axis]) / elements_per_axis;
}

std::array<double, 2> Grid::node_coordinates(int node) const {
  if (dimension == 1) return {lo[0] + node * mesh_width(0), 0.0};
  const int stride = elements_per_axis + 1;
  const int i = node % stride;
  const int j = node / stride;
  return {lo[0] + i * mesh_width(0), lo[1] + j * mesh_width(1)};
}

std::array<int, 4> Grid::element_nodes(int e) const {
  if (dimension == 1) return {e, e + 1, -1, -1};
  const int n = elements_per_axis;
  const int stride = n + 1;
  const int i = e % n;
  const int j = e / n;
  const int ll = j * stride + i;
  return {ll, ll + 1, ll + stride + 1, ll + stride};
}

bool Grid::node_on_boundary(int node) const {
  if (dimension == 1) return node == 0 || node == elements_per_axis;
  const int stride = elements_per_axis + 1;
  const int i = node % stride;
  const int j = node / stride;
  return i == 0 || j == 0 || i == elements_per_axis || j == elements_per_axis;
}

namespace {

void expand_sigma(const BcSpec& bc, std::size_t face_count, std::vector<double>& out) {
  if (bc.sigma.empty())
    throw std::invalid_argument("Robin boundary requires sigma values");
  if (bc.sigma.size() == 1) {
    out.assign(face_count, bc.sigma.front());
  } else if (bc.sigma.size() == face_count) {
    out = bc.sigma;
  } else {
    throw std::invalid_argument(
        "sigma list must have one entry or one entry per boundary face (" +
        std::to_string(face_count) + " faces)");
  }
  bool any_positive = false;
  for (double s : out) {
    if (s < 0.0) throw std::invalid_argument("sigma must be >= 0 on every boundary face");
    if (s > 0.0) any_positive = true;
  }
  if (!any_positive)
    throw std::invalid_argument(
        "sigma vanishes on the whole boundary: Neumann excluded (use Dirichlet or sigma > 0 somewhere)");
}

}  // namespace

Grid build_grid(const DomainSpec& domain, int elements_per_axis, const BcSpec& bc) {
  if (domain.dimension != 1 && domain.dimension != 2)
    throw std::invalid_argument("dimension must be 1 or 2");
  for (int a = 0; a < domain.dimension; ++a)
    if (!(domain.hi[a] - domain.lo[a] > 0.0) || !std::isfinite(domain.hi[a] - domain.lo[a]))
      throw std::invalid_argument("domain extent must be positive along every axis");
  if (elements_per_axis < 1)
    throw std::invalid_argument("elements_per_axis must be >= 1");
  if (bc.kind == BcKind::Dirichlet && elements_per_axis < 2)
    throw std::invalid_argument("Dirichlet grids need elements_per_axis >= 2 (no free node otherwise)");

  Grid g;
  g.dimension = domain.dimension;
  g.lo = domain.lo;
  g.hi = domain.hi;
  g.elements_per_axis = elements_per_axis;
  g.bc_kind = bc.kind;

  const int n = elements_per_axis;
  if (g.dimension == 1) {
    g.element_measure = (g.hi[0] - g.lo[0]) / n;
    g.boundary_faces.push_back({0, 1.0, 0.0, {0, -1}, 1});
    g.boundary_faces.push_back({1, 1.0, 0.0, {n, -1}, 1});
  } else {
    const double hx = (g.hi[0] - g.lo[0]) / n;
    const double hy = (g.hi[1] - g.lo[1]) / n;
    g.element_measure = hx * hy;
    const int stride = n + 1;
    int id = 0;
    // face order: bottom (i ascending), right (j ascending), top, left
    for (int i = 0; i < n; ++i)
      g.boundary_faces.push_back({id++, hx, 0.0, {i, i + 1}, 2});
    for (int j = 0; j < n; ++j)
      g.boundary_faces.push_back({id++, hy, 0.0, {j * stride + n, (j + 1) * stride + n}, 2});
    for (int i = 0; i < n; ++i)
      g.boundary_faces.push_back({id++, hx, 0.0, {n * stride + i, n * stride + i + 1}, 2});
    for (int j = 0; j < n; ++j)
      g.boundary_faces.push_back({id++, hy, 0.0, {j * stride, (j + 1) * stride}, 2});
  }

  if (bc.kind == BcKind::Robin) {
    std::vector<double> sigma;
    expand_sigma(bc, g.boundary_faces.size(), sigma);
    for (std::size_t f = 0; f < g.boundary_faces.size(); ++f)
      g.boundary_faces[f].sigma = sigma[f];
  } else if (!bc.sigma.empty()) {
    throw std::invalid_argument("sigma given but boundary condition is Dirichlet");
  }

  const int nn = g.num_nodes();
  g.free_of_node.assign(nn, -1);
  for (int v = 0; v < nn; ++v) {
    if (bc.kind == BcKind::Dirichlet && g.node_on_boundary(v)) continue;
    g.free_of_node[v] = static_cast<int>(g.node_of_free.size());
    g.node_of_free.push_back(v);
  }
  return g;
}

}  // namespace eigenweight
