// SPDX-License-Identifier: Apache-2.0
#include "fdd/fem.hpp"

#include "fdd/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fdd {

BasisValues reference_basis_eval(Degree degree, std::array<double, 2> point) {
  const double tol = 1e-12;
  const double xi = point[0], eta = point[1];
  if (xi < -tol || eta < -tol || xi + eta > 1.0 + tol)
    throw Error("point (" + std::to_string(xi) + ", " + std::to_string(eta) +
                ") lies outside the reference triangle");

  const std::array<double, 3> lam{1.0 - xi - eta, xi, eta};
  const std::array<std::array<double, 2>, 3> dlam{{{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}};

  BasisValues b;
  if (degree == Degree::P1) {
    b.count = 3;
    for (int i = 0; i < 3; ++i) {
      b.values[i] = lam[i];
      b.gradients[i] = dlam[i];
    }
    return b;
  }

  b.count = 6;
  for (int i = 0; i < 3; ++i) {
    b.values[i] = lam[i] * (2.0 * lam[i] - 1.0);
    const double s = 4.0 * lam[i] - 1.0;
    b.gradients[i] = {s * dlam[i][0], s * dlam[i][1]};
  }
  constexpr std::array<std::array<int, 2>, 3> edges{{{0, 1}, {1, 2}, {2, 0}}};
  for (int e = 0; e < 3; ++e) {
    const int i = edges[e][0], j = edges[e][1];
    b.values[3 + e] = 4.0 * lam[i] * lam[j];
    b.gradients[3 + e] = {4.0 * (lam[j] * dlam[i][0] + lam[i] * dlam[j][0]),
                          4.0 * (lam[j] * dlam[i][1] + lam[i] * dlam[j][1])};
  }
  return b;
}

std::array<double, 3> edge_basis(Degree degree, double t) {
  if (degree == Degree::P1)
    return {1.0 - t, t, 0.0};
  return {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
}

AffineMap::AffineMap(const Mesh& mesh, int triangle) {
  const auto& t = mesh.triangles()[triangle];
  const auto& v = mesh.vertices();
  origin = v[t[0]];
  jacobian << v[t[1]].x - origin.x, v[t[2]].x - origin.x, v[t[1]].y - origin.y,
      v[t[2]].y - origin.y;
  det = jacobian.determinant();
  inverse_transpose = jacobian.inverse().transpose();
}

Point AffineMap::map(std::array<double, 2> ref) const {
  return {origin.x + jacobian(0, 0) * ref[0] + jacobian(0, 1) * ref[1],
          origin.y + jacobian(1, 0) * ref[0] + jacobian(1, 1) * ref[1]};
}

std::array<double, 2> AffineMap::physical_gradient(const std::array<double, 2>& g) const {
  return {inverse_transpose(0, 0) * g[0] + inverse_transpose(0, 1) * g[1],
          inverse_transpose(1, 0) * g[0] + inverse_transpose(1, 1) * g[1]};
}

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, Degree degree, int components)
    : mesh_(std::move(mesh)), degree_(degree), components_(components) {
  if (!mesh_)
    throw Error("function space needs a mesh");
  if (components != 1 && components != 2)
    throw Error("function space supports 1 or 2 components");

  dof_coords_ = mesh_->vertices();
  const auto& tris = mesh_->triangles();
  const int nloc = local_dof_count(degree);
  cell_dofs_.resize(tris.size() * nloc);

  if (degree == Degree::P2) {
    edges_.reserve(3 * tris.size());
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) {
        const int a = t[e], b = t[(e + 1) % 3];
        edges_.emplace_back(std::min(a, b), std::max(a, b));
      }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    const auto& v = mesh_->vertices();
    for (const auto& [a, b] : edges_)
      dof_coords_.push_back(0.5 * (v[a] + v[b]));
  }

  for (std::size_t t = 0; t < tris.size(); ++t) {
    int* d = &cell_dofs_[t * nloc];
    for (int k = 0; k < 3; ++k)
      d[k] = tris[t][k];
    if (degree == Degree::P2)
      for (int e = 0; e < 3; ++e)
        d[3 + e] = static_cast<int>(mesh_->vertex_count()) +
                   edge_index(tris[t][e], tris[t][(e + 1) % 3]);
  }
}

int FunctionSpace::edge_index(int a, int b) const {
  const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key)
    throw Error("(" + std::to_string(a) + ", " + std::to_string(b) + ") is not a mesh edge");
  return static_cast<int>(it - edges_.begin());
}

std::span<const int> FunctionSpace::cell_dofs(int triangle) const {
  const int nloc = local_dof_count(degree_);
  return {cell_dofs_.data() + static_cast<std::size_t>(triangle) * nloc,
          static_cast<std::size_t>(nloc)};
}

std::vector<int> FunctionSpace::edge_dofs(int a, int b) const {
  if (degree_ == Degree::P1)
    return {a, b};
  return {a, b, static_cast<int>(mesh_->vertex_count()) + edge_index(a, b)};
}

std::vector<int> FunctionSpace::boundary_dofs(
    const std::function<bool(const std::string&)>& pred) const {
  std::vector<int> dofs;
  for (const auto& e : mesh_->boundary_edges())
    if (pred(e.tag))
      for (int d : edge_dofs(e.vertices[0], e.vertices[1]))
        dofs.push_back(d);
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

double FunctionSpace::evaluate(const Vector& coeffs, const Location& loc, int component) const {
  const auto b = reference_basis_eval(degree_, {loc.bary[1], loc.bary[2]});
  const auto dofs = cell_dofs(loc.triangle);
  const int offset = component * scalar_dof_count();
  double value = 0.0;
  for (int k = 0; k < b.count; ++k)
    value += coeffs[offset + dofs[k]] * b.values[k];
  return value;
}

std::array<double, 2> FunctionSpace::gradient(const Vector& coeffs, const Location& loc,
                                              int component) const {
  const auto b = reference_basis_eval(degree_, {loc.bary[1], loc.bary[2]});
  const auto dofs = cell_dofs(loc.triangle);
  const AffineMap map(*mesh_, loc.triangle);
  const int offset = component * scalar_dof_count();
  std::array<double, 2> g{0.0, 0.0};
  for (int k = 0; k < b.count; ++k) {
    const auto pg = map.physical_gradient(b.gradients[k]);
    g[0] += coeffs[offset + dofs[k]] * pg[0];
    g[1] += coeffs[offset + dofs[k]] * pg[1];
  }
  return g;
}

namespace {

struct BasisTable {
  std::vector<BasisValues> at; // per quadrature point
};

BasisTable tabulate(Degree degree, const TriangleRule& rule) {
  BasisTable table;
  for (const auto& p : rule.points)
    table.at.push_back(reference_basis_eval(degree, p));
  return table;
}

SparseMatrix from_triplets(int rows, int cols, const Triplets& trip) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

void require_scalar(const FunctionSpace& space, const char* what) {
  if (space.components() != 1)
    throw Error(std::string(what) + " needs a scalar space");
}

} // namespace

SparseMatrix assemble_stiffness(const FunctionSpace& space, double coefficient) {
  require_scalar(space, "stiffness assembly");
  const auto& rule = triangle_rule_deg4();
  const auto table = tabulate(space.degree(), rule);
  const int nloc = local_dof_count(space.degree());
  const auto& mesh = space.mesh();

  Triplets trip;
  trip.reserve(mesh.triangle_count() * nloc * nloc);
  Eigen::MatrixXd ke(nloc, nloc);
  std::vector<std::array<double, 2>> grads(nloc);
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const AffineMap map(mesh, t);
    ke.setZero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * std::abs(map.det) * coefficient;
      for (int i = 0; i < nloc; ++i)
        grads[i] = map.physical_gradient(table.at[q].gradients[i]);
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          ke(i, j) += w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
    }
    const auto dofs = space.cell_dofs(t);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j)
        trip.emplace_back(dofs[i], dofs[j], ke(i, j));
  }
  return from_triplets(space.dof_count(), space.dof_count(), trip);
}

SparseMatrix assemble_mass(const FunctionSpace& space) {
  require_scalar(space, "mass assembly");
  const auto& rule = triangle_rule_deg4();
  const auto table = tabulate(space.degree(), rule);
  const int nloc = local_dof_count(space.degree());
  const auto& mesh = space.mesh();

  Triplets trip;
  trip.reserve(mesh.triangle_count() * nloc * nloc);
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const AffineMap map(mesh, t);
    const auto dofs = space.cell_dofs(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * std::abs(map.det);
      const auto& v = table.at[q].values;
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          trip.emplace_back(dofs[i], dofs[j], w * v[i] * v[j]);
    }
  }
  return from_triplets(space.dof_count(), space.dof_count(), trip);
}

Vector assemble_load(const FunctionSpace& space, const ScalarField& f) {
  require_scalar(space, "scalar load assembly");
  const auto& rule = triangle_rule_deg4();
  const auto table = tabulate(space.degree(), rule);
  const int nloc = local_dof_count(space.degree());
  const auto& mesh = space.mesh();

  Vector load = Vector::Zero(space.dof_count());
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const AffineMap map(mesh, t);
    const auto dofs = space.cell_dofs(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double fw = f(map.map(rule.points[q])) * rule.weights[q] * std::abs(map.det);
      for (int i = 0; i < nloc; ++i)
        load[dofs[i]] += fw * table.at[q].values[i];
    }
  }
  return load;
}

Vector assemble_load(const FunctionSpace& space, const VectorField& f) {
  if (space.components() != 2)
    throw Error("vector load assembly needs a two-component space");
  const auto& rule = triangle_rule_deg4();
  const auto table = tabulate(space.degree(), rule);
  const int nloc = local_dof_count(space.degree());
  const int n = space.scalar_dof_count();
  const auto& mesh = space.mesh();

  Vector load = Vector::Zero(space.dof_count());
  for (int t = 0; t < static_cast<int>(mesh.triangle_count()); ++t) {
    const AffineMap map(mesh, t);
    const auto dofs = space.cell_dofs(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto fv = f(map.map(rule.points[q]));
      const double w = rule.weights[q] * std::abs(map.det);
      for (int i = 0; i < nloc; ++i) {
        load[dofs[i]] += w * fv[0] * table.at[q].values[i];
        load[n + dofs[i]] += w * fv[1] * table.at[q].values[i];
      }
    }
  }
  return load;
}

Vector assemble_boundary_load(const FunctionSpace& space, const std::string& tag,
                              const VectorField& h, int gauss_nodes) {
  if (space.components() != 2)
    throw Error("boundary load assembly needs a two-component space");
  const GaussRule g = gauss_legendre(gauss_nodes);
  const int n = space.scalar_dof_count();
  const auto& v = space.mesh().vertices();

  Vector load = Vector::Zero(space.dof_count());
  for (const auto& e : space.mesh().boundary_edges()) {
    if (e.tag != tag)
      continue;
    const Point a = v[e.vertices[0]], b = v[e.vertices[1]];
    const double len = norm(b - a);
    const auto dofs = space.edge_dofs(e.vertices[0], e.vertices[1]);
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double t = 0.5 * (g.nodes[q] + 1.0);
      const auto hv = h(a + t * (b - a));
      const auto phi = edge_basis(space.degree(), t);
      const double w = 0.5 * len * g.weights[q];
      for (std::size_t k = 0; k < dofs.size(); ++k) {
        load[dofs[k]] += w * hv[0] * phi[k];
        load[n + dofs[k]] += w * hv[1] * phi[k];
      }
    }
  }
  return load;
}

Eigen::MatrixXd interval_mass(Degree degree, double length) {
  if (degree == Degree::P1)
    return (Eigen::Matrix2d() << 2.0, 1.0, 1.0, 2.0).finished() * (length / 6.0);
  Eigen::Matrix3d m;
  m << 4.0, -1.0, 2.0, -1.0, 4.0, 2.0, 2.0, 2.0, 16.0;
  return m * (length / 30.0);
}

NsBlocks assemble_ns_blocks(const FunctionSpace& velocity, const FunctionSpace& pressure, double mu,
                            const Vector& u_current) {
  if (velocity.components() != 2 || pressure.components() != 1)
    throw Error("Navier-Stokes blocks need a vector velocity and a scalar pressure space");
  if (velocity.mesh_ptr() != pressure.mesh_ptr())
    throw Error("velocity and pressure spaces live on different meshes");
  if (u_current.size() != velocity.dof_count())
    throw Error("velocity state has the wrong size");

  const auto& rule = triangle_rule_deg4();
  const auto vtab = tabulate(velocity.degree(), rule);
  const auto ptab = tabulate(pressure.degree(), rule);
  const int nv = local_dof_count(velocity.degree());
  const int np = local_dof_count(pressure.degree());
  const int n = velocity.scalar_dof_count();
  const auto& mesh = velocity.mesh();

  Triplets diff, div, conv, jac;
  const std::size_t nt = mesh.triangle_count();
  diff.reserve(nt * 2 * nv * nv);
  div.reserve(nt * 2 * np * nv);
  conv.reserve(nt * 2 * nv * nv);
  jac.reserve(nt * 6 * nv * nv);

  std::vector<std::array<double, 2>> g(nv);
  for (int t = 0; t < static_cast<int>(nt); ++t) {
    const AffineMap map(mesh, t);
    const auto vd = velocity.cell_dofs(t);
    const auto pd = pressure.cell_dofs(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double w = rule.weights[q] * std::abs(map.det);
      const auto& phi = vtab.at[q].values;
      for (int i = 0; i < nv; ++i)
        g[i] = map.physical_gradient(vtab.at[q].gradients[i]);

      // State and its gradient at the quadrature point.
      std::array<double, 2> wv{0.0, 0.0};
      std::array<std::array<double, 2>, 2> dw{}; // dw[c][d] = d w_c / d x_d
      for (int k = 0; k < nv; ++k)
        for (int c = 0; c < 2; ++c) {
          const double coef = u_current[c * n + vd[k]];
          wv[c] += coef * phi[k];
          dw[c][0] += coef * g[k][0];
          dw[c][1] += coef * g[k][1];
        }

      for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nv; ++j) {
          const double a = w * mu * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
          const double adv = w * (wv[0] * g[j][0] + wv[1] * g[j][1]) * phi[i];
          for (int c = 0; c < 2; ++c) {
            diff.emplace_back(c * n + vd[i], c * n + vd[j], a);
            conv.emplace_back(c * n + vd[i], c * n + vd[j], adv);
            jac.emplace_back(c * n + vd[i], c * n + vd[j], adv);
            for (int d = 0; d < 2; ++d)
              jac.emplace_back(c * n + vd[i], d * n + vd[j], w * phi[j] * dw[c][d] * phi[i]);
          }
        }
      }
      const auto& psi = ptab.at[q].values;
      for (int k = 0; k < np; ++k)
        for (int j = 0; j < nv; ++j)
          for (int c = 0; c < 2; ++c)
            div.emplace_back(pd[k], c * n + vd[j], w * psi[k] * g[j][c]);
    }
  }

  NsBlocks blocks;
  blocks.diffusion = from_triplets(2 * n, 2 * n, diff);
  blocks.divergence = from_triplets(pressure.dof_count(), 2 * n, div);
  blocks.convection = from_triplets(2 * n, 2 * n, conv);
  blocks.convection_jacobian = from_triplets(2 * n, 2 * n, jac);
  return blocks;
}

void DirichletSet::add(int dof, double value) {
  if (dof < 0)
    throw Error("negative Dirichlet dof index");
  auto [it, inserted] = values_.emplace(dof, value);
  if (!inserted && it->second != value)
    throw Error("conflicting Dirichlet values for dof " + std::to_string(dof));
}

void DirichletSet::validate(int dof_count) const {
  if (!values_.empty() && values_.rbegin()->first >= dof_count)
    throw Error("Dirichlet dof " + std::to_string(values_.rbegin()->first) +
                " out of range for a space of dimension " + std::to_string(dof_count));
}

void apply_dirichlet(SparseMatrix& system, Vector& rhs, const DirichletSet& bc) {
  if (system.rows() != system.cols() || system.rows() != rhs.size())
    throw Error("Dirichlet elimination needs a square system matching the rhs");
  bc.validate(static_cast<int>(system.rows()));
  const auto& fixed = bc.values();

  Triplets trip;
  trip.reserve(system.nonZeros());
  for (int col = 0; col < system.outerSize(); ++col) {
    const auto cit = fixed.find(col);
    for (SparseMatrix::InnerIterator it(system, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (fixed.count(row))
        continue;
      if (cit != fixed.end())
        rhs[row] -= it.value() * cit->second;
      else
        trip.emplace_back(row, col, it.value());
    }
  }
  for (const auto& [dof, value] : fixed) {
    trip.emplace_back(dof, dof, 1.0);
    rhs[dof] = value;
  }
  system = from_triplets(static_cast<int>(system.rows()), static_cast<int>(system.cols()), trip);
}

Vector interpolate(const FunctionSpace& space, const std::vector<ScalarField>& f) {
  if (static_cast<int>(f.size()) != space.components())
    throw Error("interpolation needs one field per component");
  const int n = space.scalar_dof_count();
  Vector u(space.dof_count());
  for (int c = 0; c < space.components(); ++c)
    for (int i = 0; i < n; ++i)
      u[c * n + i] = f[c](space.dof_coords()[i]);
  return u;
}

} // namespace fdd
