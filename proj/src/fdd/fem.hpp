// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace fdd {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using Triplets = std::vector<Eigen::Triplet<double>>;

enum class Degree { P1 = 1, P2 = 2 };

inline int local_dof_count(Degree d) { return d == Degree::P1 ? 3 : 6; }

struct BasisValues {
  std::array<double, 6> values{};
  std::array<std::array<double, 2>, 6> gradients{}; // w.r.t. reference coordinates
  int count = 0;
};

/// Lagrange basis on the reference triangle at (xi, eta). P2 local order:
/// vertices 0,1,2 then edge midpoints (0,1), (1,2), (2,0).
BasisValues reference_basis_eval(Degree degree, std::array<double, 2> point);

/// Trace of the basis on an edge (a, b) at local parameter t in [0, 1]:
/// values for a, b and (P2 only) the midpoint.
std::array<double, 3> edge_basis(Degree degree, double t);

/// Affine map from the reference triangle onto a mesh triangle.
struct AffineMap {
  Point origin;
  Eigen::Matrix2d jacobian;
  Eigen::Matrix2d inverse_transpose;
  double det = 0.0;

  AffineMap(const Mesh& mesh, int triangle);
  Point map(std::array<double, 2> ref) const;
  std::array<double, 2> physical_gradient(const std::array<double, 2>& ref_grad) const;
};

/// Continuous Lagrange space on a mesh. Vector spaces store component-major:
/// global dof = component * scalar_dof_count() + scalar dof.
class FunctionSpace {
public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, Degree degree, int components = 1);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  Degree degree() const { return degree_; }
  int components() const { return components_; }

  int scalar_dof_count() const { return static_cast<int>(dof_coords_.size()); }
  int dof_count() const { return components_ * scalar_dof_count(); }
  const std::vector<Point>& dof_coords() const { return dof_coords_; }

  /// Scalar dofs of a triangle in reference-element order.
  std::span<const int> cell_dofs(int triangle) const;

  /// Scalar dofs on the mesh edge (a, b): a, b and, for P2, the midpoint.
  std::vector<int> edge_dofs(int a, int b) const;

  /// Scalar dofs lying on boundary edges whose tag satisfies `pred`.
  std::vector<int> boundary_dofs(const std::function<bool(const std::string&)>& pred) const;

  /// Value and physical gradient of component `component` of a coefficient vector.
  double evaluate(const Vector& coeffs, const Location& loc, int component = 0) const;
  std::array<double, 2> gradient(const Vector& coeffs, const Location& loc,
                                 int component = 0) const;

private:
  int edge_index(int a, int b) const;

  std::shared_ptr<const Mesh> mesh_;
  Degree degree_;
  int components_;
  std::vector<Point> dof_coords_;
  std::vector<int> cell_dofs_;
  std::vector<std::pair<int, int>> edges_; // sorted (min, max)
};

using ScalarField = std::function<double(Point)>;
using VectorField = std::function<std::array<double, 2>(Point)>;

SparseMatrix assemble_stiffness(const FunctionSpace& space, double coefficient = 1.0);
SparseMatrix assemble_mass(const FunctionSpace& space);
Vector assemble_load(const FunctionSpace& space, const ScalarField& f);
Vector assemble_load(const FunctionSpace& space, const VectorField& f);

/// Integral of h . v over boundary edges tagged `tag` (vector space).
Vector assemble_boundary_load(const FunctionSpace& space, const std::string& tag,
                              const VectorField& h, int gauss_nodes = 4);

/// Element mass matrix of a straight 1D segment of given length.
Eigen::MatrixXd interval_mass(Degree degree, double length);

struct NsBlocks {
  SparseMatrix diffusion;            // mu * vector stiffness, 2n x 2n
  SparseMatrix divergence;           // (psi_k, div phi_j), n_p x 2n
  SparseMatrix convection;           // ((w . grad) phi_j, phi_i)
  SparseMatrix convection_jacobian;  // convection + ((phi_j . grad) w, phi_i)
};

NsBlocks assemble_ns_blocks(const FunctionSpace& velocity, const FunctionSpace& pressure, double mu,
                            const Vector& u_current);

/// Prescribed values for a set of dofs.
class DirichletSet {
public:
  /// Adds a constraint; re-adding the same value is a no-op, a different value throws.
  void add(int dof, double value);
  bool contains(int dof) const { return values_.count(dof) != 0; }
  std::size_t size() const { return values_.size(); }
  const std::map<int, double>& values() const { return values_; }
  void validate(int dof_count) const;

private:
  std::map<int, double> values_;
};

/// Identity rows for constrained dofs, constrained columns moved to the rhs.
void apply_dirichlet(SparseMatrix& system, Vector& rhs, const DirichletSet& bc);

/// Nodal interpolant of f (one scalar field per component).
Vector interpolate(const FunctionSpace& space, const std::vector<ScalarField>& f);

} // namespace fdd
