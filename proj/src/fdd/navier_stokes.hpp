// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/norms.hpp"
#include "fdd/saddle.hpp"

#include <optional>
#include <string>

namespace fdd {

/// Steady incompressible Navier-Stokes,
///   -mu Lap u + (u . grad) u + grad p = f,  div u = 0,
/// u = g on Gamma_D and (mu grad u - p I) n = h on Gamma_N.
struct NsProblem {
  double mu = 1.0;
  double lid_velocity = 0.0; // bookkeeping only: Re = lid_velocity / mu
  MeshSize h{16};
  NsLayout layout = default_ns_layout();
  std::vector<int> n_gamma;  // per interface, 2 (2 n_omega + 1)
  VectorField forcing = [](Point) { return std::array<double, 2>{0.0, 0.0}; };
  VectorField dirichlet = [](Point) { return std::array<double, 2>{0.0, 0.0}; };
  VectorField neumann = [](Point) { return std::array<double, 2>{0.0, 0.0}; };
  std::vector<std::string> neumann_sides; // sides of the outer rectangle: left, right, bottom, top
  bool pin_pressure = false;
  int quadrature_nodes = 4;
  bool orthonormal = true;

  double reynolds() const { return mu > 0.0 ? lid_velocity / mu : 0.0; }
  void validate() const;
};

/// Per-subdomain Taylor-Hood data. Local unknowns are [u_x | u_y | p].
struct NsSubdomain {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FunctionSpace> velocity; // P2, two components
  std::shared_ptr<const FunctionSpace> pressure; // P1
  DirichletSet bc;
  Vector load; // forcing plus Neumann contribution, velocity rows only
  SparseMatrix diffusion;
  SparseMatrix divergence;

  int velocity_dofs() const { return velocity->dof_count(); }
  int pressure_dofs() const { return pressure->dof_count(); }
  int dof_count() const { return velocity_dofs() + pressure_dofs(); }
};

struct PressurePin {
  int subdomain = -1;
  int dof = -1; // local index into [u_x | u_y | p]
};

class NsDiscretization {
public:
  explicit NsDiscretization(const NsProblem& problem);

  const NsProblem& problem() const { return problem_; }
  const std::vector<NsSubdomain>& subdomains() const { return subs_; }
  const std::vector<InterfaceSpec>& interfaces() const { return interfaces_; }

  /// Pressure dof at the vertex nearest (0, 0), constrained to zero. Idempotent.
  PressurePin pin_pressure();
  const std::optional<PressurePin>& pin() const { return pin_; }

  int velocity_dofs() const;
  int pressure_dofs() const;
  int multiplier_dofs() const;

  /// Saddle graph for the linearisation at `state` (Stokes when `state` is empty).
  /// The rhs is the negative nonlinear residual without the multiplier term and
  /// Dirichlet values are homogeneous, except for the Stokes solve.
  PartitionGraph linearised_graph(const std::vector<Vector>* state) const;

  /// Nonlinear residual including B^T lambda and B u, with Dirichlet rows removed.
  double residual_norm(const std::vector<Vector>& state, const std::vector<Vector>& lambda,
                       const SaddleSystem& layout) const;

private:
  NsProblem problem_;
  std::vector<NsSubdomain> subs_;
  std::vector<InterfaceSpec> interfaces_;
  std::optional<PressurePin> pin_;
};

struct NewtonLog {
  std::vector<double> residuals; // after the Stokes solve, then after every Newton update
  int iterations = 0;
};

struct NsSolution {
  std::vector<Vector> state; // per subdomain [u_x | u_y | p]
  std::vector<Vector> lambda;
  NewtonLog log;
  int system_size = 0;
  double jump = 0.0;
};

/// Newton iteration from the Stokes solution; throws with the residual history on failure.
NsSolution newton_solve(const NsDiscretization& disc, double tol = 1e-8, int max_iter = 25);

/// u = (sin(pi y), e^x), p = -x^2 / 2 with Gamma_N = {x = 1}.
struct NsManufactured {
  static std::array<double, 2> velocity(Point p);
  static double pressure(Point p);
  static std::array<double, 2> forcing(Point p, double mu);
  static std::array<double, 2> traction_right(Point p, double mu);
};

NsProblem manufactured_case(MeshSize h, std::vector<int> n_gamma = {22, 18, 18, 14}, double mu = 1.0);

/// Lid-driven cavity, mu = 1, U = 500, n_gamma = (42, 18, 18, 14).
NsProblem cavity_case(MeshSize h);

struct NsErrors {
  double velocity_h1 = 0.0;
  double pressure_l2 = 0.0;
  double combined() const { return velocity_h1 + pressure_l2; }
};

NsErrors manufactured_errors(const NsDiscretization& disc, const NsSolution& sol);

/// Velocity of the multi-subdomain field at p (first subdomain containing p).
std::array<double, 2> evaluate_velocity(const NsDiscretization& disc, const NsSolution& sol, Point p);

struct EddyBox {
  std::string label;
  Rect box;
};

struct Eddy {
  std::string label;
  Point center;
  double speed = 0.0;
  bool on_boundary = false; // minimum attained on the search box boundary
};

const std::vector<EddyBox>& cavity_eddy_boxes();
const std::vector<std::pair<std::string, Point>>& cavity_reference_centers();

/// Minimum of |u_h| on a grid of step `step`, then once more around the best point at step / 100.
/// Interior local minima take precedence over points on the box boundary.
std::vector<Eddy> find_eddies(const std::function<std::array<double, 2>(Point)>& velocity,
                              const std::vector<EddyBox>& boxes, double step = 1e-3);

} // namespace fdd
