// SPDX-License-Identifier: Apache-2.0
#include "fdd/poisson.hpp"

#include <cmath>

namespace fdd {

double PoissonManufactured::value(Point p) {
  const double a = p.x * (1.0 - p.x), b = p.y * (1.0 - p.y);
  return 100.0 * a * b * std::sin(1.0 / 3.0 - p.x * p.y * p.y);
}

std::array<double, 2> PoissonManufactured::gradient(Point p) {
  const double x = p.x, y = p.y;
  const double a = x * (1.0 - x), b = y * (1.0 - y);
  const double th = 1.0 / 3.0 - x * y * y;
  const double g = 100.0 * a * b;
  const double s = std::sin(th), c = std::cos(th);
  return {100.0 * (1.0 - 2.0 * x) * b * s - y * y * g * c,
          100.0 * a * (1.0 - 2.0 * y) * s - 2.0 * x * y * g * c};
}

double PoissonManufactured::forcing(Point p) {
  const double x = p.x, y = p.y;
  const double a = x * (1.0 - x), b = y * (1.0 - y);
  const double th = 1.0 / 3.0 - x * y * y;
  const double g = 100.0 * a * b;
  const double gx = 100.0 * (1.0 - 2.0 * x) * b, gy = 100.0 * a * (1.0 - 2.0 * y);
  const double s = std::sin(th), c = std::cos(th);
  const double uxx = -200.0 * b * s - 2.0 * gx * y * y * c - g * std::pow(y, 4) * s;
  const double uyy = -200.0 * a * s - 4.0 * gy * x * y * c + g * (-4.0 * x * x * y * y * s - 2.0 * x * c);
  return -(uxx + uyy);
}

ExactScalar PoissonManufactured::exact() { return {value, gradient}; }

int n_omega_for(int n_gamma) {
  if (n_gamma < 1 || n_gamma % 2 == 0)
    throw Error("n_gamma must be odd and positive (n_gamma = 2 n_omega + 1), got " + std::to_string(n_gamma));
  return (n_gamma - 1) / 2;
}

DirichletSet outer_dirichlet(const FunctionSpace& space, const ScalarField& g) {
  DirichletSet bc;
  for (const auto& e : space.mesh().boundary_edges()) {
    if (e.tag.rfind("interface", 0) == 0)
      continue;
    for (int dof : space.edge_dofs(e.vertices[0], e.vertices[1]))
      bc.add(dof, g(space.dof_coords()[dof]));
  }
  return bc;
}

PoissonProblem make_poisson_problem(const PoissonCase& c) {
  const int n_omega = n_omega_for(c.n_gamma);
  auto [left, right] = poisson_mesh_pair(c.n, c.conforming);
  PoissonProblem prob;
  const std::array<std::shared_ptr<const Mesh>, 2> meshes{std::make_shared<const Mesh>(std::move(left)),
                                                         std::make_shared<const Mesh>(std::move(right))};
  const std::array<Degree, 2> degrees{c.degree_left, c.degree_right};
  for (int i = 0; i < 2; ++i) {
    auto space = std::make_shared<const FunctionSpace>(meshes[i], degrees[i]);
    SubdomainOperator op;
    op.trace_space = space;
    op.dof_count = space->dof_count();
    op.matrix = assemble_stiffness(*space);
    op.rhs = assemble_load(*space, c.forcing);
    op.bc = outer_dirichlet(*space, c.dirichlet);
    prob.graph.subdomains.push_back(std::move(op));
    prob.spaces.push_back(space);
  }
  const double L = prob.interface.length();
  MultiplierBasis basis = c.orthonormal ? MultiplierBasis::orthonormal(L, n_omega) : MultiplierBasis::raw(L, n_omega);
  InterfaceSpec spec{prob.interface, std::move(basis), {}, {}, 1};
  InterfaceSide s1{0, interface_edge_partition(*meshes[0], interface_tag(1), prob.interface)};
  InterfaceSide s2{1, interface_edge_partition(*meshes[1], interface_tag(1), prob.interface)};
  if (c.flip_orientation)
    std::swap(s1, s2);
  spec.minus.push_back(std::move(s1));
  spec.plus.push_back(std::move(s2));
  prob.graph.interfaces.push_back(std::move(spec));
  prob.graph.quadrature_nodes = c.quadrature_nodes;
  prob.graph.explicit_ortho = c.explicit_ortho;
  return prob;
}

PoissonResult solve_poisson(const PoissonCase& c) {
  PoissonResult r{make_poisson_problem(c), {}, {}, {}, 0.0};
  r.system = build_saddle(r.problem.graph);
  r.solution = solve(r.system);
  const ExactScalar ex = PoissonManufactured::exact();
  // Subdomain 0 of the graph is Omega_1 even when the orientation is flipped.
  double sq = 0.0;
  for (int i = 0; i < 2; ++i) {
    const ErrorParts e = subdomain_error(*r.problem.spaces[i], r.solution.u[i], ex);
    r.subdomain_h1[i] = e.h1();
    sq += e.l2_sq + e.h1_semi_sq;
  }
  r.broken_h1 = std::sqrt(sq);
  return r;
}

double poisson_reference_error(int n, Degree degree) {
  if (n <= 0)
    throw Error("reference mesh needs a positive cell count");
  auto mesh = std::make_shared<const Mesh>(Rect{0.0, 1.0, 0.0, 1.0}, n, n);
  auto space = std::make_shared<const FunctionSpace>(mesh, degree);
  PartitionGraph graph;
  SubdomainOperator op;
  op.trace_space = space;
  op.dof_count = space->dof_count();
  op.matrix = assemble_stiffness(*space);
  op.rhs = assemble_load(*space, PoissonManufactured::forcing);
  op.bc = outer_dirichlet(*space, [](Point) { return 0.0; });
  graph.subdomains.push_back(std::move(op));
  const SolutionField sol = solve(build_saddle(graph));
  return subdomain_error(*space, sol.u[0], PoissonManufactured::exact()).h1();
}

} // namespace fdd
