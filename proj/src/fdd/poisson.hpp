// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/norms.hpp"
#include "fdd/saddle.hpp"

namespace fdd {

/// u = 100 x y (1 - x)(1 - y) sin(1/3 - x y^2) on the unit square; vanishes on the boundary.
struct PoissonManufactured {
  static double value(Point p);
  static std::array<double, 2> gradient(Point p);
  static double forcing(Point p); // -Laplacian
  static ExactScalar exact();
};

struct PoissonCase {
  int n = 20;            // cells across the unit square in x
  bool conforming = true;
  Degree degree_left = Degree::P2;
  Degree degree_right = Degree::P2;
  int n_gamma = 13;      // odd
  int quadrature_nodes = 4;
  bool orthonormal = true;
  bool explicit_ortho = false;
  bool flip_orientation = false; // Omega_1 on the plus side
  ScalarField forcing = PoissonManufactured::forcing;
  ScalarField dirichlet = [](Point) { return 0.0; };
};

struct PoissonProblem {
  std::vector<std::shared_ptr<const FunctionSpace>> spaces;
  PartitionGraph graph;
  Segment interface{{0.5, 0.0}, {0.5, 1.0}};
};

PoissonProblem make_poisson_problem(const PoissonCase& c);

/// n_gamma = 2 n_omega + 1; throws for even or non-positive counts.
int n_omega_for(int n_gamma);

struct PoissonResult {
  PoissonProblem problem;
  SaddleSystem system;
  SolutionField solution;
  std::array<double, 2> subdomain_h1{}; // H1 error per subdomain, Omega_1 first
  double broken_h1 = 0.0;
};

/// Assemble, solve and measure against the manufactured solution.
PoissonResult solve_poisson(const PoissonCase& c);

/// Broken H1 error of the single-domain solve on the conforming n x n mesh of the unit square.
double poisson_reference_error(int n, Degree degree);

/// Dirichlet set of every scalar dof on boundary edges not tagged as interface.
DirichletSet outer_dirichlet(const FunctionSpace& space, const ScalarField& g);

} // namespace fdd
