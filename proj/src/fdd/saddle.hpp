// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/fem.hpp"
#include "fdd/multiplier.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace fdd {

/// Local operator of one subdomain. The first trace_space->dof_count() local
/// unknowns are the coefficients of trace_space; further unknowns (pressure)
/// do not couple across interfaces.
struct SubdomainOperator {
  std::shared_ptr<const FunctionSpace> trace_space;
  int dof_count = 0;
  SparseMatrix matrix;
  Vector rhs;
  DirichletSet bc; // local indices
};

struct InterfaceSide {
  int subdomain = -1;
  std::vector<InterfaceEdge> edges; // arc length measured along the interface segment
};

struct InterfaceSpec {
  Segment segment;
  MultiplierBasis basis;
  std::vector<InterfaceSide> minus;
  std::vector<InterfaceSide> plus;
  int components = 1; // every component of the trace space gets its own copy of the basis

  int multiplier_count() const { return components * basis.size(); }
};

struct PartitionGraph {
  std::vector<SubdomainOperator> subdomains;
  std::vector<InterfaceSpec> interfaces;
  int quadrature_nodes = 4;
  // Assemble orthonormal couplings as R^{-T} B with B from the raw basis instead
  // of integrating the orthonormal functions directly.
  bool explicit_ortho = false;
  Vector constraint_rhs; // optional, one entry per multiplier

  void validate() const;
};

/// Global layout [u_1 ... u_n | lambda_1 ... lambda_m].
struct SaddleSystem {
  SparseMatrix matrix; // Dirichlet rows/columns eliminated
  Vector rhs;
  SparseMatrix coupling; // signed B over all primal dofs (before elimination)
  std::vector<int> subdomain_offsets;
  std::vector<int> interface_offsets; // into the multiplier block
  std::vector<char> constrained;      // per primal dof
  int primal_size = 0;
  int multiplier_size = 0;

  int size() const { return primal_size + multiplier_size; }
  int global_dof(int subdomain, int local) const { return subdomain_offsets[subdomain] + local; }
  int global_multiplier(int interface, int k) const {
    return primal_size + interface_offsets[interface] + k;
  }
};

struct SolutionField {
  std::vector<Vector> u;
  std::vector<Vector> lambda;
  Vector raw;
  double residual = 0.0; // ||K x - b||_inf / ||b||_inf
};

SaddleSystem build_saddle(const PartitionGraph& graph);

/// Sparse LU solve. Throws naming the offending block when the system is singular.
SolutionField solve(const SaddleSystem& system);

/// max_m |(B u)_m| relative to ||B||_inf ||u||_inf.
double jump_residual(const SaddleSystem& system, const Vector& primal);

enum class ConditionMethod { automatic, exact, hager_higham };

/// 1-norm condition number. `automatic` is exact up to 2000 unknowns.
double condition_estimate(const SparseMatrix& matrix, ConditionMethod method = ConditionMethod::automatic);
double condition_estimate(const SaddleSystem& system, ConditionMethod method = ConditionMethod::automatic);

/// `i j value` per stored entry, column by column.
void write_triplets(std::ostream& out, const SaddleSystem& system);

} // namespace fdd
