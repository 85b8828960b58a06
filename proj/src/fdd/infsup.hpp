// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/saddle.hpp"

namespace fdd {

/// Dense data of the generalized eigenproblem B X_X^{-1} B^T eta = sigma X_Lambda eta.
struct InfSupProblem {
  Eigen::MatrixXd b;        // n_gamma x (free trace dofs of both sides), signed
  Eigen::MatrixXd x_x;      // L2(Gamma) mass of the traces
  Eigen::MatrixXd x_lambda; // identity for orthonormal multipliers, Gram matrix otherwise
};

/// L2 surrogate for one interface of a partition over all trace dofs; with
/// include_dirichlet = false the trace dofs fixed by Dirichlet conditions are dropped.
InfSupProblem build_surrogate(const PartitionGraph& graph, int interface, bool include_dirichlet = true);

/// sqrt of the smallest generalized eigenvalue.
double beta_estimate(const InfSupProblem& problem);

/// Same value through the full system [[X_X, B^T], [B, 0]]; for cross-checks on small instances.
double beta_estimate_full(const InfSupProblem& problem);

} // namespace fdd
