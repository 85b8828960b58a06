// SPDX-License-Identifier: Apache-2.0
#include "fdd/infsup.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace fdd {

InfSupProblem build_surrogate(const PartitionGraph& graph, int interface, bool include_dirichlet) {
  graph.validate();
  if (interface < 0 || interface >= static_cast<int>(graph.interfaces.size()))
    throw Error("interface index out of range");
  const auto& spec = graph.interfaces[interface];
  const int n_gamma = spec.basis.size();
  const int comps = spec.components;
  const bool via_r_inv = graph.explicit_ortho && spec.basis.orthonormal();
  const MultiplierBasis raw = MultiplierBasis::raw(spec.basis.length(), spec.basis.fourier().n_omega());

  std::vector<Eigen::MatrixXd> b_blocks, m_blocks;
  for (const auto& [group, sign] : {std::pair{&spec.minus, -1}, std::pair{&spec.plus, 1}})
    for (const auto& side : *group) {
      const auto& sub = graph.subdomains[side.subdomain];
      const auto& space = *sub.trace_space;
      const int ns = space.scalar_dof_count();
      const SparseMatrix mass = assemble_trace_mass(space, side.edges);
      const CouplingMatrix b =
          via_r_inv ? apply_ortho(assemble_coupling(raw, space, side.edges, graph.quadrature_nodes, sign),
                                  *spec.basis.ortho())
                    : assemble_coupling(spec.basis, space, side.edges, graph.quadrature_nodes, sign);
      for (int c = 0; c < comps; ++c) {
        std::vector<int> free;
        for (int j = 0; j < ns; ++j)
          if (mass.coeff(j, j) > 0.0 && (include_dirichlet || !sub.bc.contains(c * ns + j)))
            free.push_back(j);
        const int nf = static_cast<int>(free.size());
        Eigen::MatrixXd bb = Eigen::MatrixXd::Zero(comps * n_gamma, nf);
        Eigen::MatrixXd mm(nf, nf);
        for (int j = 0; j < nf; ++j) {
          for (int m = 0; m < n_gamma; ++m)
            bb(c * n_gamma + m, j) = sign * b.entries.coeff(m, free[j]);
          for (int i = 0; i < nf; ++i)
            mm(i, j) = mass.coeff(free[i], free[j]);
        }
        b_blocks.push_back(std::move(bb));
        m_blocks.push_back(std::move(mm));
      }
    }

  int cols = 0;
  for (const auto& m : m_blocks)
    cols += static_cast<int>(m.rows());
  if (cols == 0)
    throw Error("interface " + std::to_string(interface + 1) + " has no free trace dofs");
  InfSupProblem p;
  p.b = Eigen::MatrixXd::Zero(comps * n_gamma, cols);
  p.x_x = Eigen::MatrixXd::Zero(cols, cols);
  int at = 0;
  for (std::size_t k = 0; k < b_blocks.size(); ++k) {
    const int nk = static_cast<int>(m_blocks[k].rows());
    p.b.middleCols(at, nk) = b_blocks[k];
    p.x_x.block(at, at, nk, nk) = m_blocks[k];
    at += nk;
  }
  const Eigen::MatrixXd gram =
      spec.basis.orthonormal() ? Eigen::MatrixXd::Identity(n_gamma, n_gamma) : multiplier_gram(spec.basis);
  p.x_lambda = Eigen::MatrixXd::Zero(comps * n_gamma, comps * n_gamma);
  for (int c = 0; c < comps; ++c)
    p.x_lambda.block(c * n_gamma, c * n_gamma, n_gamma, n_gamma) = gram;
  return p;
}

namespace {

void check_problem(const InfSupProblem& p) {
  if (p.x_x.rows() != p.x_x.cols() || p.x_x.rows() != p.b.cols())
    throw Error("trace norm matrix does not match the coupling matrix columns");
  if (p.x_lambda.rows() != p.x_lambda.cols() || p.x_lambda.rows() != p.b.rows())
    throw Error("multiplier norm matrix does not match the coupling matrix rows");
  for (const auto* m : {&p.x_x, &p.x_lambda}) {
    if (!m->isApprox(m->transpose(), 1e-12))
      throw Error("norm matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(*m);
    if (llt.info() != Eigen::Success)
      throw Error("norm matrix is not positive definite");
  }
}

double smallest_sqrt(const Eigen::MatrixXd& s, const Eigen::MatrixXd& x_lambda) {
  const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, x_lambda, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("generalized eigenvalue solver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
}

} // namespace

double beta_estimate(const InfSupProblem& problem) {
  check_problem(problem);
  Eigen::LLT<Eigen::MatrixXd> llt(problem.x_x);
  const Eigen::MatrixXd xinv_bt = llt.solve(problem.b.transpose());
  return smallest_sqrt(problem.b * xinv_bt, problem.x_lambda);
}

double beta_estimate_full(const InfSupProblem& problem) {
  check_problem(problem);
  const int n = static_cast<int>(problem.x_x.rows());
  const int m = static_cast<int>(problem.b.rows());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = problem.x_x;
  k.topRightCorner(n, m) = problem.b.transpose();
  k.bottomLeftCorner(m, n) = problem.b;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (!lu.isInvertible())
    return 0.0;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + m, m);
  rhs.bottomRows(m).setIdentity();
  // The multiplier block of K^{-1} is -(B X^{-1} B^T)^{-1}.
  const Eigen::MatrixXd schur_inv = -lu.solve(rhs).bottomRows(m);
  return smallest_sqrt(schur_inv.inverse(), problem.x_lambda);
}

} // namespace fdd
