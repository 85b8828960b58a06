// SPDX-License-Identifier: Apache-2.0
#include "fdd/saddle.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>

namespace fdd {

namespace {

constexpr double kGeomTol = 1e-10;

std::string iface_name(int k) { return "interface " + std::to_string(k + 1); }

void validate_side_coverage(const InterfaceSpec& spec, const std::vector<InterfaceSide>& sides,
                            const char* which, int k) {
  std::vector<std::pair<double, double>> spans;
  for (const auto& side : sides)
    for (const auto& e : side.edges)
      spans.emplace_back(e.s0, e.s1);
  std::sort(spans.begin(), spans.end());
  const double L = spec.segment.length();
  const double tol = kGeomTol * std::max(1.0, L);
  if (spans.empty())
    throw Error(iface_name(k) + ": " + which + " side has no edges");
  double at = 0.0;
  for (const auto& [s0, s1] : spans) {
    if (std::abs(s0 - at) > tol)
      throw Error(iface_name(k) + ": " + which + " side edges do not tile [0, L] (gap or overlap at s = " +
                  std::to_string(at) + ")");
    at = s1;
  }
  if (std::abs(at - L) > tol)
    throw Error(iface_name(k) + ": " + which + " side edges end at s = " + std::to_string(at) +
                ", interface length is " + std::to_string(L));
}

std::string block_name(const SaddleSystem& sys, int index) {
  if (index < sys.primal_size) {
    const auto it = std::upper_bound(sys.subdomain_offsets.begin(), sys.subdomain_offsets.end(), index);
    const int sub = static_cast<int>(it - sys.subdomain_offsets.begin()) - 1;
    return "subdomain " + std::to_string(sub + 1) + " block (local dof " +
           std::to_string(index - sys.subdomain_offsets[sub]) + ")";
  }
  const int m = index - sys.primal_size;
  const auto it = std::upper_bound(sys.interface_offsets.begin(), sys.interface_offsets.end(), m);
  const int k = static_cast<int>(it - sys.interface_offsets.begin()) - 1;
  return "multiplier block of " + iface_name(k) + " (row " + std::to_string(m - sys.interface_offsets[k]) + ")";
}

// Every interface must couple to at least as many independent free trace dofs as it has multipliers.
void check_interface_rank(const SaddleSystem& sys) {
  const int n_iface = static_cast<int>(sys.interface_offsets.size()) - 1;
  const SparseMatrix bt = sys.coupling.transpose(); // primal x multipliers
  for (int k = 0; k < n_iface; ++k) {
    const int r0 = sys.interface_offsets[k], r1 = sys.interface_offsets[k + 1];
    std::set<int> cols;
    for (int r = r0; r < r1; ++r)
      for (SparseMatrix::InnerIterator it(bt, r); it; ++it)
        if (!sys.constrained[it.row()] && it.value() != 0.0)
          cols.insert(static_cast<int>(it.row()));
    if (static_cast<int>(cols.size()) < r1 - r0)
      throw Error("singular saddle system: " + iface_name(k) + " has " + std::to_string(r1 - r0) +
                  " multipliers but only " + std::to_string(cols.size()) +
                  " free trace dofs (multiplier space too rich for the mesh)");
    std::vector<int> col_list(cols.begin(), cols.end());
    std::vector<int> col_pos(sys.primal_size, -1);
    for (std::size_t j = 0; j < col_list.size(); ++j)
      col_pos[col_list[j]] = static_cast<int>(j);
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(r1 - r0, col_list.size());
    for (int r = r0; r < r1; ++r)
      for (SparseMatrix::InnerIterator it(bt, r); it; ++it)
        if (col_pos[it.row()] >= 0)
          dense(r - r0, col_pos[it.row()]) = it.value();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dense.transpose());
    qr.setThreshold(1e-12);
    if (qr.rank() < r1 - r0)
      throw Error("singular saddle system: coupling block of " + iface_name(k) + " has rank " +
                  std::to_string(qr.rank()) + " < " + std::to_string(r1 - r0) +
                  " multipliers (inf-sup violated)");
  }
}

} // namespace

void PartitionGraph::validate() const {
  const int n_sub = static_cast<int>(subdomains.size());
  for (int i = 0; i < n_sub; ++i) {
    const auto& s = subdomains[i];
    const std::string name = "subdomain " + std::to_string(i + 1);
    if (!s.trace_space)
      throw Error(name + " has no function space");
    if (s.dof_count < s.trace_space->dof_count())
      throw Error(name + ": dof count smaller than its trace space");
    if (s.matrix.rows() != s.dof_count || s.matrix.cols() != s.dof_count)
      throw Error(name + ": operator is " + std::to_string(s.matrix.rows()) + "x" +
                  std::to_string(s.matrix.cols()) + ", expected " + std::to_string(s.dof_count));
    if (s.rhs.size() != s.dof_count)
      throw Error(name + ": rhs size mismatch");
    s.bc.validate(s.dof_count);
  }
  int multipliers = 0;
  for (int k = 0; k < static_cast<int>(interfaces.size()); ++k) {
    const auto& spec = interfaces[k];
    if (spec.minus.empty() || spec.plus.empty())
      throw Error(iface_name(k) + " needs subdomains on both sides");
    if (std::abs(spec.basis.length() - spec.segment.length()) > kGeomTol)
      throw Error(iface_name(k) + ": multiplier basis length differs from the segment length");
    std::set<int> seen;
    for (const auto* group : {&spec.minus, &spec.plus})
      for (const auto& side : *group) {
        if (side.subdomain < 0 || side.subdomain >= n_sub)
          throw Error(iface_name(k) + " references missing subdomain " + std::to_string(side.subdomain + 1));
        if (!seen.insert(side.subdomain).second)
          throw Error(iface_name(k) + " lists subdomain " + std::to_string(side.subdomain + 1) + " twice");
        const auto& space = *subdomains[side.subdomain].trace_space;
        if (space.components() != spec.components)
          throw Error(iface_name(k) + ": component count differs from subdomain " +
                      std::to_string(side.subdomain + 1));
        const auto& verts = space.mesh().vertices();
        for (const auto& e : side.edges)
          for (int v : e.vertices)
            if (!spec.segment.contains(verts[v], kGeomTol))
              throw Error(iface_name(k) + ": edge of subdomain " + std::to_string(side.subdomain + 1) +
                          " does not lie on the interface segment");
      }
    validate_side_coverage(spec, spec.minus, "minus", k);
    validate_side_coverage(spec, spec.plus, "plus", k);
    multipliers += spec.multiplier_count();
  }
  if (constraint_rhs.size() != 0 && constraint_rhs.size() != multipliers)
    throw Error("constraint rhs has " + std::to_string(constraint_rhs.size()) + " entries, expected " +
                std::to_string(multipliers));
  if (quadrature_nodes < 1)
    throw Error("coupling quadrature needs q >= 1 nodes");
}

SaddleSystem build_saddle(const PartitionGraph& graph) {
  graph.validate();
  SaddleSystem sys;
  sys.subdomain_offsets.push_back(0);
  for (const auto& s : graph.subdomains)
    sys.subdomain_offsets.push_back(sys.subdomain_offsets.back() + s.dof_count);
  sys.primal_size = sys.subdomain_offsets.back();
  sys.interface_offsets.push_back(0);
  for (const auto& spec : graph.interfaces)
    sys.interface_offsets.push_back(sys.interface_offsets.back() + spec.multiplier_count());
  sys.multiplier_size = sys.interface_offsets.back();
  const int n = sys.size();

  Triplets trip;
  sys.rhs = Vector::Zero(n);
  DirichletSet bc;
  for (std::size_t i = 0; i < graph.subdomains.size(); ++i) {
    const auto& s = graph.subdomains[i];
    const int off = sys.subdomain_offsets[i];
    for (int col = 0; col < s.matrix.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(s.matrix, col); it; ++it)
        trip.emplace_back(off + it.row(), off + it.col(), it.value());
    sys.rhs.segment(off, s.dof_count) = s.rhs;
    for (const auto& [dof, value] : s.bc.values())
      bc.add(off + dof, value);
  }

  Triplets btrip;
  for (std::size_t k = 0; k < graph.interfaces.size(); ++k) {
    const auto& spec = graph.interfaces[k];
    const int n_gamma = spec.basis.size();
    const bool via_r_inv = graph.explicit_ortho && spec.basis.orthonormal();
    const MultiplierBasis raw = MultiplierBasis::raw(spec.basis.length(), spec.basis.fourier().n_omega());
    for (const auto& [group, sign] : {std::pair{&spec.minus, -1}, std::pair{&spec.plus, 1}})
      for (const auto& side : *group) {
        const auto& space = *graph.subdomains[side.subdomain].trace_space;
        CouplingMatrix b = via_r_inv
                               ? apply_ortho(assemble_coupling(raw, space, side.edges, graph.quadrature_nodes, sign),
                                             *spec.basis.ortho())
                               : assemble_coupling(spec.basis, space, side.edges, graph.quadrature_nodes, sign);
        const int ns = space.scalar_dof_count();
        const int off = sys.subdomain_offsets[side.subdomain];
        for (int c = 0; c < spec.components; ++c)
          for (int col = 0; col < b.entries.outerSize(); ++col)
            for (SparseMatrix::InnerIterator it(b.entries, col); it; ++it)
              btrip.emplace_back(sys.interface_offsets[k] + c * n_gamma + it.row(), off + c * ns + it.col(),
                                 b.side_sign * it.value());
      }
  }
  sys.coupling.resize(sys.multiplier_size, sys.primal_size);
  sys.coupling.setFromTriplets(btrip.begin(), btrip.end());
  sys.coupling.makeCompressed();
  for (int col = 0; col < sys.coupling.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(sys.coupling, col); it; ++it) {
      trip.emplace_back(sys.primal_size + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), sys.primal_size + it.row(), it.value());
    }
  if (graph.constraint_rhs.size() != 0)
    sys.rhs.tail(sys.multiplier_size) = graph.constraint_rhs;

  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  apply_dirichlet(sys.matrix, sys.rhs, bc);
  sys.matrix.makeCompressed();

  sys.constrained.assign(sys.primal_size, 0);
  for (const auto& [dof, value] : bc.values())
    sys.constrained[dof] = 1;
  return sys;
}

SolutionField solve(const SaddleSystem& system) {
  check_interface_rank(system);

  Eigen::SparseLU<SparseMatrix> lu;
  lu.analyzePattern(system.matrix);
  lu.factorize(system.matrix);
  if (lu.info() != Eigen::Success) {
    std::string where = "unknown block";
    std::istringstream msg(lu.lastErrorMessage());
    std::string word;
    long col = -1;
    while (msg >> word)
      if (word.find_first_not_of("0123456789") == std::string::npos)
        col = std::stol(word) - 1;
    if (col >= 0 && col < system.size()) {
      const auto& perm = lu.colsPermutation().indices();
      for (int i = 0; i < perm.size(); ++i)
        if (perm[i] == col)
          where = block_name(system, i);
    }
    throw Error("singular saddle system: zero pivot in " + where + " (" + lu.lastErrorMessage() + ")");
  }

  SolutionField out;
  out.raw = lu.solve(system.rhs);
  // A few steps of iterative refinement; they matter for ill-conditioned raw multiplier bases.
  for (int it = 0; it < 3; ++it) {
    const Vector d = lu.solve(Vector(system.rhs - system.matrix * out.raw));
    if (!d.allFinite())
      break;
    out.raw += d;
    if (d.lpNorm<Eigen::Infinity>() <= 1e-15 * out.raw.lpNorm<Eigen::Infinity>())
      break;
  }
  const double bnorm = system.rhs.lpNorm<Eigen::Infinity>();
  const double rnorm = (system.matrix * out.raw - system.rhs).lpNorm<Eigen::Infinity>();
  out.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  if (!std::isfinite(out.residual) || out.residual > 1e-9)
    throw Error("saddle solve residual " + std::to_string(out.residual) +
                " exceeds 1e-9 (numerically singular system)");

  for (std::size_t i = 0; i + 1 < system.subdomain_offsets.size(); ++i)
    out.u.push_back(out.raw.segment(system.subdomain_offsets[i],
                                    system.subdomain_offsets[i + 1] - system.subdomain_offsets[i]));
  for (std::size_t k = 0; k + 1 < system.interface_offsets.size(); ++k)
    out.lambda.push_back(out.raw.segment(system.primal_size + system.interface_offsets[k],
                                         system.interface_offsets[k + 1] - system.interface_offsets[k]));
  return out;
}

double jump_residual(const SaddleSystem& system, const Vector& primal) {
  if (primal.size() != system.primal_size)
    throw Error("primal vector size mismatch");
  if (system.multiplier_size == 0)
    return 0.0;
  double bnorm = 0.0;
  Vector rowsum = Vector::Zero(system.multiplier_size);
  for (int col = 0; col < system.coupling.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.coupling, col); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  bnorm = rowsum.maxCoeff();
  const double scale = bnorm * primal.lpNorm<Eigen::Infinity>();
  const double jump = (system.coupling * primal).lpNorm<Eigen::Infinity>();
  return scale > 0.0 ? jump / scale : jump;
}

namespace {

double one_norm(const SparseMatrix& a) {
  double best = 0.0;
  for (int col = 0; col < a.outerSize(); ++col) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it)
      sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

} // namespace

double condition_estimate(const SparseMatrix& matrix, ConditionMethod method) {
  if (matrix.rows() != matrix.cols())
    throw Error("condition number needs a square matrix");
  const int n = static_cast<int>(matrix.rows());
  if (n == 0)
    return 1.0;
  SparseMatrix a = matrix;
  a.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();

  if (method == ConditionMethod::exact || (method == ConditionMethod::automatic && n <= 2000)) {
    double inv_norm = 0.0;
    const int block = 64;
    for (int c0 = 0; c0 < n; c0 += block) {
      const int nb = std::min(block, n - c0);
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, nb);
      for (int j = 0; j < nb; ++j)
        e(c0 + j, j) = 1.0;
      const Eigen::MatrixXd x = lu.solve(e);
      inv_norm = std::max(inv_norm, x.cwiseAbs().colwise().sum().maxCoeff());
    }
    return one_norm(a) * inv_norm;
  }

  // Hager's estimator with Higham's extra test vector.
  Vector x = Vector::Constant(n, 1.0 / n);
  double est = 0.0;
  int last_j = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Vector y = lu.solve(x);
    est = std::max(est, y.lpNorm<1>());
    const Vector xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Vector z = lu.transpose().solve(xi);
    int j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last_j)
      break;
    x.setZero();
    x[j] = 1.0;
    last_j = j;
  }
  Vector b(n);
  for (int i = 0; i < n; ++i)
    b[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i) / std::max(1, n - 1));
  est = std::max(est, 2.0 * Vector(lu.solve(b)).lpNorm<1>() / (3.0 * n));
  return one_norm(a) * est;
}

double condition_estimate(const SaddleSystem& system, ConditionMethod method) {
  return condition_estimate(system.matrix, method);
}

void write_triplets(std::ostream& out, const SaddleSystem& system) {
  out.precision(17);
  for (int col = 0; col < system.matrix.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(system.matrix, col); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace fdd
