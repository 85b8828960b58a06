// SPDX-License-Identifier: Apache-2.0
#include "fdd/multiplier.hpp"

#include "fdd/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fdd {

using Quad = boost::multiprecision::float128;

FourierBasis::FourierBasis(double length, int n_omega) : length_(length), n_omega_(n_omega) {
  if (!(length > 0.0))
    throw Error("Fourier basis needs a positive interface length");
  if (n_omega < 0)
    throw Error("Fourier basis needs n_omega >= 0");
}

namespace {

void check_arc_length(double s, double length) {
  const double tol = 1e-12 * std::max(1.0, length);
  if (s < -tol || s > length + tol)
    throw Error("arc length " + std::to_string(s) + " outside [0, " + std::to_string(length) + "]");
}

} // namespace

double FourierBasis::eval(int index, double s) const {
  if (index < 1 || index > size())
    throw Error("Fourier basis index " + std::to_string(index) + " outside [1, " +
                std::to_string(size()) + "]");
  check_arc_length(s, length_);
  if (index == 1)
    return 1.0;
  const int i = index / 2;
  const double arg = frequency(i) * std::numbers::pi * s;
  return index % 2 == 0 ? std::sin(arg) : std::cos(arg);
}

void FourierBasis::eval_all(double s, std::span<double> out) const {
  if (static_cast<int>(out.size()) < size())
    throw Error("output span too small for Fourier basis values");
  check_arc_length(s, length_);
  out[0] = 1.0;
  for (int i = 1; i <= n_omega_; ++i) {
    const double arg = frequency(i) * std::numbers::pi * s;
    out[2 * i - 1] = std::sin(arg);
    out[2 * i] = std::cos(arg);
  }
}

struct OrthoMap::Extended {
  int n = 0;
  std::vector<Quad> r_inv; // column-major, upper triangular
};

namespace {

void eval_all_extended(const FourierBasis& basis, double s, std::vector<Quad>& out) {
  const Quad pi = boost::math::constants::pi<Quad>();
  const Quad theta = pi * Quad(s) / Quad(basis.length());
  out.resize(basis.size());
  out[0] = 1;
  for (int i = 1; i <= basis.n_omega(); ++i) {
    const Quad arg = theta * i;
    out[2 * i - 1] = boost::multiprecision::sin(arg);
    out[2 * i] = boost::multiprecision::cos(arg);
  }
}

struct Samples {
  std::vector<double> points;
  // C V is formed row by row: row k = diag[k] * V_k + upper[k] * V_{k+1}.
  std::vector<Quad> diag;
  std::vector<Quad> upper;
};

Samples gauss_samples(double length, int count) {
  int per_panel = 1;
  for (int k = std::min(16, count); k >= 1; --k)
    if (count % k == 0) {
      per_panel = k;
      break;
    }
  const int panels = count / per_panel;
  const GaussRule g = gauss_legendre(per_panel);
  Samples s;
  for (int p = 0; p < panels; ++p) {
    const double a = length * p / panels, b = length * (p + 1) / panels;
    for (int k = 0; k < per_panel; ++k) {
      s.points.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[k]);
      s.diag.push_back(boost::multiprecision::sqrt(Quad(0.5 * (b - a) * g.weights[k])));
      s.upper.push_back(0);
    }
  }
  return s;
}

Samples piecewise_linear_samples(double length, int count) {
  Samples s;
  const Quad h = Quad(length) / (count - 1);
  for (int k = 0; k < count; ++k)
    s.points.push_back(k == count - 1 ? length : length * k / (count - 1));
  // Tridiagonal hat-function mass: diagonal 2h/3 (h/3 at the ends), off-diagonal h/6.
  // M = L L^T with L lower bidiagonal; C = L^T.
  s.diag.resize(count);
  s.upper.assign(count, 0);
  Quad prev_off = 0;
  for (int k = 0; k < count; ++k) {
    const Quad d = (k == 0 || k == count - 1) ? h / 3 : 2 * h / 3;
    const Quad lkk = boost::multiprecision::sqrt(d - prev_off * prev_off);
    s.diag[k] = lkk;
    if (k + 1 < count) {
      prev_off = (h / 6) / lkk;
      s.upper[k] = prev_off;
    }
  }
  return s;
}

} // namespace

OrthoMap build_ortho_map(const FourierBasis& basis, const OrthoOptions& options) {
  const int n = basis.size();
  const int ns = options.sample_count;
  if (ns <= n)
    throw Error("orthonormalisation needs more samples (" + std::to_string(ns) +
                ") than basis functions (" + std::to_string(n) + ")");

  const Samples samples = options.mass == SampleMass::gauss_legendre
                              ? gauss_samples(basis.length(), ns)
                              : piecewise_linear_samples(basis.length(), ns);

  // A = C V, column-major ns x n.
  std::vector<Quad> v(static_cast<std::size_t>(ns) * n);
  std::vector<Quad> row;
  for (int k = 0; k < ns; ++k) {
    eval_all_extended(basis, samples.points[k], row);
    for (int j = 0; j < n; ++j)
      v[static_cast<std::size_t>(j) * ns + k] = row[j];
  }
  std::vector<Quad> a(v.size());
  for (int j = 0; j < n; ++j) {
    const Quad* vj = &v[static_cast<std::size_t>(j) * ns];
    Quad* aj = &a[static_cast<std::size_t>(j) * ns];
    for (int k = 0; k < ns; ++k)
      aj[k] = samples.diag[k] * vj[k] + (k + 1 < ns ? samples.upper[k] * vj[k + 1] : Quad(0));
  }

  // Householder QR; only R is kept.
  auto at = [&](int i, int j) -> Quad& { return a[static_cast<std::size_t>(j) * ns + i]; };
  std::vector<Quad> hv(ns);
  for (int k = 0; k < n; ++k) {
    Quad norm2 = 0;
    for (int i = k; i < ns; ++i)
      norm2 += at(i, k) * at(i, k);
    const Quad nrm = boost::multiprecision::sqrt(norm2);
    if (nrm == 0)
      throw Error("sampled Fourier basis is rank deficient at column " + std::to_string(k + 1));
    const Quad alpha = at(k, k) > 0 ? -nrm : nrm;
    for (int i = k; i < ns; ++i)
      hv[i] = at(i, k);
    hv[k] -= alpha;
    Quad vnorm2 = 0;
    for (int i = k; i < ns; ++i)
      vnorm2 += hv[i] * hv[i];
    for (int j = k; j < n; ++j) {
      Quad proj = 0;
      for (int i = k; i < ns; ++i)
        proj += hv[i] * at(i, j);
      const Quad f = 2 * proj / vnorm2;
      for (int i = k; i < ns; ++i)
        at(i, j) -= f * hv[i];
    }
  }

  // R with positive diagonal.
  std::vector<Quad> r(static_cast<std::size_t>(n) * n, Quad(0));
  Quad rmax = 0;
  for (int i = 0; i < n; ++i) {
    const Quad sign = at(i, i) < 0 ? Quad(-1) : Quad(1);
    for (int j = i; j < n; ++j)
      r[static_cast<std::size_t>(j) * n + i] = sign * at(i, j);
    rmax = std::max(rmax, boost::multiprecision::abs(at(i, i)));
  }
  for (int i = 0; i < n; ++i)
    if (r[static_cast<std::size_t>(i) * n + i] <= rmax * Quad(1e-30))
      throw Error("sampled Fourier basis is numerically rank deficient (n_gamma = " +
                  std::to_string(n) + ", samples = " + std::to_string(ns) + ")");

  // R^{-1} by column-wise back substitution.
  auto ext = std::make_shared<OrthoMap::Extended>();
  ext->n = n;
  ext->r_inv.assign(static_cast<std::size_t>(n) * n, Quad(0));
  auto rr = [&](int i, int j) { return r[static_cast<std::size_t>(j) * n + i]; };
  for (int col = 0; col < n; ++col) {
    Quad* x = &ext->r_inv[static_cast<std::size_t>(col) * n];
    for (int i = col; i >= 0; --i) {
      Quad sum = i == col ? Quad(1) : Quad(0);
      for (int j = i + 1; j <= col; ++j)
        sum -= rr(i, j) * x[j];
      x[i] = sum / rr(i, i);
    }
  }

  OrthoMap map;
  map.sample_count_ = ns;
  map.r_inv_.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      map.r_inv_(i, j) = static_cast<double>(ext->r_inv[static_cast<std::size_t>(j) * n + i]);
  map.extended_ = std::move(ext);
  return map;
}

void OrthoMap::eval_all(const FourierBasis& basis, double s, std::span<double> out) const {
  const int n = extended_->n;
  if (basis.size() != n)
    throw Error("orthonormalisation map does not match the basis size");
  if (static_cast<int>(out.size()) < n)
    throw Error("output span too small for orthonormal basis values");
  check_arc_length(s, basis.length());
  thread_local std::vector<Quad> xi;
  eval_all_extended(basis, s, xi);
  for (int i = 0; i < n; ++i) {
    const Quad* col = &extended_->r_inv[static_cast<std::size_t>(i) * n];
    Quad sum = 0;
    for (int j = 0; j <= i; ++j)
      sum += xi[j] * col[j];
    out[i] = static_cast<double>(sum);
  }
}

MultiplierBasis MultiplierBasis::raw(double length, int n_omega) {
  return MultiplierBasis(FourierBasis(length, n_omega));
}

MultiplierBasis MultiplierBasis::orthonormal(double length, int n_omega,
                                             const OrthoOptions& options) {
  MultiplierBasis b(FourierBasis(length, n_omega));
  b.ortho_ = build_ortho_map(b.fourier_, options);
  return b;
}

void MultiplierBasis::eval_all(double s, std::span<double> out) const {
  if (ortho_)
    ortho_->eval_all(fourier_, s, out);
  else
    fourier_.eval_all(s, out);
}

std::vector<double> MultiplierBasis::eval_all(double s) const {
  std::vector<double> out(size());
  eval_all(s, out);
  return out;
}

CouplingMatrix assemble_coupling(const MultiplierBasis& basis, const FunctionSpace& space,
                                 const std::vector<InterfaceEdge>& partition, int q,
                                 int side_sign) {
  if (q < 1)
    throw Error("coupling quadrature needs q >= 1 nodes");
  if (side_sign != 1 && side_sign != -1)
    throw Error("coupling side sign must be +1 or -1");
  const GaussRule g = gauss_legendre(q);
  const int n = basis.size();
  std::vector<double> xi(n);

  Triplets trip;
  trip.reserve(partition.size() * q * n * 3);
  for (const auto& e : partition) {
    const auto dofs = space.edge_dofs(e.vertices[0], e.vertices[1]);
    const double det = 0.5 * (e.s1 - e.s0); // |det J| of the map onto (-1, 1)
    for (int k = 0; k < q; ++k) {
      const double t = 0.5 * (g.nodes[k] + 1.0);
      basis.eval_all(e.s0 + t * (e.s1 - e.s0), xi);
      const auto phi = edge_basis(space.degree(), t);
      for (std::size_t d = 0; d < dofs.size(); ++d)
        for (int m = 0; m < n; ++m)
          trip.emplace_back(m, dofs[d], det * g.weights[k] * phi[d] * xi[m]);
    }
  }
  CouplingMatrix b;
  b.side_sign = side_sign;
  b.entries.resize(n, space.scalar_dof_count());
  b.entries.setFromTriplets(trip.begin(), trip.end());
  b.entries.makeCompressed();
  return b;
}

CouplingMatrix apply_ortho(const CouplingMatrix& b, const OrthoMap& map) {
  if (b.entries.rows() != map.size())
    throw Error("coupling matrix has " + std::to_string(b.entries.rows()) +
                " rows but the orthonormalisation map has size " + std::to_string(map.size()));
  CouplingMatrix out;
  out.side_sign = b.side_sign;
  const Eigen::MatrixXd dense = map.r_inv().transpose() * Eigen::MatrixXd(b.entries);
  out.entries = dense.sparseView(0.0, 0.0);
  out.entries.makeCompressed();
  return out;
}

Eigen::MatrixXd multiplier_gram(const MultiplierBasis& basis, int panels, int nodes) {
  const GaussRule g = gauss_legendre(nodes);
  const int n = basis.size();
  const double length = basis.length();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd xi(n);
  for (int p = 0; p < panels; ++p) {
    const double a = length * p / panels, b = length * (p + 1) / panels;
    for (int k = 0; k < nodes; ++k) {
      basis.eval_all(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[k], {xi.data(), std::size_t(n)});
      gram.noalias() += (0.5 * (b - a) * g.weights[k]) * xi * xi.transpose();
    }
  }
  return gram;
}

SparseMatrix assemble_trace_mass(const FunctionSpace& space,
                                 const std::vector<InterfaceEdge>& partition) {
  Triplets trip;
  for (const auto& e : partition) {
    const auto dofs = space.edge_dofs(e.vertices[0], e.vertices[1]);
    const Eigen::MatrixXd m = interval_mass(space.degree(), e.s1 - e.s0);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j)
        trip.emplace_back(dofs[i], dofs[j], m(i, j));
  }
  SparseMatrix mass(space.scalar_dof_count(), space.scalar_dof_count());
  mass.setFromTriplets(trip.begin(), trip.end());
  mass.makeCompressed();
  return mass;
}

} // namespace fdd
