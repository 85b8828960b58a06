// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fdd/fem.hpp"
#include "fdd/mesh.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace fdd {

/// Half-range Fourier basis on an interface of length L:
/// xi_1 = 1, xi_{2i} = sin(i pi s / L), xi_{2i+1} = cos(i pi s / L), i = 1..n_omega.
class FourierBasis {
public:
  FourierBasis(double length, int n_omega);

  double length() const { return length_; }
  int n_omega() const { return n_omega_; }
  int size() const { return 2 * n_omega_ + 1; }
  double frequency(int i) const { return i / length_; }

  /// xi_index(s) with 1-based index.
  double eval(int index, double s) const;
  /// All basis values at s, in index order.
  void eval_all(double s, std::span<double> out) const;

private:
  double length_;
  int n_omega_;
};

enum class SampleMass {
  gauss_legendre,   // composite Gauss nodes, diagonal mass of the quadrature weights
  piecewise_linear, // uniform nodes, mass matrix of piecewise-linear hat functions
};

struct OrthoOptions {
  int sample_count = 2000;
  SampleMass mass = SampleMass::gauss_legendre;
};

/// Upper-triangular change of basis R^{-1} making the Fourier basis L2(0, L)-orthonormal.
///
/// Built from the Cholesky factor C of the sample mass matrix and the thin QR
/// factorisation C V = Q R of the sampled basis. The factorisation runs in
/// binary128 because the half-range basis is numerically dependent in double
/// precision once n_Gamma exceeds about 25.
class OrthoMap {
public:
  int size() const { return static_cast<int>(r_inv_.rows()); }
  int sample_count() const { return sample_count_; }
  const Eigen::MatrixXd& r_inv() const { return r_inv_; }

  /// Orthonormalised basis xi^GS_i(s) = sum_j xi_j(s) R^{-1}_{ji}, evaluated in extended precision.
  void eval_all(const FourierBasis& basis, double s, std::span<double> out) const;

private:
  friend OrthoMap build_ortho_map(const FourierBasis&, const OrthoOptions&);
  struct Extended;

  Eigen::MatrixXd r_inv_;
  int sample_count_ = 0;
  std::shared_ptr<const Extended> extended_;
};

OrthoMap build_ortho_map(const FourierBasis& basis, const OrthoOptions& options = {});

/// Multiplier basis of one interface: raw Fourier or orthonormalised.
class MultiplierBasis {
public:
  static MultiplierBasis raw(double length, int n_omega);
  static MultiplierBasis orthonormal(double length, int n_omega, const OrthoOptions& options = {});

  const FourierBasis& fourier() const { return fourier_; }
  const std::optional<OrthoMap>& ortho() const { return ortho_; }
  bool orthonormal() const { return ortho_.has_value(); }
  int size() const { return fourier_.size(); }
  double length() const { return fourier_.length(); }

  void eval_all(double s, std::span<double> out) const;
  std::vector<double> eval_all(double s) const;

private:
  explicit MultiplierBasis(FourierBasis f) : fourier_(f) {}
  FourierBasis fourier_;
  std::optional<OrthoMap> ortho_;
};

/// Coupling block of one subdomain on one interface: (B)_{mn} = int_Gamma phi_n xi_m ds.
/// Columns index the scalar dofs of the subdomain space.
struct CouplingMatrix {
  SparseMatrix entries;
  int side_sign = 1;
};

/// Composite q-point Gauss quadrature over the edge partition induced by the subdomain mesh.
CouplingMatrix assemble_coupling(const MultiplierBasis& basis, const FunctionSpace& space,
                                 const std::vector<InterfaceEdge>& partition, int q,
                                 int side_sign = 1);

/// R^{-T} B.
CouplingMatrix apply_ortho(const CouplingMatrix& b, const OrthoMap& map);

/// L2(0, L) Gram matrix of the basis by composite Gauss quadrature.
Eigen::MatrixXd multiplier_gram(const MultiplierBasis& basis, int panels = 64, int nodes = 16);

/// L2(Gamma) mass matrix of the traces on `partition`, indexed by scalar dofs of `space`.
SparseMatrix assemble_trace_mass(const FunctionSpace& space,
                                 const std::vector<InterfaceEdge>& partition);

} // namespace fdd
