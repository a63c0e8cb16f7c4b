#pragma once

#include <cstddef>
#include <vector>

#include "fredkit/linalg.hpp"
#include "fredkit/nystrom.hpp"

namespace fredkit {

/// Eigenvalues nu_j with right eigenfunction samples p_j (columns of
/// `right`) and left eigenfunction samples q_j (columns of `left`),
/// bi-orthonormal under the weighted inner product: <q_j, p_k>_W = delta_jk.
///
/// Eigenvalues are ordered by descending modulus, ties by descending phase.
/// The first `retained` pairs have |nu| > 1e-12 |nu_1|; the remaining pairs
/// span the numerical null space and carry no meaningful eigenvectors.
struct BiSpectralDecomposition {
  std::vector<cplx> eigenvalues;
  CMatrix right;
  CMatrix left;
  RVector weights;
  std::size_t retained = 0;
  double biorth_residual = 0.0;
  double condition_estimate = 1.0;
  bool hermitian = false;

  CVector p(std::size_t j) const { return right.col(static_cast<Eigen::Index>(j)); }
  CVector q(std::size_t j) const { return left.col(static_cast<Eigen::Index>(j)); }
};

/// Leading-tier description of a spectrum: r1 = |nu_1|, the R eigenvalues on
/// that modulus (with phases), and the next modulus r0.
struct AsymptoticProfile {
  double r1 = 0.0;
  double r0 = 0.0;
  std::size_t R = 1;
  std::size_t M = 1;
  std::vector<double> phases;
  CMatrix top_right;
  CMatrix top_left;
  /// sum over retained j > R of ||p_j||_W ||q_j||_W.
  double tail_scale = 0.0;

  /// C_n = sum_{j <= R} e^{i n theta_j} p_j q_j^* at node pairs.
  CMatrix coefficient(unsigned n) const;
};

struct PowerApproximation {
  CMatrix approx;
  double error_bound = 0.0;
};

/// Spectral decomposition of a Hermitian kernel (Mercer form): real
/// eigenvalues, Q = P, weighted orthonormal eigenfunctions.
BiSpectralDecomposition hermitian_eig(const DiscreteOperator& op);

/// Bi-orthogonal eigendecomposition of a kernel with diagonal Jordan form.
/// Throws DefectiveSuspected when the eigenvector basis is numerically
/// singular (condition estimate above 1e8 or coalescing eigenvectors).
BiSpectralDecomposition djf_eig(const DiscreteOperator& op);

AsymptoticProfile asymptotic_profile(const BiSpectralDecomposition& d, double cluster_tol = 1e-8);

/// r1^n C_n together with the bound r0^n * tail_scale on its distance to the
/// iterated kernel N_n in the discrete L2(mu x mu) norm.
PowerApproximation power_approx(const BiSpectralDecomposition& d, const AsymptoticProfile& profile, unsigned n);

/// sum_{j <= k} nu_j p_j q_j^* at node pairs.
CMatrix reconstruct(const BiSpectralDecomposition& d, std::size_t k);

/// sum_j nu_j^n p_j <q_j, f>_W over the retained pairs.
CVector expansion_apply(const BiSpectralDecomposition& d, unsigned n, const CVector& f);

}  // namespace fredkit
