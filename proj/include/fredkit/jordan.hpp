#pragma once

#include <cstddef>
#include <vector>

#include "fredkit/kernel.hpp"
#include "fredkit/linalg.hpp"
#include "fredkit/nystrom.hpp"

namespace fredkit {

struct JordanBlock {
  cplx lambda;
  std::size_t m = 1;

  bool operator==(const JordanBlock&) const = default;
};

/// N = P J Q^* with Q^* P = I. Columns of P (and Q) are grouped per block,
/// chain order p_1 (eigenvector) .. p_m.
struct JordanForm {
  std::vector<JordanBlock> blocks;
  CMatrix P;
  CMatrix Q;
  std::vector<double> residuals;

  /// First column of block b.
  std::size_t offset(std::size_t b) const;
  CMatrix J() const;
};

/// lam on the diagonal, ones on the superdiagonal.
CMatrix jordan_block(cplx lam, std::size_t m);

/// J_m(lam)^n by the binomial expansion sum_a C(n,a) lam^{n-a} U^a.
CMatrix jordan_block_power(cplx lam, std::size_t m, unsigned n);

/// Numerical Jordan form of a dense matrix (s <= 64). Eigenvalues closer than
/// cluster_tol * rho are merged; pairs in (delta, 10 delta] are ambiguous and
/// raise ClusteringError. Block structure comes from singular-value rank
/// decisions on powers of (T - lam I) restricted to each cluster's Schur block.
JordanForm jordan_decompose(const CMatrix& N, double cluster_tol = 1e-7);

/// Jordan form of the Nystrom matrix A, computed on the similar matrix B and
/// mapped back: P holds right chain samples, Q satisfies Q^* P = I.
JordanForm jordan_decompose(const DiscreteOperator& op, double cluster_tol = 1e-7);

/// P J^n Q^*.
CMatrix matrix_power_via_jordan(const JordanForm& jf, unsigned n);

struct DefectiveAsymptotic {
  CMatrix leading;
  double envelope = 0.0;
  std::size_t M = 1;
  double r1 = 0.0;
};

/// N^n ~ C(n, M-1) r1^{n-M+1} D_n with D_n summed over top-tier blocks of the
/// maximal size M. Distinct top-tier eigenvalues sharing a maximal size M >= 2
/// raise UnsupportedProfile.
DefectiveAsymptotic defective_asymptotic(const JordanForm& jf, unsigned n, double cluster_tol = 1e-8);

/// Finite-rank kernel acting as the block-diagonal Jordan matrix on span(basis).
Kernel lift_to_kernel(const std::vector<JordanBlock>& blocks, const std::vector<ScalarFn>& basis,
                      const QuadratureRule& rule);

}  // namespace fredkit
