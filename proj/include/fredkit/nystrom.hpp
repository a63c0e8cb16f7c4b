#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fredkit/kernel.hpp"
#include "fredkit/linalg.hpp"
#include "fredkit/measure.hpp"

namespace fredkit {

/// Nystrom discretization of (N, mu). Storage is node-major: entry
/// (i*s1 + a, j*s2 + b) holds N(x_i, x_j)[a, b], scaled by w_j in A and by
/// sqrt(w_i w_j) in B.
class DiscreteOperator {
 public:
  /// Builds A and B from raw samples K. Used by discretize() and by
  /// operations that modify a kernel table directly (deflation).
  static DiscreteOperator from_samples(const QuadratureRule& rule, std::size_t s1, std::size_t s2, CMatrix samples);

  const QuadratureRule& rule() const { return rule_; }
  std::size_t rows_per_node() const { return s1_; }
  std::size_t cols_per_node() const { return s2_; }
  bool square_blocks() const { return s1_ == s2_; }

  const CMatrix& samples() const { return K_; }
  const CMatrix& nystrom() const { return A_; }
  const CMatrix& symmetrized() const { return B_; }

  /// Weights expanded over block rows (length n s1) and block columns (n s2).
  const RVector& row_weights() const { return w_row_; }
  const RVector& col_weights() const { return w_col_; }

  /// Quadrature of ||N||^2 over mu x mu.
  double hilbert_schmidt_norm_squared() const;

  /// Diagnostics raised during construction (e.g. the zero-kernel warning).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  DiscreteOperator(const QuadratureRule& rule) : rule_(rule) {}

  QuadratureRule rule_;
  std::size_t s1_ = 1;
  std::size_t s2_ = 1;
  CMatrix K_;
  CMatrix A_;
  CMatrix B_;
  RVector w_row_;
  RVector w_col_;
  std::vector<std::string> warnings_;
};

DiscreteOperator discretize(const Kernel& kernel, const QuadratureRule& rule);

/// A f: Nystrom approximation of (N f)(x_i).
CVector apply(const DiscreteOperator& op, const CVector& f);

/// (W K)^* p: node samples of the adjoint operator applied to p.
CVector apply_adjoint(const DiscreteOperator& op, const CVector& p);

/// Node samples of N_n = N^{n-1} N, i.e. A^{n-1} K.
CMatrix iterated_kernel(const DiscreteOperator& op, unsigned n);

/// Nystrom interpolant nu^{-1} sum_i N(y, x_i) w_i p(x_i) of an eigenfunction.
CVector nystrom_extend(const Kernel& kernel, const QuadratureRule& rule, const CVector& eig_samples, cplx nu,
                       double y);

/// Eigenvalues of the discretized operator, computed on the symmetrized
/// (similar) matrix B, ordered by descending modulus.
std::vector<cplx> operator_eigenvalues(const DiscreteOperator& op);

}  // namespace fredkit
