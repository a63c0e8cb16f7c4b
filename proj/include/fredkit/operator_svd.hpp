#pragma once

#include <cstddef>
#include <vector>

#include "fredkit/linalg.hpp"
#include "fredkit/nystrom.hpp"

namespace fredkit {

enum class GramSide { Left, Right };

/// N = sum_j theta_j p_j q_j^* with p (left) and q (right) weighted-orthonormal.
struct OperatorSVD {
  std::vector<double> singular_values;
  CMatrix left;
  CMatrix right;
  RVector left_weights;
  RVector right_weights;
  std::size_t s1 = 1;
  std::size_t s2 = 1;
  std::size_t rank_numerical = 0;

  CVector p(std::size_t j) const { return left.col(static_cast<Eigen::Index>(j)); }
  CVector q(std::size_t j) const { return right.col(static_cast<Eigen::Index>(j)); }
};

OperatorSVD operator_svd(const DiscreteOperator& op);

/// (N N^*)^n kernel (Left) or (N^* N)^n kernel (Right) at node pairs, n >= 1.
CMatrix iterated_gram(const OperatorSVD& svd, unsigned n, GramSide side);

/// sum theta^{2n+1} p q^* (Left) or sum theta^{2n+1} q p^* (Right); n = 0 gives K or K^*.
CMatrix iterated_gram_with_kernel(const OperatorSVD& svd, unsigned n, GramSide side);

/// sum theta^{2n} p_j <p_j, f>_W over the retained triples (q-side for Right).
/// For n = 0 this is the projection onto the retained singular subspace.
CVector gram_apply(const OperatorSVD& svd, unsigned n, const CVector& f, GramSide side);

/// sum_j theta_j^{2n+2}.
double trace_power(const OperatorSVD& svd, unsigned n);

/// Quadrature of the diagonal of the directly iterated (N^* N)^{n+1} kernel.
double trace_power_direct(const DiscreteOperator& op, unsigned n);

struct TruncatedSVD {
  OperatorSVD svd;
  double tail_bound = 0.0;
};

/// Keeps the leading M triples; tail_bound = theta_{M+1} (0 when none remain).
TruncatedSVD svd_truncate(const OperatorSVD& svd, std::size_t M);

}  // namespace fredkit
