#include "fredkit/operator_svd.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

using Index = Eigen::Index;

constexpr double kRankTol = 1e-12;
constexpr double kRefineTol = 1e-4;

Index retained(const OperatorSVD& svd) { return static_cast<Index>(svd.rank_numerical); }

}  // namespace

OperatorSVD operator_svd(const DiscreteOperator& op) {
  const CMatrix& B = op.symmetrized();
  Eigen::JacobiSVD<CMatrix> solver(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  OperatorSVD out;
  out.s1 = op.rows_per_node();
  out.s2 = op.cols_per_node();
  out.left_weights = op.row_weights();
  out.right_weights = op.col_weights();
  const auto& sv = solver.singularValues();
  for (Index j = 0; j < sv.size(); ++j) out.singular_values.push_back(sv[j]);
  out.left = out.left_weights.cwiseSqrt().cwiseInverse().asDiagonal() * solver.matrixU();
  out.right = out.right_weights.cwiseSqrt().cwiseInverse().asDiagonal() * solver.matrixV();

  const double lead = out.singular_values.empty() ? 0.0 : out.singular_values.front();
  while (out.rank_numerical < out.singular_values.size() &&
         out.singular_values[out.rank_numerical] > kRankTol * lead)
    ++out.rank_numerical;

  // One Nystrom step for the well-separated triples cleans samples at nodes with tiny weights.
  const CMatrix& K = op.samples();
  for (Index j = 0; j < retained(out); ++j) {
    const double theta = out.singular_values[static_cast<std::size_t>(j)];
    if (theta < kRefineTol * lead) break;
    const CVector p_old = out.left.col(j);
    const CVector q_old = out.right.col(j);
    out.left.col(j) = K * (out.right_weights.asDiagonal() * q_old) / theta;
    out.right.col(j) = K.adjoint() * (out.left_weights.asDiagonal() * p_old) / theta;
  }
  for (Index j = 0; j < out.left.cols(); ++j) {
    CVector p = out.left.col(j);
    const cplx phase = anchor_phase(p);
    out.left.col(j) = p;
    out.right.col(j) *= phase;
  }
  return out;
}

CMatrix iterated_gram(const OperatorSVD& svd, unsigned n, GramSide side) {
  require(n >= 1, "iterated_gram needs n >= 1");
  const CMatrix& V = side == GramSide::Left ? svd.left : svd.right;
  CMatrix out = CMatrix::Zero(V.rows(), V.rows());
  for (Index j = 0; j < retained(svd); ++j)
    out += std::pow(svd.singular_values[static_cast<std::size_t>(j)], 2.0 * n) * V.col(j) * V.col(j).adjoint();
  return out;
}

CMatrix iterated_gram_with_kernel(const OperatorSVD& svd, unsigned n, GramSide side) {
  const CMatrix& X = side == GramSide::Left ? svd.left : svd.right;
  const CMatrix& Y = side == GramSide::Left ? svd.right : svd.left;
  CMatrix out = CMatrix::Zero(X.rows(), Y.rows());
  for (Index j = 0; j < retained(svd); ++j)
    out += std::pow(svd.singular_values[static_cast<std::size_t>(j)], 2.0 * n + 1.0) * X.col(j) * Y.col(j).adjoint();
  return out;
}

CVector gram_apply(const OperatorSVD& svd, unsigned n, const CVector& f, GramSide side) {
  const CMatrix& V = side == GramSide::Left ? svd.left : svd.right;
  const RVector& w = side == GramSide::Left ? svd.left_weights : svd.right_weights;
  require(f.size() == V.rows(), "gram_apply: vector length does not match the chosen side");
  CVector out = CVector::Zero(f.size());
  for (Index j = 0; j < retained(svd); ++j) {
    const double scale = std::pow(svd.singular_values[static_cast<std::size_t>(j)], 2.0 * n);
    out += scale * weighted_dot(w, V.col(j), f) * V.col(j);
  }
  return out;
}

double trace_power(const OperatorSVD& svd, unsigned n) {
  double sum = 0.0;
  for (double theta : svd.singular_values) sum += std::pow(theta, 2.0 * n + 2.0);
  return sum;
}

double trace_power_direct(const DiscreteOperator& op, unsigned n) {
  const CMatrix& K = op.samples();
  const RVector& wr = op.row_weights();
  const RVector& wc = op.col_weights();
  const CMatrix G = K.adjoint() * wr.asDiagonal() * K;
  CMatrix iterated = G;
  for (unsigned k = 0; k < n; ++k) iterated = (G * wc.asDiagonal() * iterated).eval();
  double sum = 0.0;
  for (Index i = 0; i < iterated.rows(); ++i) sum += wc[i] * iterated(i, i).real();
  return sum;
}

TruncatedSVD svd_truncate(const OperatorSVD& svd, std::size_t M) {
  require(M >= 1 && M <= svd.rank_numerical, "truncation count must be between 1 and the numerical rank");
  TruncatedSVD out;
  out.svd = svd;
  const auto keep = static_cast<Index>(M);
  out.svd.singular_values.resize(M);
  out.svd.left = svd.left.leftCols(keep);
  out.svd.right = svd.right.leftCols(keep);
  out.svd.rank_numerical = M;
  out.tail_bound = M < svd.singular_values.size() ? svd.singular_values[M] : 0.0;
  return out;
}

}  // namespace fredkit
