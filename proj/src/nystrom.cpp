#include "fredkit/nystrom.hpp"

#include <cmath>
#include <sstream>

#include "fredkit/error.hpp"

namespace fredkit {

DiscreteOperator DiscreteOperator::from_samples(const QuadratureRule& rule, std::size_t s1, std::size_t s2,
                                                CMatrix samples) {
  const auto n = rule.size();
  require(static_cast<std::size_t>(samples.rows()) == n * s1 && static_cast<std::size_t>(samples.cols()) == n * s2,
          "sample table does not match rule size times block shape");
  DiscreteOperator op(rule);
  op.s1_ = s1;
  op.s2_ = s2;
  op.w_row_ = rule.weight_vector(s1);
  op.w_col_ = rule.weight_vector(s2);
  op.K_ = std::move(samples);
  op.A_ = op.K_ * op.w_col_.asDiagonal();
  op.B_ = scale_rows_cols(op.K_, op.w_row_.cwiseSqrt(), op.w_col_.cwiseSqrt());
  if (!(op.hilbert_schmidt_norm_squared() > 0.0))
    op.warnings_.push_back("kernel is trivial: ||N||_2^2 = 0 on this rule");
  return op;
}

double DiscreteOperator::hilbert_schmidt_norm_squared() const { return B_.squaredNorm(); }

DiscreteOperator discretize(const Kernel& kernel, const QuadratureRule& rule) {
  const auto n = rule.size();
  const auto s1 = kernel.rows();
  const auto s2 = kernel.cols();
  if (kernel.body() == Kernel::Body::GridSampled) {
    require(kernel.grid_rule() != nullptr && *kernel.grid_rule() == rule,
            "grid-sampled kernel must be discretized on the rule it was tabulated on");
    return DiscreteOperator::from_samples(rule, s1, s2, kernel.grid_table());
  }
  CMatrix K(static_cast<Eigen::Index>(n * s1), static_cast<Eigen::Index>(n * s2));
  const auto& x = rule.nodes();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CMatrix block;
      try {
        block = kernel.evaluate(x[i], x[j]);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "kernel evaluation failed at node pair (" << i << ", " << j << ") = (" << x[i] << ", " << x[j]
            << "): " << e.what();
        fail(ErrorKind::EvaluationError, msg.str());
      }
      if (!block.allFinite()) {
        std::ostringstream msg;
        msg << "kernel value is not finite at node pair (" << i << ", " << j << ") = (" << x[i] << ", " << x[j]
            << ")";
        fail(ErrorKind::EvaluationError, msg.str());
      }
      K.block(static_cast<Eigen::Index>(i * s1), static_cast<Eigen::Index>(j * s2), static_cast<Eigen::Index>(s1),
              static_cast<Eigen::Index>(s2)) = block;
    }
  }
  return DiscreteOperator::from_samples(rule, s1, s2, std::move(K));
}

CVector apply(const DiscreteOperator& op, const CVector& f) {
  require(f.size() == op.nystrom().cols(), "apply: vector length must be n*s2");
  return op.nystrom() * f;
}

CVector apply_adjoint(const DiscreteOperator& op, const CVector& p) {
  require(p.size() == op.samples().rows(), "apply_adjoint: vector length must be n*s1");
  return op.samples().adjoint() * (op.row_weights().asDiagonal() * p);
}

CMatrix iterated_kernel(const DiscreteOperator& op, unsigned n) {
  require(op.square_blocks(), "iterated kernel needs square blocks");
  require(n >= 1, "iterate index must be at least 1");
  CMatrix result = op.samples();
  for (unsigned k = 1; k < n; ++k) result = op.nystrom() * result;
  return result;
}

CVector nystrom_extend(const Kernel& kernel, const QuadratureRule& rule, const CVector& eig_samples, cplx nu,
                       double y) {
  if (nu == 0.0) fail(ErrorKind::DivisionByZero, "nystrom_extend needs a nonzero eigenvalue");
  if (kernel.body() == Kernel::Body::GridSampled)
    fail(ErrorKind::Unsupported, "grid-sampled kernels cannot be evaluated off the grid");
  const auto s1 = static_cast<Eigen::Index>(kernel.rows());
  const auto s2 = static_cast<Eigen::Index>(kernel.cols());
  require(static_cast<std::size_t>(eig_samples.size()) == rule.size() * kernel.cols(),
          "eigenfunction samples must have length n*s2");
  CVector acc = CVector::Zero(s1);
  for (std::size_t i = 0; i < rule.size(); ++i)
    acc += rule.weights()[i] * kernel.evaluate(y, rule.nodes()[i]) *
           eig_samples.segment(static_cast<Eigen::Index>(i) * s2, s2);
  return acc / nu;
}

std::vector<cplx> operator_eigenvalues(const DiscreteOperator& op) {
  require(op.square_blocks(), "eigenvalues need square blocks");
  std::vector<cplx> values = eigenvalues_of(op.symmetrized());
  std::vector<cplx> ordered;
  for (auto idx : spectral_order(values)) ordered.push_back(values[idx]);
  return ordered;
}

}  // namespace fredkit
