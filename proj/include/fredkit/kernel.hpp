#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fredkit/linalg.hpp"
#include "fredkit/measure.hpp"

namespace fredkit {

using BlockFn = std::function<CMatrix(double y, double z)>;
using VectorFn = std::function<CVector(double)>;
using ScalarFn = std::function<cplx(double)>;

/// One term coefficient * right(y) * left(z)^* of a finite-rank kernel.
struct FiniteRankTerm {
  cplx coefficient;
  VectorFn right;
  VectorFn left;
};

/// Matrix-valued kernel N(y, z) with s1 x s2 blocks. Immutable; evaluators
/// must be pure.
class Kernel {
 public:
  enum class Body { ClosedForm, FiniteRank, GridSampled };

  static Kernel closed_form(std::size_t s1, std::size_t s2, BlockFn evaluator, std::string name = "closed_form");
  static Kernel scalar(std::function<cplx(double, double)> evaluator, std::string name = "closed_form");
  static Kernel finite_rank(std::size_t s1, std::size_t s2, std::vector<FiniteRankTerm> terms,
                            std::string name = "finite_rank");
  static Kernel grid_sampled(const QuadratureRule& rule, CMatrix table, std::size_t s1, std::size_t s2);

  Body body() const { return body_; }
  std::size_t rows() const { return s1_; }
  std::size_t cols() const { return s2_; }
  const std::string& name() const { return name_; }

  /// The s1 x s2 block N(y, z). Grid-sampled kernels accept node pairs only.
  CMatrix evaluate(double y, double z) const;
  /// Scalar convenience for 1 x 1 kernels.
  cplx operator()(double y, double z) const;

  const std::vector<FiniteRankTerm>& terms() const { return *terms_; }
  /// Rule a grid-sampled kernel was tabulated on; null for other bodies.
  const QuadratureRule* grid_rule() const { return grid_rule_.get(); }
  const CMatrix& grid_table() const { return *table_; }

 private:
  Kernel() = default;

  Body body_ = Body::ClosedForm;
  std::size_t s1_ = 1;
  std::size_t s2_ = 1;
  std::string name_;
  BlockFn evaluator_;
  std::shared_ptr<const std::vector<FiniteRankTerm>> terms_;
  std::shared_ptr<const QuadratureRule> grid_rule_;
  std::shared_ptr<const CMatrix> table_;
};

/// Probabilists' Hermite polynomial He_j and its normalized form
/// p_j = He_j / sqrt(j!), orthonormal under the standard normal density.
class HermitePolynomial {
 public:
  explicit HermitePolynomial(unsigned degree) : degree_(degree) {}

  unsigned degree() const { return degree_; }
  double value(double x) const;
  double normalized(double x) const;

 private:
  unsigned degree_;
};

/// Mehler kernel phi_C(y,z) / (phi(y) phi(z)) for correlation r, |r| < 1.
Kernel mehler_kernel(double r);

/// Scalar finite-rank kernel sum_j coeffs[j] rights[j](y) conj(lefts[j](z)).
Kernel separable_kernel(const std::vector<cplx>& coeffs, const std::vector<ScalarFn>& rights,
                        const std::vector<ScalarFn>& lefts);

/// Scalar finite-rank kernel sum_ab core(a,b) e_a(y) conj(e_b(z)). The basis
/// must be orthonormal under `rule` to 1e-10; on span{e_a} the operator acts
/// on coordinates as the matrix `core`.
Kernel basis_kernel(const CMatrix& core, const std::vector<ScalarFn>& basis, const QuadratureRule& rule,
                    std::string name = "basis");

/// Finite-rank kernel whose operator is the Jordan block J_m(lam) on span{basis}.
Kernel defective_kernel(cplx lam, std::size_t m, const std::vector<ScalarFn>& basis, const QuadratureRule& rule);

/// Kernel known only at node pairs of `rule`; table is (n s1) x (n s2), node-major.
Kernel grid_kernel(const QuadratureRule& rule, const CMatrix& table);

/// First m orthonormal polynomials of the discrete measure `rule`, built by
/// the Stieltjes procedure. Requires m <= rule.size().
std::vector<ScalarFn> orthonormal_polynomials(const QuadratureRule& rule, std::size_t m);

/// Max |G - I| where G_ab = <e_a, e_b> under `rule`.
double gram_residual(const std::vector<ScalarFn>& basis, const QuadratureRule& rule);

/// Real polynomial sum_k coeffs[k] x^k as a scalar function.
ScalarFn polynomial(std::vector<double> coeffs);

}  // namespace fredkit
