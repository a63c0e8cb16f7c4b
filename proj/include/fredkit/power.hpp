#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fredkit/linalg.hpp"
#include "fredkit/nystrom.hpp"

namespace fredkit {

/// Power iteration record. Ratios are <g, A h>_W / <g, h>_W for the
/// normalized iterate h and the fixed probe g = f.
struct PowerTrace {
  std::vector<CVector> iterates;
  std::vector<cplx> ratios;
  /// (A h)_i / h_i at the node where |h| is largest.
  std::vector<cplx> pointwise_ratios;
  bool converged = false;
  cplx estimate = 0.0;
  std::size_t iterations_used = 0;
  std::string warning;
};

PowerTrace power_ratio_estimate(const DiscreteOperator& op, const CVector& f, std::size_t n_max, double tol);

struct VariationalResult {
  double value = 0.0;
  CVector g;
  CVector h;
  /// true for the sup form (nu_1 > 0), false for the inf form.
  bool supremum = true;
};

/// <g, A h>_W
cplx bilinear_form(const DiscreteOperator& op, const CVector& g, const CVector& h);

/// Stationary value of <g, A h>_W subject to <g, h>_W = 1, attained by the
/// dominant bi-orthonormal pair.
VariationalResult variational_estimate(const DiscreteOperator& op);

struct LeadingPair {
  CVector p;
  CVector q;
  double residual = 0.0;
};

/// (A / nu1)^n f and the adjoint iterate of g, normalized so that p has unit
/// weighted norm with a positive anchor and <q, p>_W = 1.
LeadingPair extract_leading_pair(const DiscreteOperator& op, cplx nu1, const CVector& f, const CVector& g,
                                 std::size_t n);

/// K - nu1 p1 q1^*; requires <q1, p1>_W = 1 to 1e-8.
DiscreteOperator deflate(const DiscreteOperator& op, cplx nu1, const CVector& p1, const CVector& q1);
DiscreteOperator deflate(const Kernel& kernel, const QuadratureRule& rule, cplx nu1, const CVector& p1,
                         const CVector& q1);

struct SpectrumStage {
  cplx nu;
  CVector p;
  CVector q;
  std::size_t iterations = 0;
};

struct SequentialSpectrum {
  std::vector<SpectrumStage> stages;
  bool complete = false;
  std::string failure;
};

/// Power iteration, leading-pair refinement and deflation repeated k times.
/// A stage that fails stops the sweep; earlier stages are kept.
SequentialSpectrum sequential_spectrum(const DiscreteOperator& op, std::size_t k, std::size_t n_max, double tol,
                                       unsigned seed = 20240607u);

}  // namespace fredkit
