#pragma once

#include <cstddef>
#include <vector>

#include "fredkit/linalg.hpp"
#include "fredkit/nystrom.hpp"
#include "fredkit/spectral.hpp"

namespace fredkit {

/// Solution of p - lambda N p = f at the nodes.
struct ResolventSolve {
  cplx lambda;
  CVector solution;
  /// ||p - lambda A p - f||_W / ||f||_W
  double residual = 0.0;
  /// min |lambda - lambda_j| over Fredholm eigenvalues lambda_j = 1 / nu_j.
  double nearest_eigen_gap = 0.0;
};

enum class DeterminantMethod { Direct, Product };

struct DeterminantEval {
  cplx lambda;
  cplx value;
  DeterminantMethod method = DeterminantMethod::Direct;
};

/// Fredholm eigenvalues 1 / nu_j over the retained nonzero spectrum.
std::vector<cplx> fredholm_eigenvalues(const DiscreteOperator& op);

ResolventSolve resolvent_solve(const DiscreteOperator& op, cplx lambda, const CVector& f);

/// N_lambda = (I - lambda A)^{-1} K at node pairs.
CMatrix resolvent_kernel(const DiscreteOperator& op, cplx lambda);

/// sum_{j <= k} p_j q_j^* / (lambda_j - lambda).
CMatrix resolvent_series(const BiSpectralDecomposition& d, cplx lambda, std::size_t k);

/// f + lambda sum_{j <= k} p_j <q_j, f>_W / (lambda_j - lambda).
CVector second_kind_solve_series(const BiSpectralDecomposition& d, cplx lambda, const CVector& f, std::size_t k);

DeterminantEval fredholm_determinant(const DiscreteOperator& op, cplx lambda,
                                     DeterminantMethod method = DeterminantMethod::Direct);

/// Real zero of D(lambda) bracketed by [lo, hi].
double determinant_zero(const DiscreteOperator& op, double lo, double hi);

/// Max relative deviation between exp(-int_a^lambda trace N_t dt) (trapezoid,
/// `steps` panels) and D(lambda) / D(a) along the real path [a, b].
double determinant_log_derivative_check(const DiscreteOperator& op, double a, double b, unsigned steps);

/// Weighted-orthonormal basis of solutions of lambda_j N p = p.
std::vector<CVector> first_kind_solve(const DiscreteOperator& op, cplx lambda_j, double tol = 1e-6);

}  // namespace fredkit
