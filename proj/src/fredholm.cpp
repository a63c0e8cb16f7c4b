#include "fredkit/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

using Index = Eigen::Index;

constexpr double kProximityGap = 1e-8;
constexpr double kConditionCap = 1e10;

struct Proximity {
  double gap = std::numeric_limits<double>::infinity();
  double relative = std::numeric_limits<double>::infinity();
  cplx nearest = 0.0;
};

Proximity nearest_eigenvalue(const std::vector<cplx>& lambdas, cplx lambda) {
  Proximity out;
  for (const auto& lj : lambdas) {
    const double gap = std::abs(lambda - lj);
    if (gap < out.gap) {
      out.gap = gap;
      out.nearest = lj;
      out.relative = gap / std::abs(lj);
    }
  }
  return out;
}

[[noreturn]] void report_proximity(ErrorKind kind, cplx lambda, const Proximity& p, const std::string& detail) {
  std::ostringstream msg;
  msg << "lambda = " << lambda << " is too close to the Fredholm eigenvalue " << p.nearest << " (" << detail << ")";
  fail(kind, msg.str());
}

// LU of I - lambda B with the proximity and conditioning guards.
Eigen::PartialPivLU<CMatrix> factor_shifted(const DiscreteOperator& op, cplx lambda, Proximity& prox) {
  require(op.square_blocks(), "resolvent needs square blocks");
  prox = nearest_eigenvalue(fredholm_eigenvalues(op), lambda);
  if (prox.relative <= kProximityGap) {
    std::ostringstream detail;
    detail << "relative gap " << prox.relative;
    report_proximity(ErrorKind::EigenvalueProximity, lambda, prox, detail.str());
  }
  const CMatrix& B = op.symmetrized();
  const CMatrix M = CMatrix::Identity(B.rows(), B.cols()) - lambda * B;
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double rcond = lu.rcond();
  if (!(rcond * kConditionCap > 1.0)) {
    std::ostringstream detail;
    detail << "condition estimate " << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity());
    report_proximity(ErrorKind::EigenvalueProximity, lambda, prox, detail.str());
  }
  return lu;
}

void check_pole(const BiSpectralDecomposition& d, cplx lambda, std::size_t k) {
  require(k <= d.retained, "series truncation exceeds the retained eigenpair count");
  for (std::size_t j = 0; j < k; ++j) {
    const cplx lj = 1.0 / d.eigenvalues[j];
    if (std::abs(lambda - lj) <= kProximityGap * std::abs(lj)) {
      std::ostringstream msg;
      msg << "lambda = " << lambda << " coincides with the Fredholm eigenvalue " << lj;
      fail(ErrorKind::Pole, msg.str());
    }
  }
}

// trace of (I - t B)^{-1} B, the quadrature of N_t(x, x).
cplx resolvent_trace(const CMatrix& B, double t) {
  const CMatrix M = CMatrix::Identity(B.rows(), B.cols()) - t * B;
  return Eigen::PartialPivLU<CMatrix>(M).solve(B).trace();
}

}  // namespace

std::vector<cplx> fredholm_eigenvalues(const DiscreteOperator& op) {
  const auto nu = operator_eigenvalues(op);
  std::vector<cplx> out;
  if (nu.empty() || std::abs(nu.front()) == 0.0) return out;
  for (const auto& v : nu)
    if (std::abs(v) > 1e-12 * std::abs(nu.front())) out.push_back(1.0 / v);
  return out;
}

ResolventSolve resolvent_solve(const DiscreteOperator& op, cplx lambda, const CVector& f) {
  require(f.size() == op.nystrom().cols(), "right-hand side length does not match the operator");
  Proximity prox;
  const auto lu = factor_shifted(op, lambda, prox);
  const RVector& w = op.row_weights();
  const RVector sqrt_w = w.cwiseSqrt();
  const CVector y = lu.solve(sqrt_w.asDiagonal() * f);
  CVector p = sqrt_w.cwiseInverse().asDiagonal() * y;
  p = f + lambda * (op.nystrom() * p);

  ResolventSolve out;
  out.lambda = lambda;
  out.solution = p;
  out.nearest_eigen_gap = prox.gap;
  const double fnorm = weighted_norm(w, f);
  const CVector r = p - lambda * (op.nystrom() * p) - f;
  out.residual = fnorm > 0.0 ? weighted_norm(w, r) / fnorm : weighted_norm(w, r);
  return out;
}

CMatrix resolvent_kernel(const DiscreteOperator& op, cplx lambda) {
  Proximity prox;
  const auto lu = factor_shifted(op, lambda, prox);
  const RVector inv_sqrt_w = op.row_weights().cwiseSqrt().cwiseInverse();
  const CMatrix M = lu.solve(op.symmetrized());
  return inv_sqrt_w.asDiagonal() * M * inv_sqrt_w.asDiagonal();
}

CMatrix resolvent_series(const BiSpectralDecomposition& d, cplx lambda, std::size_t k) {
  check_pole(d, lambda, k);
  CMatrix out = CMatrix::Zero(d.right.rows(), d.left.rows());
  for (std::size_t j = 0; j < k; ++j) out += d.p(j) * d.q(j).adjoint() / (1.0 / d.eigenvalues[j] - lambda);
  return out;
}

CVector second_kind_solve_series(const BiSpectralDecomposition& d, cplx lambda, const CVector& f, std::size_t k) {
  require(f.size() == d.right.rows(), "right-hand side length does not match the decomposition");
  check_pole(d, lambda, k);
  CVector out = f;
  for (std::size_t j = 0; j < k; ++j)
    out += lambda * d.p(j) * weighted_dot(d.weights, d.q(j), f) / (1.0 / d.eigenvalues[j] - lambda);
  return out;
}

DeterminantEval fredholm_determinant(const DiscreteOperator& op, cplx lambda, DeterminantMethod method) {
  require(op.square_blocks(), "the determinant needs square blocks");
  DeterminantEval out;
  out.lambda = lambda;
  out.method = method;
  if (method == DeterminantMethod::Direct) {
    const CMatrix& B = op.symmetrized();
    out.value = Eigen::PartialPivLU<CMatrix>(CMatrix::Identity(B.rows(), B.cols()) - lambda * B).determinant();
    return out;
  }
  out.value = 1.0;
  for (const auto& nu : operator_eigenvalues(op)) {
    if (std::abs(lambda * nu) < 1e-14) continue;
    out.value *= 1.0 - lambda * nu;
  }
  return out;
}

double determinant_zero(const DiscreteOperator& op, double lo, double hi) {
  require(lo < hi, "root bracket must satisfy lo < hi");
  auto D = [&](double t) { return fredholm_determinant(op, t).value.real(); };
  const double flo = D(lo);
  const double fhi = D(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream msg;
    msg << "D(lambda) does not change sign on [" << lo << ", " << hi << "]";
    fail(ErrorKind::NoSolution, msg.str());
  }
  boost::uintmax_t iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(D, lo, hi, flo, fhi,
                                                         boost::math::tools::eps_tolerance<double>(52), iterations);
  return 0.5 * (bracket.first + bracket.second);
}

double determinant_log_derivative_check(const DiscreteOperator& op, double a, double b, unsigned steps) {
  require(steps >= 1, "the path needs at least one panel");
  require(op.square_blocks(), "the determinant needs square blocks");
  const auto lambdas = fredholm_eigenvalues(op);
  const double h = (b - a) / static_cast<double>(steps);
  for (unsigned k = 0; k <= steps; ++k) {
    const double t = a + h * k;
    const auto prox = nearest_eigenvalue(lambdas, t);
    if (prox.relative < 1e-3) {
      std::ostringstream detail;
      detail << "relative gap " << prox.relative << " at path point " << t;
      report_proximity(ErrorKind::Pole, t, prox, detail.str());
    }
  }
  const CMatrix& B = op.symmetrized();
  const cplx D0 = fredholm_determinant(op, a).value;
  cplx integral = 0.0;
  cplx previous = resolvent_trace(B, a);
  double worst = 0.0;
  for (unsigned k = 1; k <= steps; ++k) {
    const double t = a + h * k;
    const cplx current = resolvent_trace(B, t);
    integral += 0.5 * h * (previous + current);
    previous = current;
    const cplx ratio = fredholm_determinant(op, t).value / D0;
    worst = std::max(worst, std::abs(std::exp(-integral) - ratio) / std::abs(ratio));
  }
  return worst;
}

std::vector<CVector> first_kind_solve(const DiscreteOperator& op, cplx lambda_j, double tol) {
  require(op.square_blocks(), "first_kind_solve needs square blocks");
  std::size_t multiplicity = 0;
  for (const auto& lj : fredholm_eigenvalues(op))
    if (std::abs(lambda_j - lj) <= tol * std::abs(lj)) ++multiplicity;
  if (multiplicity == 0) {
    std::ostringstream msg;
    msg << "lambda = " << lambda_j << " is not a Fredholm eigenvalue within tolerance " << tol;
    fail(ErrorKind::NoSolution, msg.str());
  }
  const CMatrix& B = op.symmetrized();
  Eigen::JacobiSVD<CMatrix> svd(CMatrix::Identity(B.rows(), B.cols()) - lambda_j * B, Eigen::ComputeFullV);
  const RVector inv_sqrt_w = op.row_weights().cwiseSqrt().cwiseInverse();
  std::vector<CVector> basis;
  const Index n = B.cols();
  for (std::size_t j = 0; j < multiplicity; ++j) {
    CVector p = inv_sqrt_w.asDiagonal() * svd.matrixV().col(n - 1 - static_cast<Index>(j));
    if (multiplicity == 1) anchor_phase(p);
    basis.push_back(p);
  }
  return basis;
}

}  // namespace fredkit
