#include "fredkit/power.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fredkit/error.hpp"
#include "fredkit/spectral.hpp"

namespace fredkit {

namespace {

using Index = Eigen::Index;

double operator_scale(const DiscreteOperator& op) { return std::max(op.symmetrized().norm(), 1e-300); }

// Iterates x <- step(x) / ||step(x)||_W until successive Rayleigh-type
// quotients agree to tol; returns the last normalized iterate.
template <class Step>
CVector settle(const RVector& w, CVector x, Step step, std::size_t n_max, double tol) {
  cplx previous = 0.0;
  for (std::size_t k = 0; k < n_max; ++k) {
    const CVector y = step(x);
    const double norm = weighted_norm(w, y);
    if (norm == 0.0) break;
    const cplx rq = weighted_dot(w, x, y);
    x = y / norm;
    if (k > 0 && std::abs(rq - previous) <= tol * std::abs(rq)) break;
    previous = rq;
  }
  return x;
}

}  // namespace

PowerTrace power_ratio_estimate(const DiscreteOperator& op, const CVector& f, std::size_t n_max, double tol) {
  require(op.square_blocks(), "power iteration needs square blocks");
  require(f.size() == op.nystrom().cols(), "starting vector length does not match the operator");
  require(n_max >= 1, "n_max must be at least 1");
  const RVector& w = op.row_weights();
  const double fnorm = weighted_norm(w, f);
  if (!(fnorm > 0.0)) fail(ErrorKind::StartingVector, "starting vector is zero");
  const CVector g = f / fnorm;
  CVector h = g;
  const double collapse = 1e-13 * operator_scale(op);

  PowerTrace trace;
  trace.iterates.push_back(h);
  for (std::size_t k = 1; k <= n_max; ++k) {
    const CVector y = op.nystrom() * h;
    const double ynorm = weighted_norm(w, y);
    if (ynorm <= collapse) {
      std::ostringstream msg;
      msg << "iterate collapsed to numerical zero at step " << k << "; the starting vector lies in the null space";
      fail(ErrorKind::StartingVector, msg.str());
    }
    const cplx denom = weighted_dot(w, g, h);
    if (std::abs(denom) <= 1e-14) {
      std::ostringstream msg;
      msg << "iterate became orthogonal to the probe at step " << k;
      fail(ErrorKind::StartingVector, msg.str());
    }
    const cplx ratio = weighted_dot(w, g, y) / denom;
    Index peak = 0;
    h.cwiseAbs().maxCoeff(&peak);
    trace.pointwise_ratios.push_back(y[peak] / h[peak]);
    trace.ratios.push_back(ratio);
    h = y / ynorm;
    trace.iterates.push_back(h);
    trace.iterations_used = k;
    trace.estimate = ratio;
    if (k >= 2) {
      const cplx before = trace.ratios[k - 2];
      if (std::abs(ratio - before) <= tol * std::abs(ratio)) {
        trace.converged = true;
        return trace;
      }
    }
  }
  trace.warning =
      "ratios did not settle within n_max; the dominant modulus may be shared by several eigenvalues (R > 1)";
  return trace;
}

cplx bilinear_form(const DiscreteOperator& op, const CVector& g, const CVector& h) {
  return weighted_dot(op.row_weights(), g, op.nystrom() * h);
}

VariationalResult variational_estimate(const DiscreteOperator& op) {
  const auto d = djf_eig(op);
  if (d.retained == 0) fail(ErrorKind::NoSpectrum, "all eigenvalues are zero");
  const cplx nu = d.eigenvalues.front();
  if (std::abs(nu.imag()) > 1e-10 * std::abs(nu)) {
    std::ostringstream msg;
    msg << "dominant eigenvalue " << nu << " is not real; the sup/inf characterization does not apply";
    fail(ErrorKind::UnsupportedProfile, msg.str());
  }
  VariationalResult out;
  out.value = nu.real();
  out.supremum = nu.real() > 0.0;
  out.h = d.p(0);
  out.g = d.q(0);
  return out;
}

LeadingPair extract_leading_pair(const DiscreteOperator& op, cplx nu1, const CVector& f, const CVector& g,
                                 std::size_t n) {
  require(op.square_blocks(), "leading-pair extraction needs square blocks");
  if (std::abs(nu1) == 0.0) fail(ErrorKind::DivisionByZero, "nu1 must be nonzero");
  require(f.size() == op.nystrom().cols() && g.size() == op.nystrom().cols(),
          "starting vector length does not match the operator");
  const RVector& w = op.row_weights();
  const double fnorm = weighted_norm(w, f);
  const double gnorm = weighted_norm(w, g);
  if (!(fnorm > 0.0) || !(gnorm > 0.0)) fail(ErrorKind::StartingVector, "starting vectors must be nonzero");

  CVector p = f / fnorm;
  CVector q = g / gnorm;
  for (std::size_t k = 0; k < n; ++k) {
    p = op.nystrom() * p / nu1;
    q = apply_adjoint(op, q) / std::conj(nu1);
    const double pn = weighted_norm(w, p);
    const double qn = weighted_norm(w, q);
    if (pn <= 1e-12 || qn <= 1e-12) {
      fail(ErrorKind::StartingVector,
           "iterate collapsed; the starting vector has no component along the leading eigenfunction");
    }
    p /= pn;
    q /= qn;
  }
  anchor_phase(p);
  const cplx overlap = weighted_dot(w, q, p);
  if (std::abs(overlap) <= 1e-12) {
    fail(ErrorKind::StartingVector, "left and right iterates are orthogonal; <q1, p1> vanishes");
  }
  q /= std::conj(overlap);

  LeadingPair out;
  out.p = p;
  out.q = q;
  out.residual = weighted_norm(w, op.nystrom() * p - nu1 * p);
  if (out.residual > 1e-6 * std::abs(nu1)) {
    std::ostringstream msg;
    msg << "residual " << out.residual << " after " << n
        << " iterations stays above 1e-6 |nu1|; the dominant eigenvalue may be defective, use jordan_decompose";
    fail(ErrorKind::NotConverged, msg.str());
  }
  return out;
}

DiscreteOperator deflate(const DiscreteOperator& op, cplx nu1, const CVector& p1, const CVector& q1) {
  require(op.square_blocks(), "deflation needs square blocks");
  require(p1.size() == op.samples().rows() && q1.size() == op.samples().cols(),
          "eigenvector lengths do not match the operator");
  const cplx overlap = weighted_dot(op.row_weights(), q1, p1);
  if (std::abs(overlap - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "pair is not bi-orthonormal: <q1, p1>_W = " << overlap;
    fail(ErrorKind::PreconditionViolation, msg.str());
  }
  CMatrix K = op.samples() - nu1 * p1 * q1.adjoint();
  return DiscreteOperator::from_samples(op.rule(), op.rows_per_node(), op.cols_per_node(), std::move(K));
}

DiscreteOperator deflate(const Kernel& kernel, const QuadratureRule& rule, cplx nu1, const CVector& p1,
                         const CVector& q1) {
  return deflate(discretize(kernel, rule), nu1, p1, q1);
}

SequentialSpectrum sequential_spectrum(const DiscreteOperator& op, std::size_t k, std::size_t n_max, double tol,
                                       unsigned seed) {
  require(k >= 1, "k must be at least 1");
  SequentialSpectrum out;
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  DiscreteOperator current = op;
  const RVector& w = op.row_weights();
  const Index n = op.nystrom().cols();
  for (std::size_t stage = 0; stage < k; ++stage) {
    CVector f(n);
    for (Index i = 0; i < n; ++i) f[i] = normal(rng);
    try {
      const auto trace = power_ratio_estimate(current, f, n_max, tol);
      if (!trace.converged) {
        std::ostringstream msg;
        msg << "stage " << stage + 1 << ": " << trace.warning;
        out.failure = msg.str();
        return out;
      }
      CVector p = trace.iterates.back();
      CVector q = settle(w, f, [&](const CVector& x) { return apply_adjoint(current, x); }, n_max, tol);
      const cplx overlap = weighted_dot(w, q, p);
      if (std::abs(overlap) <= 1e-12) fail(ErrorKind::StartingVector, "left and right iterates are orthogonal");
      const cplx nu = weighted_dot(w, q, current.nystrom() * p) / overlap;
      anchor_phase(p);
      p /= weighted_norm(w, p);
      q /= std::conj(weighted_dot(w, q, p));
      out.stages.push_back({nu, p, q, trace.iterations_used});
      if (stage + 1 < k) current = deflate(current, nu, p, q);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "stage " << stage + 1 << ": " << e.what();
      out.failure = msg.str();
      return out;
    }
  }
  out.complete = true;
  return out;
}

}  // namespace fredkit
