#include "fredkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

constexpr double kRetainTol = 1e-12;   // |nu| <= kRetainTol |nu_1| is numerical null space
constexpr double kRefineTol = 1e-4;    // pairs above this get one Nystrom refinement step
constexpr double kConditionCap = 1e8;
constexpr double kCoalesceTol = 1e-6;

std::size_t count_retained(const std::vector<cplx>& ordered) {
  if (ordered.empty() || std::abs(ordered.front()) == 0.0) return 0;
  const double cut = kRetainTol * std::abs(ordered.front());
  std::size_t r = 0;
  while (r < ordered.size() && std::abs(ordered[r]) > cut) ++r;
  return r;
}

void normalize_column(const RVector& w, CMatrix& m, Eigen::Index j) {
  CVector v = m.col(j);
  const double norm = weighted_norm(w, v);
  if (norm > 0.0) v /= norm;
  anchor_phase(v);
  m.col(j) = v;
}

double biorth_error(const RVector& w, const CMatrix& Q, const CMatrix& P, std::size_t r) {
  if (r == 0) return 0.0;
  const auto k = static_cast<Eigen::Index>(r);
  const CMatrix G = Q.leftCols(k).adjoint() * w.asDiagonal() * P.leftCols(k);
  return (G - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

// One Nystrom step p <- A p / nu cleans the node samples where tiny weights
// amplify the eigensolver's roundoff through the W^{-1/2} back-scaling.
void refine_right(const DiscreteOperator& op, BiSpectralDecomposition& d) {
  if (d.retained == 0) return;
  const double floor = kRefineTol * std::abs(d.eigenvalues.front());
  for (std::size_t j = 0; j < d.retained; ++j) {
    if (std::abs(d.eigenvalues[j]) < floor) break;
    const auto c = static_cast<Eigen::Index>(j);
    d.right.col(c) = (op.nystrom() * d.right.col(c)) / d.eigenvalues[j];
  }
}

void refine_left(const DiscreteOperator& op, BiSpectralDecomposition& d) {
  if (d.retained == 0) return;
  const double floor = kRefineTol * std::abs(d.eigenvalues.front());
  for (std::size_t j = 0; j < d.retained; ++j) {
    if (std::abs(d.eigenvalues[j]) < floor) break;
    const auto c = static_cast<Eigen::Index>(j);
    d.left.col(c) = apply_adjoint(op, d.left.col(c)) / std::conj(d.eigenvalues[j]);
  }
}

}  // namespace

CMatrix AsymptoticProfile::coefficient(unsigned n) const {
  CMatrix c = CMatrix::Zero(top_right.rows(), top_left.rows());
  for (std::size_t j = 0; j < R; ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    const cplx phase = std::polar(1.0, static_cast<double>(n) * phases[j]);
    c += phase * top_right.col(k) * top_left.col(k).adjoint();
  }
  return c;
}

BiSpectralDecomposition hermitian_eig(const DiscreteOperator& op) {
  require(op.square_blocks(), "hermitian_eig needs square blocks");
  const CMatrix& B = op.symmetrized();
  const double scale = B.size() ? B.cwiseAbs().maxCoeff() : 0.0;
  const double asym = B.size() ? (B - B.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (asym > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "kernel is not Hermitian (relative asymmetry " << asym / scale << "); use djf_eig";
    fail(ErrorKind::WrongDecomposition, msg.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (B + B.adjoint()));
  std::vector<cplx> values;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) values.emplace_back(solver.eigenvalues()[i], 0.0);
  const auto order = spectral_order(values);

  BiSpectralDecomposition d;
  d.hermitian = true;
  d.weights = op.row_weights();
  const RVector inv_sqrt_w = d.weights.cwiseSqrt().cwiseInverse();
  const auto n = B.rows();
  d.right.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]);
    d.eigenvalues.push_back(values[static_cast<std::size_t>(src)]);
    d.right.col(c) = inv_sqrt_w.asDiagonal() * solver.eigenvectors().col(src);
  }
  d.retained = count_retained(d.eigenvalues);
  refine_right(op, d);

  // Weighted Gram-Schmidt (two passes) restores orthonormality after refinement.
  for (Eigen::Index j = 0; j < n; ++j) {
    CVector v = d.right.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < j; ++k) v -= weighted_dot(d.weights, d.right.col(k), v) * d.right.col(k);
    d.right.col(j) = v;
    normalize_column(d.weights, d.right, j);
  }
  d.left = d.right;
  d.biorth_residual = biorth_error(d.weights, d.left, d.right, d.retained);
  d.condition_estimate = 1.0;
  return d;
}

BiSpectralDecomposition djf_eig(const DiscreteOperator& op) {
  require(op.square_blocks(), "djf_eig needs square blocks");
  const CMatrix& B = op.symmetrized();
  const auto n = B.rows();
  Eigen::ComplexEigenSolver<CMatrix> right_solver(B);
  Eigen::ComplexEigenSolver<CMatrix> left_solver(B.adjoint());

  std::vector<cplx> values(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = right_solver.eigenvalues()[i];
  const auto order = spectral_order(values);

  BiSpectralDecomposition d;
  d.weights = op.row_weights();
  CMatrix V(n, n), U(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto src = static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]);
    d.eigenvalues.push_back(values[static_cast<std::size_t>(src)]);
    V.col(c) = right_solver.eigenvectors().col(src).normalized();
  }
  d.retained = count_retained(d.eigenvalues);
  const auto r = static_cast<Eigen::Index>(d.retained);

  // Pair each right eigenvalue with the nearest unused conjugate left one.
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index best = -1;
    double best_gap = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double gap = std::abs(std::conj(left_solver.eigenvalues()[k]) - d.eigenvalues[static_cast<std::size_t>(c)]);
      if (best < 0 || gap < best_gap) {
        best = k;
        best_gap = gap;
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    U.col(c) = left_solver.eigenvectors().col(best).normalized();
  }

  const double lead = d.retained ? std::abs(d.eigenvalues.front()) : 0.0;
  double worst_condition = 1.0;
  for (Eigen::Index j = 0; j < r; ++j) {
    const double overlap = std::abs(U.col(j).dot(V.col(j)));
    worst_condition = std::max(worst_condition, overlap > 0.0 ? 1.0 / overlap : std::numeric_limits<double>::infinity());
    for (Eigen::Index k = 0; k < j; ++k) {
      const double gap = std::abs(d.eigenvalues[static_cast<std::size_t>(j)] - d.eigenvalues[static_cast<std::size_t>(k)]);
      if (gap <= kCoalesceTol * lead && std::abs(V.col(k).dot(V.col(j))) > 1.0 - kCoalesceTol) {
        std::ostringstream msg;
        msg << "eigenvectors for nu = " << d.eigenvalues[static_cast<std::size_t>(k)] << " and "
            << d.eigenvalues[static_cast<std::size_t>(j)]
            << " coalesce; the operator looks defective, use jordan_decompose";
        fail(ErrorKind::DefectiveSuspected, msg.str());
      }
    }
  }
  d.condition_estimate = worst_condition;
  if (!(worst_condition <= kConditionCap)) {
    std::ostringstream msg;
    msg << "eigenvector condition estimate " << worst_condition
        << " exceeds 1e8; the operator looks defective, use jordan_decompose";
    fail(ErrorKind::DefectiveSuspected, msg.str());
  }

  const RVector inv_sqrt_w = d.weights.cwiseSqrt().cwiseInverse();
  d.right = inv_sqrt_w.asDiagonal() * V;
  d.left = inv_sqrt_w.asDiagonal() * U;
  refine_right(op, d);
  refine_left(op, d);
  for (Eigen::Index j = 0; j < n; ++j) normalize_column(d.weights, d.right, j);
  for (Eigen::Index j = r; j < n; ++j) normalize_column(d.weights, d.left, j);

  if (r > 0) {
    const CMatrix G = d.left.leftCols(r).adjoint() * d.weights.asDiagonal() * d.right.leftCols(r);
    Eigen::PartialPivLU<CMatrix> lu(G);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kConditionCap)) {
      std::ostringstream msg;
      msg << "bi-orthogonal Gram matrix is singular (rcond " << rcond << "); use jordan_decompose";
      fail(ErrorKind::DefectiveSuspected, msg.str());
    }
    // Q_r <- Q_r G^{-*} so that Q_r^* W P_r = I.
    const CMatrix Ginv_adj = lu.inverse().adjoint();
    d.left.leftCols(r) = (d.left.leftCols(r) * Ginv_adj).eval();
  }
  d.biorth_residual = biorth_error(d.weights, d.left, d.right, d.retained);
  return d;
}

AsymptoticProfile asymptotic_profile(const BiSpectralDecomposition& d, double cluster_tol) {
  if (d.eigenvalues.empty() || std::abs(d.eigenvalues.front()) == 0.0)
    fail(ErrorKind::NoSpectrum, "all eigenvalues are zero");
  AsymptoticProfile prof;
  prof.r1 = std::abs(d.eigenvalues.front());
  std::size_t R = 0;
  while (R < d.eigenvalues.size() && std::abs(d.eigenvalues[R]) >= (1.0 - cluster_tol) * prof.r1) ++R;
  prof.R = R;
  prof.r0 = R < d.eigenvalues.size() ? std::abs(d.eigenvalues[R]) : 0.0;
  const auto k = static_cast<Eigen::Index>(R);
  prof.top_right = d.right.leftCols(k);
  prof.top_left = d.left.leftCols(k);
  for (std::size_t j = 0; j < R; ++j) prof.phases.push_back(canonical_phase(d.eigenvalues[j]));
  for (std::size_t j = R; j < d.retained; ++j)
    prof.tail_scale += weighted_norm(d.weights, d.p(j)) * weighted_norm(d.weights, d.q(j));
  return prof;
}

PowerApproximation power_approx(const BiSpectralDecomposition&, const AsymptoticProfile& profile, unsigned n) {
  require(n >= 1, "power_approx needs n >= 1");
  PowerApproximation out;
  out.approx = std::pow(profile.r1, static_cast<double>(n)) * profile.coefficient(n);
  out.error_bound = std::pow(profile.r0, static_cast<double>(n)) * profile.tail_scale;
  return out;
}

CMatrix reconstruct(const BiSpectralDecomposition& d, std::size_t k) {
  require(k <= d.retained, "reconstruct rank exceeds the retained eigenpair count");
  const auto rows = d.right.rows();
  CMatrix out = CMatrix::Zero(rows, d.left.rows());
  for (std::size_t j = 0; j < k; ++j) out += d.eigenvalues[j] * d.p(j) * d.q(j).adjoint();
  return out;
}

CVector expansion_apply(const BiSpectralDecomposition& d, unsigned n, const CVector& f) {
  require(f.size() == d.right.rows(), "expansion_apply: vector length mismatch");
  CVector out = CVector::Zero(f.size());
  for (std::size_t j = 0; j < d.retained; ++j)
    out += std::pow(d.eigenvalues[j], static_cast<double>(n)) * weighted_dot(d.weights, d.q(j), f) * d.p(j);
  return out;
}

}  // namespace fredkit
