#include "fredkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fredkit {

cplx weighted_dot(const RVector& w, const CVector& u, const CVector& v) {
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) sum += w[i] * std::conj(u[i]) * v[i];
  return sum;
}

double weighted_norm(const RVector& w, const CVector& u) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) sum += w[i] * std::norm(u[i]);
  return std::sqrt(sum);
}

double kernel_l2_norm(const CMatrix& samples, const RVector& row_w, const RVector& col_w) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j)
    for (Eigen::Index i = 0; i < samples.rows(); ++i)
      sum += row_w[i] * col_w[j] * std::norm(samples(i, j));
  return std::sqrt(sum);
}

CMatrix scale_rows_cols(const CMatrix& m, const RVector& row, const RVector& col) {
  return row.asDiagonal() * m * col.asDiagonal();
}

cplx anchor_phase(CVector& v) {
  if (v.size() == 0) return 1.0;
  const double largest = v.cwiseAbs().maxCoeff();
  if (largest == 0.0) return 1.0;
  Eigen::Index anchor = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= (1.0 - 1e-8) * largest) {
      anchor = i;
      break;
    }
  }
  const cplx factor = std::conj(v[anchor]) / std::abs(v[anchor]);
  v *= factor;
  v[anchor] = std::abs(v[anchor]);
  return factor;
}

double canonical_phase(cplx v) {
  if (std::abs(v.imag()) <= 1e-12 * std::abs(v)) return v.real() < 0.0 ? M_PI : 0.0;
  return std::arg(v);
}

std::vector<std::size_t> spectral_order(const std::vector<cplx>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  // Group near-equal moduli and order each group by phase.
  std::size_t start = 0;
  while (start < order.size()) {
    const double lead = std::abs(values[order[start]]);
    std::size_t end = start + 1;
    while (end < order.size() && lead - std::abs(values[order[end]]) <= 1e-10 * lead) ++end;
    std::stable_sort(order.begin() + static_cast<long>(start), order.begin() + static_cast<long>(end),
                     [&](std::size_t a, std::size_t b) {
                       return canonical_phase(values[a]) > canonical_phase(values[b]);
                     });
    start = end;
  }
  return order;
}

double binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (long long i = 1; i <= k; ++i) {
    result *= static_cast<double>(n - k + i);
    result /= static_cast<double>(i);
  }
  return result;
}

std::vector<cplx> eigenvalues_of(const CMatrix& m) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
  std::vector<cplx> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
  return out;
}

double condition_number(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smallest = s[s.size() - 1];
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return s[0] / smallest;
}

}  // namespace fredkit
