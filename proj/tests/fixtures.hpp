#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fredkit/fredkit.hpp"

namespace fx {

using namespace fredkit;

/// Adaptive Gauss-Kronrod on [a, b]; independent of the library's rules.
inline double integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

inline QuadratureRule unit_rule(std::size_t n = 8) { return gauss_legendre(n, 0.0, 1.0); }
inline QuadratureRule hermite_rule(std::size_t n = 40) { return gauss_hermite_prob(n); }

inline ScalarFn e1() { return [](double) { return cplx(1.0); }; }
inline ScalarFn e2() { return [](double y) { return cplx(std::sqrt(3.0) * (2.0 * y - 1.0)); }; }

inline Kernel yz() { return separable_kernel({1.0}, {polynomial({0, 1})}, {polynomial({0, 1})}); }
inline Kernel minus_yz() { return separable_kernel({-1.0}, {polynomial({0, 1})}, {polynomial({0, 1})}); }
inline Kernel yz2() { return separable_kernel({1.0}, {polynomial({0, 1})}, {polynomial({0, 0, 1})}); }

/// 0.5 e1(y)(e1 - e2)(z) + 0.2 (e1 + e2)(y) e2(z); eigenvalues 0.5 and 0.2.
inline Kernel two_term(const QuadratureRule& rule) {
  CMatrix core(2, 2);
  core << 0.5, -0.3, 0.0, 0.2;
  return basis_kernel(core, {e1(), e2()}, rule, "two_term");
}

/// Non-Hermitian kernel with eigenvalues +1/2 and -1/2.
inline Kernel pm_half(const QuadratureRule& rule) {
  CMatrix core(2, 2);
  core << 0.5, 0.3, 0.0, -0.5;
  return basis_kernel(core, {e1(), e2()}, rule, "pm_half");
}

/// Two-term kernel with a double eigenvalue 0.4.
inline Kernel double_eigen(const QuadratureRule& rule) {
  CMatrix core = CMatrix::Identity(2, 2) * 0.4;
  return basis_kernel(core, {e1(), e2()}, rule, "double");
}

inline Kernel lifted_diag(const QuadratureRule& rule) {
  return lift_to_kernel({{0.5, 1}, {0.25, 1}}, orthonormal_polynomials(rule, 2), rule);
}

inline Kernel defective(const QuadratureRule& rule) { return defective_kernel(0.5, 2, {e1(), e2()}, rule); }

inline Kernel zero_kernel() {
  return Kernel::scalar([](double, double) { return cplx(0.0); }, "zero");
}

struct Case {
  std::string name;
  Kernel kernel;
  QuadratureRule rule;
};

/// Kernels with a diagonal Jordan form.
inline std::vector<Case> djf_gallery() {
  const auto u = unit_rule();
  return {{"yz", yz(), u},
          {"yz2", yz2(), u},
          {"two_term", two_term(u), u},
          {"pm_half", pm_half(u), u},
          {"lifted", lifted_diag(u), u},
          {"mehler", mehler_kernel(0.5), hermite_rule()}};
}

inline CVector samples(const QuadratureRule& rule, const std::function<cplx(double)>& f) {
  CVector v(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(rule.nodes()[i]);
  return v;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Weighted L2(mu x mu) norm of a node table of op's shape.
inline double l2(const DiscreteOperator& op, const CMatrix& m) {
  return kernel_l2_norm(m, op.row_weights(), op.col_weights());
}

inline CMatrix random_matrix(std::mt19937& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

/// Random S with condition number at most cap, by rescaling singular values.
inline CMatrix conditioned_matrix(std::mt19937& rng, Eigen::Index n, double cap) {
  Eigen::JacobiSVD<CMatrix> svd(random_matrix(rng, n), Eigen::ComputeFullU | Eigen::ComputeFullV);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = std::pow(cap, -u(rng));
  s[0] = 1.0;
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace fx
