#include "fredkit/kernel.hpp"

#include <cmath>
#include <sstream>

#include "fredkit/error.hpp"

namespace fredkit {

Kernel Kernel::closed_form(std::size_t s1, std::size_t s2, BlockFn evaluator, std::string name) {
  require(s1 >= 1 && s2 >= 1, "kernel block shape must be positive");
  require(static_cast<bool>(evaluator), "closed-form kernel needs an evaluator");
  Kernel k;
  k.body_ = Body::ClosedForm;
  k.s1_ = s1;
  k.s2_ = s2;
  k.name_ = std::move(name);
  k.evaluator_ = std::move(evaluator);
  return k;
}

Kernel Kernel::scalar(std::function<cplx(double, double)> evaluator, std::string name) {
  require(static_cast<bool>(evaluator), "closed-form kernel needs an evaluator");
  return closed_form(
      1, 1,
      [f = std::move(evaluator)](double y, double z) {
        CMatrix block(1, 1);
        block(0, 0) = f(y, z);
        return block;
      },
      std::move(name));
}

Kernel Kernel::finite_rank(std::size_t s1, std::size_t s2, std::vector<FiniteRankTerm> terms, std::string name) {
  require(s1 >= 1 && s2 >= 1, "kernel block shape must be positive");
  require(!terms.empty(), "finite-rank kernel needs at least one term");
  for (const auto& t : terms) require(t.right && t.left, "finite-rank term has an empty function");
  Kernel k;
  k.body_ = Body::FiniteRank;
  k.s1_ = s1;
  k.s2_ = s2;
  k.name_ = std::move(name);
  k.terms_ = std::make_shared<const std::vector<FiniteRankTerm>>(std::move(terms));
  return k;
}

Kernel Kernel::grid_sampled(const QuadratureRule& rule, CMatrix table, std::size_t s1, std::size_t s2) {
  const auto n = rule.size();
  require(s1 >= 1 && s2 >= 1, "kernel block shape must be positive");
  require(static_cast<std::size_t>(table.rows()) == n * s1 && static_cast<std::size_t>(table.cols()) == n * s2,
          "grid table shape does not match rule size times block shape");
  Kernel k;
  k.body_ = Body::GridSampled;
  k.s1_ = s1;
  k.s2_ = s2;
  k.name_ = "grid";
  k.grid_rule_ = std::make_shared<const QuadratureRule>(rule);
  k.table_ = std::make_shared<const CMatrix>(std::move(table));
  return k;
}

CMatrix Kernel::evaluate(double y, double z) const {
  const auto r = static_cast<Eigen::Index>(s1_);
  const auto c = static_cast<Eigen::Index>(s2_);
  switch (body_) {
    case Body::ClosedForm: {
      CMatrix block = evaluator_(y, z);
      if (block.rows() != r || block.cols() != c) {
        std::ostringstream msg;
        msg << "kernel evaluator returned a " << block.rows() << "x" << block.cols() << " block at (" << y << ", "
            << z << ")";
        fail(ErrorKind::EvaluationError, msg.str());
      }
      return block;
    }
    case Body::FiniteRank: {
      CMatrix block = CMatrix::Zero(r, c);
      for (const auto& t : *terms_) {
        const CVector u = t.right(y);
        const CVector v = t.left(z);
        require(u.size() == r && v.size() == c, "finite-rank term has wrong vector length");
        block += t.coefficient * u * v.adjoint();
      }
      return block;
    }
    case Body::GridSampled: {
      const auto i = grid_rule_->find_node(y);
      const auto j = grid_rule_->find_node(z);
      if (i == grid_rule_->size() || j == grid_rule_->size()) {
        std::ostringstream msg;
        msg << "grid-sampled kernel has no value at (" << y << ", " << z << ")";
        fail(ErrorKind::Unsupported, msg.str());
      }
      return table_->block(static_cast<Eigen::Index>(i) * r, static_cast<Eigen::Index>(j) * c, r, c);
    }
  }
  fail(ErrorKind::EvaluationError, "unknown kernel body");
}

cplx Kernel::operator()(double y, double z) const {
  require(s1_ == 1 && s2_ == 1, "scalar evaluation of a block kernel");
  return evaluate(y, z)(0, 0);
}

double HermitePolynomial::value(double x) const {
  if (degree_ == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned j = 1; j < degree_; ++j) {
    const double next = x * cur - static_cast<double>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double HermitePolynomial::normalized(double x) const {
  // p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j+1) avoids forming j!.
  if (degree_ == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (unsigned j = 1; j < degree_; ++j) {
    const double next = (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

Kernel mehler_kernel(double r) {
  require(std::abs(r) < 1.0, "mehler kernel requires |r| < 1");
  // phi_C(y,z) = exp(-(y^2 - 2ryz + z^2) / (2(1-r^2))) / (2 pi sqrt(1-r^2)) and
  // phi(y) phi(z) = exp(-(y^2 + z^2) / 2) / (2 pi). Their ratio has exponent
  //   [-(y^2 - 2ryz + z^2) + (1-r^2)(y^2 + z^2)] / (2(1-r^2))
  //   = (2ryz - r^2 (y^2 + z^2)) / (2(1-r^2)).
  const double one_minus = 1.0 - r * r;
  const double scale = 1.0 / std::sqrt(one_minus);
  return Kernel::scalar(
      [r, one_minus, scale](double y, double z) {
        return cplx(scale * std::exp((2.0 * r * y * z - r * r * (y * y + z * z)) / (2.0 * one_minus)), 0.0);
      },
      "mehler");
}

namespace {

VectorFn lift(ScalarFn f) {
  return [f = std::move(f)](double x) {
    CVector v(1);
    v[0] = f(x);
    return v;
  };
}

}  // namespace

Kernel separable_kernel(const std::vector<cplx>& coeffs, const std::vector<ScalarFn>& rights,
                        const std::vector<ScalarFn>& lefts) {
  require(!coeffs.empty(), "separable kernel needs at least one term");
  require(coeffs.size() == rights.size() && coeffs.size() == lefts.size(),
          "separable kernel lists differ in length");
  std::vector<FiniteRankTerm> terms;
  for (std::size_t j = 0; j < coeffs.size(); ++j) terms.push_back({coeffs[j], lift(rights[j]), lift(lefts[j])});
  return Kernel::finite_rank(1, 1, std::move(terms), "separable");
}

double gram_residual(const std::vector<ScalarFn>& basis, const QuadratureRule& rule) {
  double worst = 0.0;
  const auto& x = rule.nodes();
  const auto& w = rule.weights();
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = a; b < basis.size(); ++b) {
      cplx g = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) g += w[i] * std::conj(basis[a](x[i])) * basis[b](x[i]);
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

Kernel basis_kernel(const CMatrix& core, const std::vector<ScalarFn>& basis, const QuadratureRule& rule,
                    std::string name) {
  const auto m = basis.size();
  require(m >= 1, "basis must be non-empty");
  require(static_cast<std::size_t>(core.rows()) == m && static_cast<std::size_t>(core.cols()) == m,
          "core matrix must be square with one row per basis function");
  const double residual = gram_residual(basis, rule);
  if (!(residual <= 1e-10)) {
    std::ostringstream msg;
    msg << "basis is not orthonormal under the rule: worst Gram residual " << residual;
    fail(ErrorKind::PreconditionViolation, msg.str());
  }
  std::vector<FiniteRankTerm> terms;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const cplx c = core(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (c != 0.0) terms.push_back({c, lift(basis[a]), lift(basis[b])});
    }
  if (terms.empty()) terms.push_back({0.0, lift(basis[0]), lift(basis[0])});
  return Kernel::finite_rank(1, 1, std::move(terms), std::move(name));
}

Kernel defective_kernel(cplx lam, std::size_t m, const std::vector<ScalarFn>& basis, const QuadratureRule& rule) {
  require(m >= 2, "defective kernel needs block size >= 2");
  require(basis.size() == m, "basis length must equal the block size");
  CMatrix core = CMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index a = 0; a < core.rows(); ++a) {
    core(a, a) = lam;
    if (a + 1 < core.rows()) core(a, a + 1) = 1.0;
  }
  return basis_kernel(core, basis, rule, "defective");
}

Kernel grid_kernel(const QuadratureRule& rule, const CMatrix& table) {
  const auto n = static_cast<Eigen::Index>(rule.size());
  require(table.rows() > 0 && table.cols() > 0 && table.rows() % n == 0 && table.cols() % n == 0,
          "grid table dimensions must be multiples of the rule size");
  return Kernel::grid_sampled(rule, table, static_cast<std::size_t>(table.rows() / n),
                              static_cast<std::size_t>(table.cols() / n));
}

std::vector<ScalarFn> orthonormal_polynomials(const QuadratureRule& rule, std::size_t m) {
  require(m >= 1 && m <= rule.size(), "basis size must be between 1 and the rule size");
  const auto n = static_cast<Eigen::Index>(rule.size());
  Eigen::VectorXd x(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = rule.nodes()[static_cast<std::size_t>(i)];
    w[i] = rule.weights()[static_cast<std::size_t>(i)];
  }
  // Discrete Stieltjes procedure on node values.
  std::vector<double> alpha, beta;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd cur = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(w.sum()));
  beta.push_back(std::sqrt(w.sum()));
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double a = (w.array() * x.array() * cur.array().square()).sum();
    Eigen::VectorXd next = (x.array() - a) * cur.array() - beta.back() * prev.array();
    if (k == 0) next = (x.array() - a) * cur.array();
    const double b = std::sqrt((w.array() * next.array().square()).sum());
    alpha.push_back(a);
    beta.push_back(b);
    prev = cur;
    cur = next / b;
  }
  std::vector<ScalarFn> basis;
  for (std::size_t degree = 0; degree < m; ++degree) {
    basis.push_back([alpha, beta, degree](double t) {
      double p_prev = 0.0;
      double p = 1.0 / beta[0];
      for (std::size_t k = 0; k < degree; ++k) {
        const double back = k == 0 ? 0.0 : beta[k];
        const double next = ((t - alpha[k]) * p - back * p_prev) / beta[k + 1];
        p_prev = p;
        p = next;
      }
      return cplx(p, 0.0);
    });
  }
  return basis;
}

ScalarFn polynomial(std::vector<double> coeffs) {
  return [c = std::move(coeffs)](double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return cplx(acc, 0.0);
  };
}

}  // namespace fredkit
