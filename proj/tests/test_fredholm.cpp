#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace fredkit;

namespace {

std::vector<fx::Case> solve_gallery() {
  auto cases = fx::djf_gallery();
  cases.push_back({"defective", fx::defective(fx::unit_rule()), fx::unit_rule()});
  return cases;
}

}  // namespace

TEST_CASE("second-kind solve for yz") {
  const auto rule = fx::unit_rule();
  const auto op = discretize(fx::yz(), rule);
  const CVector y = fx::samples(rule, [](double x) { return cplx(x); });
  const auto s = resolvent_solve(op, 1.0, y);
  const double factor = 1.0 / (1.0 - fx::integral([](double z) { return z * z; }, 0, 1));
  CHECK(fx::max_abs(s.solution - factor * y) < 1e-10);
  CHECK(s.residual <= 1e-9);
  CHECK(s.nearest_eigen_gap > 0.0);
  CHECK(fx::max_abs(resolvent_solve(op, 0.0, y).solution - y) == 0.0);

  try {
    resolvent_solve(op, 3.0, y);
    FAIL("expected eigenvalue proximity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EigenvalueProximity);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }

  const auto d = djf_eig(op);
  CHECK(fx::max_abs(second_kind_solve_series(d, 1.0, y, 1) - factor * y) < 1e-10);
  CHECK(fx::max_abs(second_kind_solve_series(d, 0.0, y, 1) - y) == 0.0);
  const CVector ortho = fx::samples(rule, [](double x) { return cplx(3 * x - 2); });
  CHECK(fx::max_abs(second_kind_solve_series(d, 1.7, ortho, 1) - ortho) < 1e-14);
  CHECK_THROWS_AS(second_kind_solve_series(d, 3.0, y, 1), Error);
}

TEST_CASE("resolvent kernels for yz") {
  const auto op = discretize(fx::yz(), fx::unit_rule());
  CHECK(fx::max_abs(resolvent_kernel(op, 0.0) - op.samples()) < 1e-15);
  CHECK(fx::max_abs(resolvent_kernel(op, 1.0) - 1.5 * op.samples()) < 1e-14);
  const auto d = djf_eig(op);
  CHECK(fx::max_abs(d.p(0) * d.q(0).adjoint() - 3.0 * op.samples()) < 1e-13);
  CHECK(fx::max_abs(resolvent_series(d, 1.0, 1) - 1.5 * op.samples()) < 1e-13);
  CHECK(fx::max_abs(resolvent_series(d, 1.0, 0)) == 0.0);
  try {
    resolvent_series(d, 3.0, 1);
    FAIL("expected a pole error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Pole);
  }
}

TEST_CASE("resolvent identities across the gallery") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& c : solve_gallery()) {
    CAPTURE(c.name);
    const auto op = discretize(c.kernel, c.rule);
    const auto lambdas = fredholm_eigenvalues(op);
    const double nu1 = std::abs(operator_eigenvalues(op)[0]);
    int done = 0;
    while (done < 20) {
      const cplx lam(u(rng) * 2.0 / nu1, u(rng) * 2.0 / nu1);
      bool near = false;
      for (const auto& l : lambdas) near = near || std::abs(lam - l) < 0.05 * std::abs(l);
      if (near) continue;
      ++done;
      const CMatrix Nl = resolvent_kernel(op, lam);
      const CMatrix& K = op.samples();
      const double scale = fx::l2(op, K);
      CHECK(fx::l2(op, K - Nl + lam * op.nystrom() * Nl) <= 1e-9 * scale);
      CHECK(fx::l2(op, K - Nl + lam * Nl * op.col_weights().asDiagonal() * K) <= 1e-9 * scale);

      CVector f(K.cols());
      for (auto& v : f) v = cplx(u(rng), u(rng));
      const auto s = resolvent_solve(op, lam, f);
      CHECK(s.residual <= 1e-9);
      if (c.name != "mehler" && c.name != "defective") {
        const auto d = djf_eig(op);
        const CVector series = second_kind_solve_series(d, lam, f, d.retained);
        CHECK(weighted_norm(op.row_weights(), series - s.solution) <= 1e-9 * weighted_norm(op.row_weights(), s.solution));
        CHECK(fx::l2(op, resolvent_series(d, lam, d.retained) - Nl) <= 1e-9 * fx::l2(op, Nl));
      }
    }
  }
}

TEST_CASE("Mehler resolvent series") {
  const auto op = discretize(mehler_kernel(0.5), fx::hermite_rule());
  const auto d = hermitian_eig(op);
  const CMatrix direct = resolvent_kernel(op, 0.9);
  const CMatrix series = resolvent_series(d, 0.9, 12);
  CHECK(fx::l2(op, direct - series) / fx::l2(op, direct) <= 1e-3);
  CHECK(fx::l2(op, direct - resolvent_series(d, 0.9, d.retained)) / fx::l2(op, direct) <= 1e-9);
}

TEST_CASE("Fredholm determinant") {
  const auto op = discretize(fx::yz(), fx::unit_rule());
  for (double l : {0.0, 0.5, 2.0, 3.0, -4.0}) {
    const cplx D = fredholm_determinant(op, l).value;
    CHECK(std::abs(D - (1.0 - l / 3.0)) < 1e-14);
  }
  CHECK(fredholm_determinant(op, 0.0, DeterminantMethod::Product).value == cplx(1.0));
  CHECK(std::abs(determinant_zero(op, 2.5, 3.5) - 3.0) <= 1e-10);
  CHECK_THROWS_AS(determinant_zero(op, 0.0, 1.0), Error);

  const auto mop = discretize(mehler_kernel(0.5), fx::hermite_rule());
  const cplx direct = fredholm_determinant(mop, 1.5).value;
  const cplx product = fredholm_determinant(mop, 1.5, DeterminantMethod::Product).value;
  double analytic = 1.0;
  for (int j = 0; j < 200; ++j) analytic *= 1.0 - 1.5 * std::pow(0.5, j);
  CHECK(std::abs(direct - product) <= 1e-6 * std::abs(direct));
  CHECK(std::abs(direct - analytic) <= 1e-6 * std::abs(analytic));

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& c : solve_gallery()) {
    CAPTURE(c.name);
    const auto g = discretize(c.kernel, c.rule);
    const double nu1 = std::abs(operator_eigenvalues(g)[0]);
    for (int i = 0; i < 20; ++i) {
      cplx lam(u(rng), u(rng));
      lam *= 0.9 / (nu1 * std::max(std::abs(lam), 1e-3)) * std::abs(u(rng));
      const cplx a = fredholm_determinant(g, lam).value;
      const cplx b = fredholm_determinant(g, lam, DeterminantMethod::Product).value;
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(a));
    }
  }
}

TEST_CASE("log-derivative check") {
  const auto op = discretize(fx::yz(), fx::unit_rule());
  CHECK(determinant_log_derivative_check(op, 0.0, 1.0, 200) <= 1e-6);
  CHECK(determinant_log_derivative_check(discretize(fx::zero_kernel(), fx::unit_rule()), 0.0, 1.0, 10) == 0.0);
  const auto mop = discretize(mehler_kernel(0.5), fx::hermite_rule());
  CHECK(determinant_log_derivative_check(mop, 0.0, 0.9, 400) <= 1e-4);
  try {
    determinant_log_derivative_check(op, 0.0, 3.0, 30);
    FAIL("expected a pole error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Pole);
  }
}

TEST_CASE("first-kind solutions") {
  const auto rule = fx::unit_rule();
  const auto op = discretize(fx::yz(), rule);
  const auto basis = first_kind_solve(op, 3.0);
  REQUIRE(basis.size() == 1);
  const CVector y = fx::samples(rule, [](double x) { return cplx(x); });
  const cplx overlap = weighted_dot(op.row_weights(), basis[0], y);
  CHECK(std::abs(std::abs(overlap) - weighted_norm(op.row_weights(), y)) < 1e-12);
  try {
    first_kind_solve(op, 1.0);
    FAIL("expected no-solution");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSolution);
  }

  const auto dbl = discretize(fx::double_eigen(rule), rule);
  const auto two = first_kind_solve(dbl, 2.5);
  REQUIRE(two.size() == 2);
  for (const auto& p : two) CHECK(weighted_norm(dbl.row_weights(), 2.5 * fredkit::apply(dbl, p) - p) < 1e-12);
  CHECK(std::abs(weighted_dot(dbl.row_weights(), two[0], two[1])) < 1e-12);
}
