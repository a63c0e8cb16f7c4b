#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"

using namespace fredkit;

namespace {

// Dense node-sample operator of N N^* acting on node vectors: K W_c K^* W_r.
CMatrix gram_matrix(const DiscreteOperator& op) {
  return op.samples() * op.col_weights().asDiagonal() * op.samples().adjoint() * op.row_weights().asDiagonal();
}

CMatrix pow_matrix(const CMatrix& m, unsigned n) {
  CMatrix out = CMatrix::Identity(m.rows(), m.cols());
  for (unsigned i = 0; i < n; ++i) out = (out * m).eval();
  return out;
}

}  // namespace

TEST_CASE("SVD of yz2") {
  const auto rule = fx::unit_rule();
  const auto op = discretize(fx::yz2(), rule);
  const auto svd = operator_svd(op);
  const double ny = std::sqrt(fx::integral([](double y) { return y * y; }, 0, 1));
  const double nz = std::sqrt(fx::integral([](double z) { return std::pow(z, 4); }, 0, 1));
  CHECK(std::abs(svd.singular_values[0] - ny * nz) < 1e-12);
  CHECK(svd.rank_numerical == 1);
  CHECK(fx::max_abs(svd.p(0) - fx::samples(rule, [ny](double y) { return cplx(y / ny); })) < 1e-10);
  CHECK(fx::max_abs(svd.q(0) - fx::samples(rule, [nz](double z) { return cplx(z * z / nz); })) < 1e-10);
  CHECK(std::abs(trace_power(svd, 0) - ny * ny * nz * nz) < 1e-12);
}

TEST_CASE("SVD of Mehler equals its spectrum") {
  const auto op = discretize(mehler_kernel(0.5), fx::hermite_rule());
  const auto svd = operator_svd(op);
  for (int j = 0; j < 6; ++j) CHECK(std::abs(svd.singular_values[static_cast<std::size_t>(j)] - std::pow(0.5, j)) < 1e-6);
  CHECK(std::abs(trace_power(svd, 0) - 4.0 / 3.0) < 1e-5);
}

TEST_CASE("SVD of the zero kernel") {
  const auto svd = operator_svd(discretize(fx::zero_kernel(), fx::unit_rule(4)));
  for (double t : svd.singular_values) CHECK(t == 0.0);
  CHECK(svd.rank_numerical == 0);
  CHECK(trace_power(svd, 0) == 0.0);
  CHECK(fx::max_abs(iterated_gram(svd, 1, GramSide::Left)) == 0.0);
}

TEST_CASE("SVD invariants across the gallery") {
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  auto cases = fx::djf_gallery();
  cases.push_back({"defective", fx::defective(fx::unit_rule()), fx::unit_rule()});
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto op = discretize(c.kernel, c.rule);
    const auto svd = operator_svd(op);
    const double t1 = svd.singular_values[0];
    const auto r = static_cast<Eigen::Index>(svd.rank_numerical);
    for (std::size_t j = 0; j + 1 < svd.singular_values.size(); ++j)
      CHECK(svd.singular_values[j] >= svd.singular_values[j + 1]);
    const CMatrix Gp = svd.left.leftCols(r).adjoint() * svd.left_weights.asDiagonal() * svd.left.leftCols(r);
    const CMatrix Gq = svd.right.leftCols(r).adjoint() * svd.right_weights.asDiagonal() * svd.right.leftCols(r);
    CHECK(fx::max_abs(Gp - CMatrix::Identity(r, r)) < 1e-10);
    CHECK(fx::max_abs(Gq - CMatrix::Identity(r, r)) < 1e-10);
    for (Eigen::Index j = 0; j < r; ++j) {
      const double t = svd.singular_values[static_cast<std::size_t>(j)];
      CHECK(weighted_norm(svd.left_weights, fredkit::apply(op, svd.q(static_cast<std::size_t>(j))) - t * svd.p(static_cast<std::size_t>(j))) <= 1e-9 * t1);
      CHECK(weighted_norm(svd.right_weights, apply_adjoint(op, svd.p(static_cast<std::size_t>(j))) - t * svd.q(static_cast<std::size_t>(j))) <= 1e-9 * t1);
    }

    // theta^2 against the Hermitian path on N N^*
    const CMatrix NN = gram_matrix(op);
    const RVector sw = op.row_weights().cwiseSqrt();
    const CMatrix sym = sw.asDiagonal() * NN * sw.cwiseInverse().asDiagonal();
    const auto gram_ops = DiscreteOperator::from_samples(op.rule(), 1, 1, NN * op.row_weights().cwiseInverse().asDiagonal());
    const auto h = hermitian_eig(gram_ops);
    for (Eigen::Index j = 0; j < r; ++j) {
      const double t2 = std::pow(svd.singular_values[static_cast<std::size_t>(j)], 2);
      CHECK(std::abs(h.eigenvalues[static_cast<std::size_t>(j)].real() - t2) <= 1e-9 * t1 * t1);
    }
    (void)sym;

    // reconstruction
    CHECK(fx::l2(op, iterated_gram_with_kernel(svd, 0, GramSide::Left) - op.samples()) <= 1e-8 * fx::l2(op, op.samples()));

    // iterated Gram kernels against dense products
    for (unsigned n = 1; n <= 5; ++n) {
      const CMatrix oracle = pow_matrix(NN, n - 1) * op.samples() * op.col_weights().asDiagonal() * op.samples().adjoint();
      CHECK(fx::l2(op, iterated_gram(svd, n, GramSide::Left) - oracle) <= 1e-9 * fx::l2(op, oracle));
      const CMatrix odd = pow_matrix(NN, n) * op.samples();
      CHECK(fx::l2(op, iterated_gram_with_kernel(svd, n, GramSide::Left) - odd) <= 1e-9 * std::max(fx::l2(op, odd), 1e-300));
    }

    // semigroup property on the retained span
    CVector f(op.nystrom().cols());
    for (auto& v : f) v = cplx(g(rng), g(rng));
    const CVector fr = gram_apply(svd, 0, f, GramSide::Left);
    for (unsigned n = 0; n < 4; ++n) {
      const CVector next = gram_apply(svd, n + 1, fr, GramSide::Left);
      const CVector stepped = NN * gram_apply(svd, n, fr, GramSide::Left);
      CHECK(weighted_norm(svd.left_weights, next - stepped) <= 1e-10 * std::max(weighted_norm(svd.left_weights, fr), 1e-300));
    }

    // decay of trace powers
    for (unsigned n = 0; n <= 50; ++n) CHECK(trace_power(svd, n + 1) <= t1 * t1 * trace_power(svd, n) * (1 + 1e-14));
    CHECK(std::abs(trace_power(svd, 0) - trace_power_direct(op, 0)) <= 1e-10 * trace_power(svd, 0));
    CHECK(std::abs(trace_power(svd, 2) - trace_power_direct(op, 2)) <= 1e-10 * trace_power(svd, 0));
  }
}

TEST_CASE("gram_apply") {
  const auto op = discretize(fx::two_term(fx::unit_rule()), fx::unit_rule());
  const auto svd = operator_svd(op);
  for (unsigned n = 0; n <= 3; ++n)
    CHECK(weighted_norm(svd.left_weights, gram_apply(svd, n, svd.p(0), GramSide::Left) -
                                              std::pow(svd.singular_values[0], 2.0 * n) * svd.p(0)) < 1e-12);
  // a vector orthogonal to the retained left vectors maps to 0
  const CVector e3 = fx::samples(fx::unit_rule(), [](double y) { return cplx(6 * y * y - 6 * y + 1); });
  CHECK(weighted_norm(svd.left_weights, gram_apply(svd, 1, e3, GramSide::Left)) < 1e-12);
  CHECK(weighted_norm(svd.left_weights, gram_apply(svd, 0, e3, GramSide::Left)) < 1e-12);
  CHECK_THROWS_AS(gram_apply(svd, 1, CVector::Zero(3), GramSide::Left), Error);

  // full-rank kernel: random f against the dense oracle
  const auto mop = discretize(mehler_kernel(0.2), fx::hermite_rule(6));
  const auto msvd = operator_svd(mop);
  REQUIRE(msvd.rank_numerical == 6);
  std::mt19937 rng(2);
  std::normal_distribution<double> g;
  CVector f(6);
  for (auto& v : f) v = cplx(g(rng), g(rng));
  const CVector oracle = pow_matrix(gram_matrix(mop), 2) * f;
  CHECK(weighted_norm(msvd.left_weights, gram_apply(msvd, 2, f, GramSide::Left) - oracle) <=
        1e-9 * weighted_norm(msvd.left_weights, oracle));
}

TEST_CASE("yz2 Gram identities") {
  const auto rule = fx::unit_rule();
  const auto op = discretize(fx::yz2(), rule);
  const auto svd = operator_svd(op);
  const double t2 = 1.0 / 15.0;
  const CVector y = fx::samples(rule, [](double x) { return cplx(std::sqrt(3.0) * x); });
  CHECK(fx::max_abs(iterated_gram(svd, 1, GramSide::Left) - t2 * y * y.adjoint()) < 1e-12);
  CHECK(fx::max_abs(iterated_gram_with_kernel(svd, 1, GramSide::Left) - t2 * op.samples()) < 1e-12);
  CHECK(fx::max_abs(iterated_gram_with_kernel(svd, 0, GramSide::Right) - op.samples().adjoint()) < 1e-12);
}

TEST_CASE("truncation") {
  const auto op = discretize(mehler_kernel(0.5), fx::hermite_rule());
  const auto svd = operator_svd(op);
  const auto full = svd_truncate(svd, svd.rank_numerical);
  CHECK(full.tail_bound <= 1e-12 * svd.singular_values[0]);
  CHECK_THROWS_AS(svd_truncate(svd, 0), Error);
  CHECK_THROWS_AS(svd_truncate(svd, svd.rank_numerical + 1), Error);

  for (unsigned n : {3u, 5u, 8u}) {
    const auto cut = svd_truncate(svd, 1);
    const double err = fx::l2(op, iterated_gram(svd, n, GramSide::Left) - iterated_gram(cut.svd, n, GramSide::Left));
    const double predicted = std::pow(cut.tail_bound, 2.0 * n);
    CHECK(err <= 10.0 * predicted);
    CHECK(err >= predicted / 10.0);
  }

  const auto rank1 = operator_svd(discretize(fx::yz2(), fx::unit_rule()));
  const auto t = svd_truncate(rank1, 1);
  CHECK(t.tail_bound <= 1e-12 * rank1.singular_values[0]);
}
