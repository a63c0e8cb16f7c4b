#include "fredkit/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

using Index = Eigen::Index;

// Swaps adjacent diagonal entries k, k+1 of an upper-triangular Schur factor.
void swap_adjacent(CMatrix& T, CMatrix& U, Index k) {
  const cplx t11 = T(k, k);
  const cplx t22 = T(k + 1, k + 1);
  Eigen::Vector2cd v(T(k, k + 1), t22 - t11);
  const double len = v.norm();
  if (len == 0.0) return;
  v /= len;
  Eigen::Matrix2cd Z;
  Z << v[0], -std::conj(v[1]), v[1], std::conj(v[0]);
  T.middleRows(k, 2) = (Z.adjoint() * T.middleRows(k, 2)).eval();
  T.middleCols(k, 2) = (T.middleCols(k, 2) * Z).eval();
  U.middleCols(k, 2) = (U.middleCols(k, 2) * Z).eval();
  T(k + 1, k) = 0.0;
}

struct Cluster {
  std::vector<Index> members;
  cplx mean;
};

std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& ev, double cluster_tol) {
  const auto s = static_cast<Index>(ev.size());
  double rho = 0.0;
  for (const auto& v : ev) rho = std::max(rho, std::abs(v));
  const double delta = cluster_tol * rho;

  std::vector<Index> parent(static_cast<std::size_t>(s));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) i = parent[static_cast<std::size_t>(i)];
    return i;
  };
  for (Index i = 0; i < s; ++i) {
    for (Index j = i + 1; j < s; ++j) {
      const double d = std::abs(ev[static_cast<std::size_t>(i)] - ev[static_cast<std::size_t>(j)]);
      if (d <= delta) {
        parent[static_cast<std::size_t>(find(j))] = find(i);
      } else if (d <= 10.0 * delta) {
        std::ostringstream msg;
        msg << "eigenvalues " << ev[static_cast<std::size_t>(i)] << " and " << ev[static_cast<std::size_t>(j)]
            << " are " << d << " apart; merge threshold " << delta << ", separation required above "
            << 10.0 * delta;
        fail(ErrorKind::ClusteringError, msg.str());
      }
    }
  }
  std::vector<Cluster> clusters;
  std::vector<Index> slot(static_cast<std::size_t>(s), -1);
  for (Index i = 0; i < s; ++i) {
    const Index root = find(i);
    if (slot[static_cast<std::size_t>(root)] < 0) {
      slot[static_cast<std::size_t>(root)] = static_cast<Index>(clusters.size());
      clusters.push_back({});
    }
    clusters[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].members.push_back(i);
  }
  for (auto& c : clusters) {
    cplx sum = 0.0;
    for (Index i : c.members) sum += ev[static_cast<std::size_t>(i)];
    c.mean = sum / static_cast<double>(c.members.size());
  }
  std::vector<cplx> means;
  for (const auto& c : clusters) means.push_back(c.mean);
  std::vector<Cluster> ordered;
  for (std::size_t i : spectral_order(means)) ordered.push_back(clusters[i]);
  return ordered;
}

// Orthonormal basis of the column span of M, rank decided against tol.
CMatrix column_basis(const CMatrix& M, double tol) {
  if (M.cols() == 0) return CMatrix(M.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeThinU);
  Index r = 0;
  while (r < svd.singularValues().size() && svd.singularValues()[r] > tol) ++r;
  return svd.matrixU().leftCols(r);
}

// Null space basis of E via the SVD; singular values <= tol count as zero.
CMatrix null_space(const CMatrix& E, double tol) {
  Eigen::JacobiSVD<CMatrix> svd(E, Eigen::ComputeFullV);
  Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()[rank] > tol) ++rank;
  return svd.matrixV().rightCols(E.cols() - rank);
}

struct Chain {
  std::vector<CVector> vectors;  // p_1 .. p_m in cluster coordinates
};

// Chains of the nilpotent part E = T_c - lam I, built top-down: at each level k,
// new tops are taken from ker E^k outside ker E^{k-1} plus the level-k
// vectors of longer chains already built.
std::vector<Chain> build_chains(const CMatrix& E, double scale) {
  const Index a = E.rows();
  std::vector<CMatrix> kernels{CMatrix(a, 0)};
  CMatrix power = CMatrix::Identity(a, a);
  for (Index k = 1; k <= a; ++k) {
    power = (E * power).eval();
    kernels.push_back(null_space(power, 1e-10 * std::pow(scale, static_cast<double>(k))));
    if (kernels.back().cols() == a) break;
  }
  const auto levels = static_cast<Index>(kernels.size()) - 1;
  if (kernels.back().cols() != a) {
    std::ostringstream msg;
    msg << "cluster of size " << a << " is not nilpotent to tolerance after shifting";
    fail(ErrorKind::IllConditionedChain, msg.str());
  }

  std::vector<Chain> chains;
  for (Index k = levels; k >= 1; --k) {
    const auto& ker_k = kernels[static_cast<std::size_t>(k)];
    const auto& ker_prev = kernels[static_cast<std::size_t>(k - 1)];
    CMatrix span(a, ker_prev.cols() + static_cast<Index>(chains.size()));
    span.leftCols(ker_prev.cols()) = ker_prev;
    for (std::size_t c = 0; c < chains.size(); ++c)
      span.col(ker_prev.cols() + static_cast<Index>(c)) = chains[c].vectors[static_cast<std::size_t>(k - 1)];
    const CMatrix basis = column_basis(span, 1e-8);
    const Index wanted = ker_k.cols() - basis.cols();
    if (wanted <= 0) continue;
    const CMatrix projected = ker_k - basis * (basis.adjoint() * ker_k);
    Eigen::JacobiSVD<CMatrix> svd(projected, Eigen::ComputeThinU);
    for (Index t = 0; t < wanted; ++t) {
      Chain chain;
      chain.vectors.resize(static_cast<std::size_t>(k));
      CVector v = svd.matrixU().col(t);
      for (Index level = k; level >= 1; --level) {
        chain.vectors[static_cast<std::size_t>(level - 1)] = v;
        v = (E * v).eval();
      }
      chains.push_back(std::move(chain));
    }
  }
  std::stable_sort(chains.begin(), chains.end(),
                   [](const Chain& x, const Chain& y) { return x.vectors.size() > y.vectors.size(); });
  return chains;
}

}  // namespace

std::size_t JordanForm::offset(std::size_t b) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < b; ++i) off += blocks[i].m;
  return off;
}

CMatrix JordanForm::J() const {
  const auto s = static_cast<Index>(offset(blocks.size()));
  CMatrix out = CMatrix::Zero(s, s);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto m = static_cast<Index>(blocks[b].m);
    out.block(static_cast<Index>(offset(b)), static_cast<Index>(offset(b)), m, m) =
        jordan_block(blocks[b].lambda, blocks[b].m);
  }
  return out;
}

CMatrix jordan_block(cplx lam, std::size_t m) {
  require(m >= 1, "Jordan block size must be at least 1");
  const auto n = static_cast<Index>(m);
  CMatrix J = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    J(i, i) = lam;
    if (i + 1 < n) J(i, i + 1) = 1.0;
  }
  return J;
}

CMatrix jordan_block_power(cplx lam, std::size_t m, unsigned n) {
  require(m >= 1, "Jordan block size must be at least 1");
  const auto size = static_cast<Index>(m);
  CMatrix out = CMatrix::Zero(size, size);
  const auto top = std::min<std::size_t>(n, m - 1);
  for (std::size_t a = 0; a <= top; ++a) {
    const unsigned e = n - static_cast<unsigned>(a);
    const cplx power = e == 0 ? cplx(1.0) : std::pow(lam, static_cast<int>(e));
    const cplx entry = binomial(n, static_cast<long long>(a)) * power;
    for (Index j = 0; j + static_cast<Index>(a) < size; ++j) out(j, j + static_cast<Index>(a)) = entry;
  }
  return out;
}

JordanForm jordan_decompose(const CMatrix& N, double cluster_tol) {
  require(N.rows() == N.cols(), "jordan_decompose needs a square matrix");
  require(N.rows() >= 1 && N.rows() <= 64, "jordan_decompose is limited to dimension 1..64");
  require(cluster_tol > 0.0, "cluster_tol must be positive");
  const Index s = N.rows();
  const double norm = std::max(N.norm(), std::numeric_limits<double>::min());

  Eigen::ComplexSchur<CMatrix> schur(N);
  const CMatrix T0 = schur.matrixT();
  const CMatrix U0 = schur.matrixU();
  std::vector<cplx> ev(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) ev[static_cast<std::size_t>(i)] = T0(i, i);
  const auto clusters = cluster_eigenvalues(ev, cluster_tol);

  JordanForm jf;
  jf.P.resize(s, s);
  Index col = 0;
  for (const auto& cluster : clusters) {
    CMatrix T = T0;
    CMatrix U = U0;
    std::vector<bool> in(static_cast<std::size_t>(s), false);
    for (Index i : cluster.members) in[static_cast<std::size_t>(i)] = true;
    // Bubble the cluster's diagonal entries to the top-left, tracking membership.
    Index target = 0;
    for (Index i = 0; i < s; ++i) {
      if (!in[static_cast<std::size_t>(i)]) continue;
      for (Index k = i - 1; k >= target; --k) {
        swap_adjacent(T, U, k);
        std::swap(in[static_cast<std::size_t>(k)], in[static_cast<std::size_t>(k + 1)]);
      }
      ++target;
    }
    const Index a = static_cast<Index>(cluster.members.size());
    const CMatrix Tc = T.topLeftCorner(a, a);
    const cplx lam = Tc.trace() / static_cast<double>(a);
    const CMatrix E = Tc - lam * CMatrix::Identity(a, a);
    const auto chains = build_chains(E, norm);
    const CMatrix X = U.leftCols(a);
    for (const auto& chain : chains) {
      jf.blocks.push_back({lam, chain.vectors.size()});
      CVector head = X * chain.vectors.front();
      const cplx phase = anchor_phase(head);
      for (const auto& v : chain.vectors) jf.P.col(col++) = phase * (X * v);
    }
  }

  Eigen::PartialPivLU<CMatrix> lu(jf.P);
  if (!(lu.rcond() > 1e-14)) fail(ErrorKind::IllConditionedChain, "chain matrix is numerically singular");
  jf.Q = lu.inverse().adjoint();

  const CMatrix J = jf.J();
  for (std::size_t b = 0; b < jf.blocks.size(); ++b) {
    const auto off = static_cast<Index>(jf.offset(b));
    const auto m = static_cast<Index>(jf.blocks[b].m);
    const CMatrix Pb = jf.P.middleCols(off, m);
    const double res = (N * Pb - Pb * J.block(off, off, m, m)).norm() / std::max(1.0, Pb.norm());
    jf.residuals.push_back(res);
    if (res > 1e-6 * norm) {
      std::ostringstream msg;
      msg << "chain residual " << res << " for block (" << jf.blocks[b].lambda << ", " << m << ") exceeds 1e-6 ||N||";
      fail(ErrorKind::IllConditionedChain, msg.str());
    }
  }
  return jf;
}

JordanForm jordan_decompose(const DiscreteOperator& op, double cluster_tol) {
  require(op.square_blocks(), "jordan_decompose needs square blocks");
  JordanForm jf = jordan_decompose(op.symmetrized(), cluster_tol);
  const RVector sqrt_w = op.row_weights().cwiseSqrt();
  jf.P = sqrt_w.cwiseInverse().asDiagonal() * jf.P;
  jf.Q = sqrt_w.asDiagonal() * jf.Q;
  return jf;
}

CMatrix matrix_power_via_jordan(const JordanForm& jf, unsigned n) {
  const Index s = jf.P.rows();
  CMatrix Jn = CMatrix::Zero(s, s);
  for (std::size_t b = 0; b < jf.blocks.size(); ++b) {
    const auto off = static_cast<Index>(jf.offset(b));
    const auto m = static_cast<Index>(jf.blocks[b].m);
    Jn.block(off, off, m, m) = jordan_block_power(jf.blocks[b].lambda, jf.blocks[b].m, n);
  }
  return jf.P * Jn * jf.Q.adjoint();
}

DefectiveAsymptotic defective_asymptotic(const JordanForm& jf, unsigned n, double cluster_tol) {
  DefectiveAsymptotic out;
  for (const auto& b : jf.blocks) out.r1 = std::max(out.r1, std::abs(b.lambda));
  if (out.r1 == 0.0) fail(ErrorKind::NoSpectrum, "all eigenvalues are zero");
  std::vector<std::size_t> tier;
  for (std::size_t b = 0; b < jf.blocks.size(); ++b)
    if (std::abs(jf.blocks[b].lambda) >= (1.0 - cluster_tol) * out.r1) tier.push_back(b);
  for (std::size_t b : tier) out.M = std::max(out.M, jf.blocks[b].m);

  std::vector<std::size_t> leaders;
  for (std::size_t b : tier)
    if (jf.blocks[b].m == out.M) leaders.push_back(b);
  if (out.M >= 2) {
    for (std::size_t i = 1; i < leaders.size(); ++i) {
      const double gap = std::abs(jf.blocks[leaders[i]].lambda - jf.blocks[leaders[0]].lambda);
      if (gap > cluster_tol * out.r1) {
        std::ostringstream msg;
        msg << "distinct top-modulus eigenvalues " << jf.blocks[leaders[0]].lambda << " and "
            << jf.blocks[leaders[i]].lambda << " share the maximal block size " << out.M;
        fail(ErrorKind::UnsupportedProfile, msg.str());
      }
    }
  }
  require(n + 1 >= out.M, "defective_asymptotic needs n >= M - 1");

  const unsigned shift = n - static_cast<unsigned>(out.M) + 1;
  out.envelope = binomial(n, static_cast<long long>(out.M) - 1) * std::pow(out.r1, static_cast<double>(shift));
  out.leading = CMatrix::Zero(jf.P.rows(), jf.Q.rows());
  for (std::size_t b : leaders) {
    const auto off = static_cast<Index>(jf.offset(b));
    const cplx phase = std::polar(1.0, static_cast<double>(shift) * std::arg(jf.blocks[b].lambda));
    out.leading += phase * jf.P.col(off) * jf.Q.col(off + static_cast<Index>(out.M) - 1).adjoint();
  }
  return out;
}

Kernel lift_to_kernel(const std::vector<JordanBlock>& blocks, const std::vector<ScalarFn>& basis,
                      const QuadratureRule& rule) {
  require(!blocks.empty(), "at least one Jordan block is required");
  JordanForm shape;
  shape.blocks = blocks;
  for (const auto& b : blocks) require(b.m >= 1, "Jordan block size must be at least 1");
  const std::size_t total = shape.offset(blocks.size());
  require(basis.size() == total, "basis length must equal the total block size");
  return basis_kernel(shape.J(), basis, rule, "jordan");
}

}  // namespace fredkit
