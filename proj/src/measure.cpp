#include "fredkit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix of the
// orthonormal recurrence x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}.
// Weights use the Christoffel form w_i = 1 / sum_k p_k(x_i)^2.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mass) {
  const auto n = diag.size();
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mass;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& x = solver.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    double prev = 0.0;
    double cur = 1.0 / std::sqrt(mass);
    double sum = cur * cur;
    double log_scale = 0.0;  // sum is stored divided by exp(log_scale)
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const double back = k > 0 ? offdiag[k - 1] : 0.0;
      const double next = ((x[i] - diag[k]) * cur - back * prev) / offdiag[k];
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (sum > 1e200) {
        prev *= 1e-100;
        cur *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    // Underflowing tail weights become the smallest normal double.
    const double w = std::exp(-std::log(sum) - log_scale);
    rule.nodes[static_cast<std::size_t>(i)] = x[i];
    rule.weights[static_cast<std::size_t>(i)] = std::max(w, std::numeric_limits<double>::min());
  }
  // Renormalize total mass and enforce the reflection symmetry of
  // symmetric weight functions.
  const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
  for (double& w : rule.weights) w *= mass / total;
  const auto m = rule.nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double xs = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    const double ws = 0.5 * (rule.weights[i] + rule.weights[m - 1 - i]);
    rule.nodes[i] = -xs;
    rule.nodes[m - 1 - i] = xs;
    rule.weights[i] = rule.weights[m - 1 - i] = ws;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

void check_size(std::size_t n) {
  require(n >= 1, "rule size must be at least 1");
  require(n <= QuadratureRule::kMaxSize, "rule size exceeds the cap of 1024 nodes");
}

}  // namespace

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::GaussLegendre: return "gauss_legendre";
    case RuleKind::GaussHermiteProb: return "gauss_hermite_prob";
    case RuleKind::DiscretePoints: return "discrete";
    case RuleKind::Custom: return "custom";
  }
  return "custom";
}

RuleKind rule_kind_from_string(const std::string& name) {
  if (name == "gauss_legendre") return RuleKind::GaussLegendre;
  if (name == "gauss_hermite_prob") return RuleKind::GaussHermiteProb;
  if (name == "discrete") return RuleKind::DiscretePoints;
  if (name == "custom") return RuleKind::Custom;
  fail(ErrorKind::InvalidArgument, "unknown measure kind '" + name + "'");
}

QuadratureRule::QuadratureRule(RuleKind kind, std::vector<double> nodes, std::vector<double> weights,
                               double a, double b)
    : kind_(kind), nodes_(std::move(nodes)), weights_(std::move(weights)), a_(a), b_(b) {
  check_size(nodes_.size());
  require(nodes_.size() == weights_.size(), "nodes and weights differ in length");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    require(std::isfinite(nodes_[i]), "non-finite node");
    require(weights_[i] > 0.0 && std::isfinite(weights_[i]), "weights must be positive and finite");
    if (i > 0) require(nodes_[i] > nodes_[i - 1], "nodes must be strictly increasing");
  }
  if (kind_ == RuleKind::GaussLegendre) require(a_ < b_, "interval requires a < b");
}

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
  return sum;
}

double QuadratureRule::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

Eigen::VectorXd QuadratureRule::weight_vector(std::size_t block) const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(nodes_.size() * block));
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t a = 0; a < block; ++a) w[static_cast<Eigen::Index>(i * block + a)] = weights_[i];
  return w;
}

std::size_t QuadratureRule::find_node(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it != nodes_.end() && *it == x) return static_cast<std::size_t>(it - nodes_.begin());
  return nodes_.size();
}

nlohmann::json QuadratureRule::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["nodes"] = nodes_;
  j["weights"] = weights_;
  if (kind_ == RuleKind::GaussLegendre) {
    j["a"] = a_;
    j["b"] = b_;
  }
  return j;
}

QuadratureRule QuadratureRule::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "measure JSON needs a 'kind'");
  const RuleKind kind = rule_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("nodes")) {
    auto nodes = j.at("nodes").get<std::vector<double>>();
    auto weights = j.at("weights").get<std::vector<double>>();
    if (kind == RuleKind::DiscretePoints) return discrete_measure(std::move(nodes), std::move(weights));
    return QuadratureRule(kind, std::move(nodes), std::move(weights), j.value("a", 0.0), j.value("b", 0.0));
  }
  if (j.contains("points")) {
    return discrete_measure(j.at("points").get<std::vector<double>>(),
                            j.at("weights").get<std::vector<double>>());
  }
  const auto n = j.at("n").get<long long>();
  require(n >= 1, "rule size must be at least 1");
  switch (kind) {
    case RuleKind::GaussLegendre:
      return gauss_legendre(static_cast<std::size_t>(n), j.value("a", -1.0), j.value("b", 1.0));
    case RuleKind::GaussHermiteProb:
      return gauss_hermite_prob(static_cast<std::size_t>(n));
    default:
      fail(ErrorKind::InvalidArgument, "measure kind '" + to_string(kind) + "' needs explicit nodes and weights");
  }
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  check_size(n);
  require(a < b, "gauss_legendre requires a < b");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd off(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index k = 1; k < m; ++k) {
    const double kd = static_cast<double>(k);
    off[k - 1] = kd / std::sqrt(4.0 * kd * kd - 1.0);
  }
  GaussRule ref = golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < n; ++i) {
    ref.nodes[i] = mid + half * ref.nodes[i];
    ref.weights[i] *= half;
  }
  return QuadratureRule(RuleKind::GaussLegendre, std::move(ref.nodes), std::move(ref.weights), a, b);
}

QuadratureRule gauss_hermite_prob(std::size_t n) {
  check_size(n);
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd off(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index k = 1; k < m; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
  GaussRule ref = golub_welsch(diag, off, 1.0);
  return QuadratureRule(RuleKind::GaussHermiteProb, std::move(ref.nodes), std::move(ref.weights));
}

QuadratureRule discrete_measure(std::vector<double> points, std::vector<double> weights) {
  require(points.size() == weights.size(), "points and weights differ in length");
  check_size(points.size());
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return points[i] < points[j]; });
  std::vector<double> nodes, ws;
  for (std::size_t i : order) {
    require(weights[i] > 0.0, "discrete measure weights must be positive");
    if (!nodes.empty()) require(points[i] != nodes.back(), "duplicate point in discrete measure");
    nodes.push_back(points[i]);
    ws.push_back(weights[i]);
  }
  return QuadratureRule(RuleKind::DiscretePoints, std::move(nodes), std::move(ws));
}

}  // namespace fredkit
