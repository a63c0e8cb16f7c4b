#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fredkit {

enum class RuleKind { GaussLegendre, GaussHermiteProb, DiscretePoints, Custom };

std::string to_string(RuleKind kind);
RuleKind rule_kind_from_string(const std::string& name);

/// A weighted point set standing in for the measure mu on a subset of R.
/// Nodes are strictly increasing and weights strictly positive.
class QuadratureRule {
 public:
  static constexpr std::size_t kMaxSize = 1024;

  QuadratureRule(RuleKind kind, std::vector<double> nodes, std::vector<double> weights,
                 double a = 0.0, double b = 0.0);

  RuleKind kind() const { return kind_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Interval endpoints; meaningful for GaussLegendre only.
  double lower() const { return a_; }
  double upper() const { return b_; }

  double integrate(const std::function<double(double)>& f) const;
  double total_mass() const;

  /// Weights repeated `block` times per node (node-major), as a vector.
  Eigen::VectorXd weight_vector(std::size_t block = 1) const;

  /// Index of the node exactly equal to x, or size() when absent.
  std::size_t find_node(double x) const;

  bool operator==(const QuadratureRule&) const = default;

  nlohmann::json to_json() const;
  static QuadratureRule from_json(const nlohmann::json& j);

 private:
  RuleKind kind_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double a_;
  double b_;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// n-point Gauss rule for the standard normal density (probabilists' Hermite).
QuadratureRule gauss_hermite_prob(std::size_t n);

/// Literal weighted point set; points need not be sorted but must be distinct.
QuadratureRule discrete_measure(std::vector<double> points, std::vector<double> weights);

}  // namespace fredkit
