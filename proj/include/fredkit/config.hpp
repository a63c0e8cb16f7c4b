#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fredkit/jordan.hpp"
#include "fredkit/kernel.hpp"
#include "fredkit/linalg.hpp"
#include "fredkit/measure.hpp"

namespace fredkit {

/// coefficient * right(y) * conj(left(z)) with polynomial factors given by
/// ascending coefficient lists.
struct SeparableTermSpec {
  cplx coefficient = 1.0;
  std::vector<double> right;
  std::vector<double> left;

  bool operator==(const SeparableTermSpec&) const = default;
};

/// name: mehler | separable | jordan | grid
struct KernelSpec {
  std::string name;
  double r = 0.5;
  std::vector<SeparableTermSpec> terms;
  std::vector<JordanBlock> blocks;
  std::string path;

  bool operator==(const KernelSpec&) const = default;
};

/// kind: gauss_legendre | gauss_hermite_prob | discrete
struct MeasureSpec {
  std::string kind;
  std::size_t n = 0;
  double a = 0.0;
  double b = 1.0;
  std::vector<double> points;
  std::vector<double> weights;

  bool operator==(const MeasureSpec&) const = default;
};

struct LambdaGrid {
  double start = 0.0;
  double stop = 1.0;
  std::size_t steps = 1;

  bool operator==(const LambdaGrid&) const = default;
};

struct CommandParams {
  std::optional<cplx> lambda;
  std::optional<LambdaGrid> lambda_grid;
  std::string rhs;
  unsigned n = 1;
  std::size_t k = 3;
  double tol = 1e-10;
  std::size_t nmax = 500;
  std::string export_dir;
  std::string dump_operator;

  bool operator==(const CommandParams&) const = default;
};

struct OutputSpec {
  std::string format = "json";
  std::string destination = "-";

  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  KernelSpec kernel;
  MeasureSpec measure;
  std::string command;
  CommandParams params;
  OutputSpec output;

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& known_commands();

/// Throws Error(InvalidArgument) on structurally malformed documents.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json serialize_config(const RunConfig& config);

/// "a:b:steps"
LambdaGrid parse_lambda_grid(const std::string& text);
/// "re,im" or "re"
cplx parse_complex(const std::string& text);

/// Static checks only; one message per violated constraint.
std::vector<std::string> validate(const RunConfig& config);

QuadratureRule build_rule(const MeasureSpec& spec);
Kernel build_kernel(const KernelSpec& spec, const QuadratureRule& rule);

/// Runs the configured command, writing the artifact to `out` (or to
/// config.output.destination when it is not "-") and diagnostics to `err`.
/// Returns 0 on success, 1 on computation errors, 2 on invalid configs.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fredkit
