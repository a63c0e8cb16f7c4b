#include "fredkit/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fredkit/error.hpp"
#include "fredkit/fredholm.hpp"
#include "fredkit/io.hpp"
#include "fredkit/nystrom.hpp"
#include "fredkit/operator_svd.hpp"
#include "fredkit/power.hpp"
#include "fredkit/spectral.hpp"

namespace fredkit {

namespace {

using nlohmann::json;

const std::set<std::string> kKernelNames{"mehler", "separable", "jordan", "grid"};
const std::set<std::string> kMeasureKinds{"gauss_legendre", "gauss_hermite_prob", "discrete"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::InvalidArgument, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(ErrorKind::InvalidArgument, "unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

KernelSpec parse_kernel(const json& j) {
  check_keys(j, {"name", "r", "terms", "blocks", "path"}, "kernel");
  KernelSpec k;
  k.name = j.at("name").get<std::string>();
  k.r = get_or(j, "r", k.r);
  if (j.contains("terms")) {
    for (const auto& t : j.at("terms")) {
      check_keys(t, {"coefficient", "right", "left"}, "kernel term");
      SeparableTermSpec term;
      if (t.contains("coefficient")) term.coefficient = complex_from_json(t.at("coefficient"));
      term.right = t.at("right").get<std::vector<double>>();
      term.left = t.at("left").get<std::vector<double>>();
      k.terms.push_back(std::move(term));
    }
  }
  if (j.contains("blocks")) {
    for (const auto& b : j.at("blocks")) {
      check_keys(b, {"lambda", "m"}, "jordan block");
      const auto m = b.at("m").get<long long>();
      if (m < 0) fail(ErrorKind::InvalidArgument, "jordan block size must be non-negative");
      k.blocks.push_back({complex_from_json(b.at("lambda")), static_cast<std::size_t>(m)});
    }
  }
  k.path = get_or<std::string>(j, "path", "");
  return k;
}

MeasureSpec parse_measure(const json& j) {
  check_keys(j, {"kind", "n", "a", "b", "points", "nodes", "weights"}, "measure");
  MeasureSpec m;
  m.kind = j.at("kind").get<std::string>();
  const auto n = get_or<long long>(j, "n", 0);
  if (n < 0) fail(ErrorKind::InvalidArgument, "measure size must be non-negative");
  m.n = static_cast<std::size_t>(n);
  m.a = get_or(j, "a", m.a);
  m.b = get_or(j, "b", m.b);
  if (j.contains("points")) m.points = j.at("points").get<std::vector<double>>();
  if (j.contains("nodes")) m.points = j.at("nodes").get<std::vector<double>>();
  if (j.contains("weights")) m.weights = j.at("weights").get<std::vector<double>>();
  return m;
}

CommandParams parse_params(const json& j) {
  check_keys(j, {"lambda", "lambda_grid", "rhs", "n", "k", "tol", "nmax", "export_dir", "dump_operator"}, "params");
  CommandParams p;
  if (j.contains("lambda")) p.lambda = complex_from_json(j.at("lambda"));
  if (j.contains("lambda_grid")) {
    const auto& g = j.at("lambda_grid");
    if (g.is_string()) {
      p.lambda_grid = parse_lambda_grid(g.get<std::string>());
    } else {
      check_keys(g, {"start", "stop", "steps"}, "lambda_grid");
      LambdaGrid grid;
      grid.start = g.at("start").get<double>();
      grid.stop = g.at("stop").get<double>();
      const auto steps = g.at("steps").get<long long>();
      if (steps < 0) fail(ErrorKind::InvalidArgument, "lambda_grid steps must be non-negative");
      grid.steps = static_cast<std::size_t>(steps);
      p.lambda_grid = grid;
    }
  }
  p.rhs = get_or<std::string>(j, "rhs", "");
  const auto n = get_or<long long>(j, "n", p.n);
  const auto k = get_or<long long>(j, "k", static_cast<long long>(p.k));
  const auto nmax = get_or<long long>(j, "nmax", static_cast<long long>(p.nmax));
  if (n < 0 || k < 0 || nmax < 0) fail(ErrorKind::InvalidArgument, "n, k and nmax must be non-negative");
  p.n = static_cast<unsigned>(n);
  p.k = static_cast<std::size_t>(k);
  p.nmax = static_cast<std::size_t>(nmax);
  p.tol = get_or(j, "tol", p.tol);
  p.export_dir = get_or<std::string>(j, "export_dir", "");
  p.dump_operator = get_or<std::string>(j, "dump_operator", "");
  return p;
}

// Result of one command: a JSON document and the equivalent CSV table.
struct Artifact {
  json doc;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_complex(cplx z) { return '"' + format_double(z.real()) + ',' + format_double(z.imag()) + '"'; }

json complex_list(const std::vector<cplx>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(complex_json(v));
  return out;
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

Artifact spectrum_artifact(const BiSpectralDecomposition& d) {
  Artifact a;
  a.doc = spectral_json(d);
  a.header = {"index", "eigenvalue"};
  for (std::size_t j = 0; j < d.eigenvalues.size(); ++j)
    a.rows.push_back({std::to_string(j + 1), csv_complex(d.eigenvalues[j])});
  return a;
}

CVector load_rhs(const std::string& path, Eigen::Index size) {
  if (path.empty()) return CVector::Ones(size);
  const CMatrix m = read_complex_csv_file(path);
  if (m.size() != size) {
    std::ostringstream msg;
    msg << "right-hand side has " << m.size() << " entries, the operator needs " << size;
    fail(ErrorKind::InvalidArgument, msg.str());
  }
  CVector f(size);
  for (Eigen::Index i = 0; i < size; ++i) f[i] = m(i / m.cols(), i % m.cols());
  return f;
}

std::vector<double> grid_points(const LambdaGrid& g) {
  std::vector<double> out;
  if (g.steps == 1) return {g.start};
  for (std::size_t i = 0; i < g.steps; ++i)
    out.push_back(g.start + (g.stop - g.start) * static_cast<double>(i) / static_cast<double>(g.steps - 1));
  return out;
}

Artifact execute(const RunConfig& config, const Kernel& kernel, const DiscreteOperator& op) {
  const auto& p = config.params;
  const std::string& cmd = config.command;
  Artifact a;
  if (cmd == "eig" || cmd == "djf") {
    const auto d = cmd == "eig" ? hermitian_eig(op) : djf_eig(op);
    a = spectrum_artifact(d);
    if (!p.export_dir.empty()) export_matrices(p.export_dir, {{"P", d.right}, {"Q", d.left}});
  } else if (cmd == "jordan") {
    const auto jf = jordan_decompose(op);
    a.doc = jordan_json(jf);
    a.header = {"block", "lambda", "m", "residual"};
    for (std::size_t b = 0; b < jf.blocks.size(); ++b)
      a.rows.push_back({std::to_string(b + 1), csv_complex(jf.blocks[b].lambda), std::to_string(jf.blocks[b].m),
                        format_double(jf.residuals[b])});
    if (!p.export_dir.empty()) export_matrices(p.export_dir, {{"P", jf.P}, {"Q", jf.Q}});
  } else if (cmd == "svd") {
    const auto svd = operator_svd(op);
    a.doc = svd_json(svd);
    a.header = {"index", "singular_value"};
    for (std::size_t j = 0; j < svd.singular_values.size(); ++j)
      a.rows.push_back({std::to_string(j + 1), format_double(svd.singular_values[j])});
    if (!p.export_dir.empty()) export_matrices(p.export_dir, {{"left", svd.left}, {"right", svd.right}});
  } else if (cmd == "solve") {
    const CVector f = load_rhs(p.rhs, op.nystrom().cols());
    const auto sol = resolvent_solve(op, *p.lambda, f);
    a.doc = {{"lambda", complex_json(sol.lambda)},
             {"residual", sol.residual},
             {"nearest_eigen_gap", sol.nearest_eigen_gap},
             {"nodes", op.rule().nodes()},
             {"solution", vector_json(sol.solution)}};
    a.header = {"row", "solution"};
    for (Eigen::Index i = 0; i < sol.solution.size(); ++i)
      a.rows.push_back({std::to_string(i + 1), csv_complex(sol.solution[i])});
  } else if (cmd == "det") {
    std::vector<cplx> lambdas;
    if (p.lambda_grid)
      for (double t : grid_points(*p.lambda_grid)) lambdas.emplace_back(t, 0.0);
    if (p.lambda) lambdas.push_back(*p.lambda);
    std::vector<cplx> values;
    a.header = {"lambda", "re", "im"};
    for (const auto& l : lambdas) {
      const cplx D = fredholm_determinant(op, l).value;
      values.push_back(D);
      a.rows.push_back({l.imag() == 0.0 ? format_double(l.real()) : csv_complex(l), format_double(D.real()),
                        format_double(D.imag())});
    }
    a.doc = {{"lambda", complex_list(lambdas)}, {"determinant", complex_list(values)}};
  } else if (cmd == "iterate") {
    const auto d = djf_eig(op);
    const auto profile = asymptotic_profile(d);
    const auto approx = power_approx(d, profile, p.n);
    const CMatrix exact = iterated_kernel(op, p.n);
    const double norm = kernel_l2_norm(exact, op.row_weights(), op.col_weights());
    const double error = kernel_l2_norm(exact - approx.approx, op.row_weights(), op.col_weights());
    a.doc = {{"n", p.n},           {"r1", profile.r1},    {"r0", profile.r0},
             {"R", profile.R},     {"norm", norm},        {"error", error},
             {"bound", approx.error_bound}};
    a.header = {"n", "norm", "error", "bound"};
    a.rows.push_back({std::to_string(p.n), format_double(norm), format_double(error), format_double(approx.error_bound)});
  } else if (cmd == "powerit") {
    const auto trace = power_ratio_estimate(op, CVector::Ones(op.nystrom().cols()), p.nmax, p.tol);
    const auto seq = sequential_spectrum(op, p.k, p.nmax, p.tol);
    std::vector<cplx> estimates;
    for (const auto& s : seq.stages) estimates.push_back(s.nu);
    a.doc = {{"ratios", complex_list(trace.ratios)},
             {"pointwise_ratios", complex_list(trace.pointwise_ratios)},
             {"converged", trace.converged},
             {"iterations_used", trace.iterations_used},
             {"estimates", complex_list(estimates)},
             {"complete", seq.complete}};
    if (!trace.warning.empty()) a.doc["warning"] = trace.warning;
    if (!seq.complete) a.doc["failure"] = seq.failure;
    a.header = {"stage", "estimate"};
    for (std::size_t j = 0; j < estimates.size(); ++j)
      a.rows.push_back({std::to_string(j + 1), csv_complex(estimates[j])});
  } else if (cmd == "trace") {
    const auto svd = operator_svd(op);
    const double value = trace_power(svd, p.n);
    const double direct = trace_power_direct(op, p.n);
    a.doc = {{"n", p.n}, {"trace_power", value}, {"direct", direct}};
    a.header = {"n", "trace_power", "direct"};
    a.rows.push_back({std::to_string(p.n), format_double(value), format_double(direct)});
  }
  a.doc["command"] = cmd;
  a.doc["kernel"] = kernel.name();
  a.doc["nodes_count"] = op.rule().size();
  return a;
}

void emit(const Artifact& a, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    for (std::size_t i = 0; i < a.header.size(); ++i) out << (i ? "," : "") << a.header[i];
    out << '\n';
    for (const auto& row : a.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
  } else {
    out << dump_json(a.doc) << '\n';
  }
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names{"eig",  "djf",     "jordan",  "svd",   "solve",
                                              "det",  "iterate", "powerit", "trace", "validate"};
  return names;
}

LambdaGrid parse_lambda_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) fail(ErrorKind::InvalidArgument, "lambda grid must look like a:b:steps, got '" + text + "'");
  LambdaGrid g;
  try {
    std::size_t used = 0;
    g.start = std::stod(parts[0]);
    g.stop = std::stod(parts[1]);
    const long long steps = std::stoll(parts[2], &used);
    if (used != parts[2].size() || steps < 0) throw std::invalid_argument("steps");
    g.steps = static_cast<std::size_t>(steps);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "lambda grid must look like a:b:steps, got '" + text + "'");
  }
  return g;
}

cplx parse_complex(const std::string& text) {
  try {
    const auto comma = text.find(',');
    if (comma == std::string::npos) return std::stod(text);
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "expected RE or RE,IM, got '" + text + "'");
  }
}

RunConfig parse_config(const json& j) {
  try {
    check_keys(j, {"kernel", "measure", "command", "params", "output"}, "config");
    RunConfig c;
    if (!j.contains("kernel")) fail(ErrorKind::InvalidArgument, "config needs a 'kernel' section");
    if (!j.contains("measure")) fail(ErrorKind::InvalidArgument, "config needs a 'measure' section");
    c.kernel = parse_kernel(j.at("kernel"));
    c.measure = parse_measure(j.at("measure"));
    c.command = get_or<std::string>(j, "command", "");
    if (j.contains("params")) c.params = parse_params(j.at("params"));
    if (j.contains("output")) {
      check_keys(j.at("output"), {"format", "destination"}, "output");
      c.output.format = get_or<std::string>(j.at("output"), "format", c.output.format);
      c.output.destination = get_or<std::string>(j.at("output"), "destination", c.output.destination);
    }
    return c;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed config: ") + e.what());
  }
}

json serialize_config(const RunConfig& c) {
  json kernel{{"name", c.kernel.name}};
  if (c.kernel.name == "mehler" || c.kernel.r != KernelSpec{}.r) kernel["r"] = c.kernel.r;
  if (!c.kernel.terms.empty()) {
    json terms = json::array();
    for (const auto& t : c.kernel.terms)
      terms.push_back({{"coefficient", complex_json(t.coefficient)}, {"right", t.right}, {"left", t.left}});
    kernel["terms"] = terms;
  }
  if (!c.kernel.blocks.empty()) {
    json blocks = json::array();
    for (const auto& b : c.kernel.blocks) blocks.push_back({{"lambda", complex_json(b.lambda)}, {"m", b.m}});
    kernel["blocks"] = blocks;
  }
  if (!c.kernel.path.empty()) kernel["path"] = c.kernel.path;

  json measure{{"kind", c.measure.kind}, {"n", c.measure.n}, {"a", c.measure.a}, {"b", c.measure.b}};
  if (!c.measure.points.empty()) measure["points"] = c.measure.points;
  if (!c.measure.weights.empty()) measure["weights"] = c.measure.weights;

  const auto& p = c.params;
  json params{{"n", p.n}, {"k", p.k}, {"tol", p.tol}, {"nmax", p.nmax}};
  if (p.lambda) params["lambda"] = complex_json(*p.lambda);
  if (p.lambda_grid)
    params["lambda_grid"] = {{"start", p.lambda_grid->start}, {"stop", p.lambda_grid->stop}, {"steps", p.lambda_grid->steps}};
  if (!p.rhs.empty()) params["rhs"] = p.rhs;
  if (!p.export_dir.empty()) params["export_dir"] = p.export_dir;
  if (!p.dump_operator.empty()) params["dump_operator"] = p.dump_operator;

  return {{"kernel", kernel},
          {"measure", measure},
          {"command", c.command},
          {"params", params},
          {"output", {{"format", c.output.format}, {"destination", c.output.destination}}}};
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> v;
  const auto& m = c.measure;
  if (!kMeasureKinds.count(m.kind)) {
    v.push_back("measure.kind '" + m.kind + "' is not one of gauss_legendre, gauss_hermite_prob, discrete");
  } else if (m.kind == "discrete") {
    if (m.points.empty()) v.push_back("measure.points must be non-empty for a discrete measure");
    if (m.points.size() != m.weights.size()) v.push_back("measure.points and measure.weights differ in length");
    if (m.points.size() > QuadratureRule::kMaxSize) v.push_back("measure.points exceeds 1024 entries");
    for (double w : m.weights)
      if (!(w > 0.0)) {
        v.push_back("measure.weights must be strictly positive");
        break;
      }
    std::set<double> seen(m.points.begin(), m.points.end());
    if (seen.size() != m.points.size()) v.push_back("measure.points must be distinct");
  } else {
    if (m.n < 1 || m.n > QuadratureRule::kMaxSize) v.push_back("measure.n must be in 1..1024");
    if (m.kind == "gauss_legendre" && !(m.a < m.b)) v.push_back("measure.a must be below measure.b");
  }
  const std::size_t nodes = m.kind == "discrete" ? m.points.size() : m.n;

  const auto& k = c.kernel;
  if (!kKernelNames.count(k.name)) {
    v.push_back("kernel.name '" + k.name + "' is not one of mehler, separable, jordan, grid");
  } else if (k.name == "mehler") {
    if (!(std::abs(k.r) < 1.0)) v.push_back("kernel.r must satisfy |r| < 1");
  } else if (k.name == "separable") {
    if (k.terms.empty()) v.push_back("kernel.terms must be non-empty");
    for (const auto& t : k.terms)
      if (t.right.empty() || t.left.empty()) {
        v.push_back("kernel.terms polynomials need at least one coefficient");
        break;
      }
  } else if (k.name == "jordan") {
    std::size_t total = 0;
    for (const auto& b : k.blocks) {
      if (b.m < 1) v.push_back("kernel.blocks sizes must be at least 1");
      total += b.m;
    }
    if (k.blocks.empty()) v.push_back("kernel.blocks must be non-empty");
    if (total > nodes) v.push_back("kernel.blocks total size exceeds the number of measure nodes");
  } else if (k.name == "grid") {
    if (k.path.empty() || !std::filesystem::exists(k.path)) v.push_back("kernel.path '" + k.path + "' does not exist");
  }

  const auto& commands = known_commands();
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    v.push_back("command '" + c.command + "' is not a known command");
  const auto& p = c.params;
  if (c.command == "solve" && !p.lambda) v.push_back("params.lambda is required for solve");
  if (c.command == "det" && !p.lambda && !p.lambda_grid) v.push_back("params.lambda or params.lambda_grid is required for det");
  if (p.lambda_grid && p.lambda_grid->steps < 1) v.push_back("params.lambda_grid steps must be at least 1");
  if (!p.rhs.empty() && !std::filesystem::exists(p.rhs)) v.push_back("params.rhs '" + p.rhs + "' does not exist");
  if (c.command == "iterate" && p.n < 1) v.push_back("params.n must be at least 1 for iterate");
  if (p.k < 1) v.push_back("params.k must be at least 1");
  if (!(p.tol > 0.0)) v.push_back("params.tol must be positive");
  if (p.nmax < 1) v.push_back("params.nmax must be at least 1");
  if (c.output.format != "json" && c.output.format != "csv") v.push_back("output.format must be json or csv");
  if (c.output.destination.empty()) v.push_back("output.destination must be '-' or a file path");
  return v;
}

QuadratureRule build_rule(const MeasureSpec& spec) {
  if (spec.kind == "gauss_legendre") return gauss_legendre(spec.n, spec.a, spec.b);
  if (spec.kind == "gauss_hermite_prob") return gauss_hermite_prob(spec.n);
  if (spec.kind == "discrete") return discrete_measure(spec.points, spec.weights);
  fail(ErrorKind::InvalidArgument, "unknown measure kind '" + spec.kind + "'");
}

Kernel build_kernel(const KernelSpec& spec, const QuadratureRule& rule) {
  if (spec.name == "mehler") return mehler_kernel(spec.r);
  if (spec.name == "separable") {
    std::vector<cplx> coeffs;
    std::vector<ScalarFn> rights, lefts;
    for (const auto& t : spec.terms) {
      coeffs.push_back(t.coefficient);
      rights.push_back(polynomial(t.right));
      lefts.push_back(polynomial(t.left));
    }
    return separable_kernel(coeffs, rights, lefts);
  }
  if (spec.name == "jordan") {
    std::size_t total = 0;
    for (const auto& b : spec.blocks) total += b.m;
    return lift_to_kernel(spec.blocks, orthonormal_polynomials(rule, total), rule);
  }
  if (spec.name == "grid") return grid_kernel(rule, read_complex_csv_file(spec.path));
  fail(ErrorKind::InvalidArgument, "unknown kernel '" + spec.name + "'");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto violations = validate(config);
  if (config.command == "validate") {
    emit({json{{"violations", violations}, {"valid", violations.empty()}}, {"violation"}, {}}, "json", out);
    return 0;
  }
  if (!violations.empty()) {
    for (const auto& v : violations) err << "invalid config: " << v << '\n';
    return 2;
  }
  try {
    const auto rule = build_rule(config.measure);
    const auto kernel = build_kernel(config.kernel, rule);
    const auto op = discretize(kernel, rule);
    for (const auto& w : op.warnings()) err << "warning: " << w << '\n';
    if (!config.params.dump_operator.empty()) {
      CMatrix weights = op.row_weights().cast<cplx>();
      export_matrices(config.params.dump_operator,
                      {{"samples", op.samples()}, {"nystrom", op.nystrom()}, {"symmetrized", op.symmetrized()},
                       {"weights", weights}});
    }
    const Artifact artifact = execute(config, kernel, op);
    if (config.output.destination == "-") {
      emit(artifact, config.output.format, out);
    } else {
      std::ofstream file(config.output.destination);
      if (!file) fail(ErrorKind::InvalidArgument, "cannot write " + config.output.destination);
      emit(artifact, config.output.format, file);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << to_string(ErrorKind::EvaluationError) << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fredkit
