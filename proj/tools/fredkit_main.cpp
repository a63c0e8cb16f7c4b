#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "fredkit/config.hpp"
#include "fredkit/error.hpp"

namespace {

constexpr int kUsageError = 2;

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}; }

void configure_threads() {
  const char* env = std::getenv("FREDKIT_THREADS");
  if (!env) return;
  try {
    const int threads = std::stoi(env);
    Eigen::setNbThreads(threads <= 0 ? 1 : threads);
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring FREDKIT_THREADS='" << env << "'\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom toolkit for integral operators: spectra, Jordan forms, SVD, resolvents, determinants"};
  std::string command;
  std::string config_path;
  std::string kernel_json;
  std::string measure_json;
  std::string lambda_text;
  std::string rhs;
  std::string grid_text;
  std::optional<std::size_t> k;
  std::optional<double> tol;
  std::optional<std::size_t> nmax;
  std::optional<unsigned> n;
  std::string format;
  std::string output;
  std::string export_dir;
  std::string dump_dir;

  app.add_option("command", command, "eig | djf | jordan | svd | solve | det | iterate | powerit | trace | validate")
      ->check(CLI::IsMember(fredkit::known_commands()));
  app.add_option("--config,-c", config_path, "JSON run config file, or - for stdin");
  app.add_option("--kernel", kernel_json, "JSON object replacing the config's kernel section");
  app.add_option("--measure", measure_json, "JSON object replacing the config's measure section");
  app.add_option("--lambda", lambda_text, "spectral parameter RE or RE,IM");
  app.add_option("--rhs", rhs, "CSV file with the right-hand side node values");
  app.add_option("--lambda-grid", grid_text, "real grid a:b:steps for det");
  app.add_option("--k", k, "number of eigenpairs for powerit");
  app.add_option("--tol", tol, "convergence tolerance");
  app.add_option("--nmax", nmax, "iteration cap");
  app.add_option("--n", n, "iterate / power exponent");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output,-o", output, "output file, - for stdout");
  app.add_option("--export-dir", export_dir, "directory for CSV exports of eigenvector matrices");
  app.add_option("--dump-operator", dump_dir, "directory for CSV dumps of K, A, B and the weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  fredkit::RunConfig config;
  try {
    nlohmann::json doc = nlohmann::json::object();
    if (config_path == "-") {
      doc = nlohmann::json::parse(read_all(std::cin));
    } else if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "usage error: cannot open config " << config_path << '\n';
        return kUsageError;
      }
      doc = nlohmann::json::parse(read_all(in));
    }
    if (!kernel_json.empty()) doc["kernel"] = nlohmann::json::parse(kernel_json);
    if (!measure_json.empty()) doc["measure"] = nlohmann::json::parse(measure_json);
    config = fredkit::parse_config(doc);
    if (!command.empty()) config.command = command;
    auto& p = config.params;
    if (!lambda_text.empty()) p.lambda = fredkit::parse_complex(lambda_text);
    if (!grid_text.empty()) p.lambda_grid = fredkit::parse_lambda_grid(grid_text);
    if (!rhs.empty()) p.rhs = rhs;
    if (k) p.k = *k;
    if (tol) p.tol = *tol;
    if (nmax) p.nmax = *nmax;
    if (n) p.n = *n;
    if (!format.empty()) config.output.format = format;
    if (!output.empty()) config.output.destination = output;
    if (!export_dir.empty()) p.export_dir = export_dir;
    if (!dump_dir.empty()) p.dump_operator = dump_dir;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: malformed JSON: " << e.what() << '\n' << app.help();
    return kUsageError;
  } catch (const fredkit::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n' << app.help();
    return kUsageError;
  }

  configure_threads();
  return fredkit::run(config, std::cout, std::cerr);
}
