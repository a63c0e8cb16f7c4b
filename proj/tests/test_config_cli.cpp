#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"

using namespace fredkit;
using nlohmann::json;

namespace {

RunConfig random_config(std::mt19937& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> small(1, 4);
  RunConfig c;
  const char* names[] = {"mehler", "separable", "jordan", "grid"};
  c.kernel.name = names[pick(rng)];
  if (c.kernel.name == "mehler") c.kernel.r = 0.9 * u(rng);
  if (c.kernel.name == "separable")
    for (int t = small(rng); t > 0; --t) {
      SeparableTermSpec s;
      s.coefficient = cplx(u(rng), pick(rng) == 0 ? u(rng) : 0.0);
      for (int i = small(rng); i > 0; --i) s.right.push_back(u(rng));
      for (int i = small(rng); i > 0; --i) s.left.push_back(u(rng));
      c.kernel.terms.push_back(s);
    }
  if (c.kernel.name == "jordan")
    for (int t = small(rng); t > 0; --t)
      c.kernel.blocks.push_back({cplx(u(rng), u(rng)), static_cast<std::size_t>(small(rng))});
  if (c.kernel.name == "grid") c.kernel.path = "table_" + std::to_string(pick(rng)) + ".csv";

  const char* kinds[] = {"gauss_legendre", "gauss_hermite_prob", "discrete"};
  c.measure.kind = kinds[pick(rng) % 3];
  c.measure.n = static_cast<std::size_t>(small(rng) * 7);
  c.measure.a = u(rng) - 2.0;
  c.measure.b = u(rng) + 2.0;
  if (c.measure.kind == "discrete")
    for (int i = small(rng); i > 0; --i) {
      c.measure.points.push_back(u(rng));
      c.measure.weights.push_back(std::abs(u(rng)) + 0.1);
    }
  c.command = known_commands()[static_cast<std::size_t>(pick(rng) * 2)];
  if (pick(rng) < 2) c.params.lambda = cplx(u(rng), u(rng));
  if (pick(rng) == 0) c.params.lambda_grid = LambdaGrid{u(rng), u(rng) + 3.0, static_cast<std::size_t>(small(rng))};
  c.params.n = static_cast<unsigned>(small(rng));
  c.params.k = static_cast<std::size_t>(small(rng));
  c.params.tol = std::pow(10.0, -small(rng) * 3);
  c.params.nmax = static_cast<std::size_t>(small(rng) * 100);
  if (pick(rng) == 0) c.params.export_dir = "out_dir";
  c.output.format = pick(rng) % 2 ? "json" : "csv";
  if (pick(rng) == 0) c.output.destination = "result.json";
  return c;
}

RunConfig yz_config(const std::string& command) {
  RunConfig c;
  c.kernel.name = "separable";
  c.kernel.terms = {{1.0, {0, 1}, {0, 1}}};
  c.measure = {"gauss_legendre", 8, 0.0, 1.0, {}, {}};
  c.command = command;
  return c;
}

#ifdef FREDKIT_CLI_PATH
int cli(const std::string& args, std::string* out_text = nullptr) {
  const auto dir = std::filesystem::temp_directory_path() / "fredkit_cli_test";
  std::filesystem::create_directories(dir);
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string(FREDKIT_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  if (out_text) {
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    *out_text = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const json& j) {
  const auto path = std::filesystem::temp_directory_path() / "fredkit_cli_test" / name;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << j.dump(2);
  return path.string();
}
#endif

}  // namespace

TEST_CASE("config round trip") {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto c = random_config(rng);
    const auto text = dump_json(serialize_config(c));
    const auto back = parse_config(json::parse(text));
    CHECK(back == c);
    CHECK(dump_json(serialize_config(back)) == text);
  }
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(parse_config(json::parse(R"({"kernel":{"name":"mehler"}})")), Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"kernel":{"name":"mehler"},"measure":{"kind":"gauss_legendre"},"bogus":1})")),
                  Error);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"kernel":{"name":3},"measure":{}})")), Error);
  CHECK_THROWS_AS(parse_lambda_grid("0:1"), Error);
  CHECK_THROWS_AS(parse_lambda_grid("0:1:x"), Error);
  CHECK(parse_lambda_grid("0:2:5") == LambdaGrid{0.0, 2.0, 5});
  CHECK(parse_complex("1.5,-2") == cplx(1.5, -2.0));
  CHECK(parse_complex("3") == cplx(3.0));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
}

TEST_CASE("validation") {
  auto c = yz_config("eig");
  CHECK(validate(c).empty());
  c.measure.n = 0;
  CHECK(validate(c).size() == 1);

  RunConfig m;
  m.kernel.name = "mehler";
  m.kernel.r = 1.0;
  m.measure = {"gauss_hermite_prob", 20, 0, 1, {}, {}};
  m.command = "eig";
  CHECK(validate(m).size() == 1);
  m.kernel.r = -0.99;
  CHECK(validate(m).empty());

  auto s = yz_config("solve");
  CHECK(validate(s).size() == 1);
  s.params.lambda = cplx(1.0);
  CHECK(validate(s).empty());

  RunConfig d;
  d.kernel.name = "separable";
  d.kernel.terms = {{1.0, {1}, {1}}};
  d.measure = {"discrete", 0, 0, 1, {0.0, 0.0}, {1.0, -1.0}};
  d.command = "eig";
  CHECK(validate(d).size() == 2);

  std::ostringstream out, err;
  auto bad = yz_config("eig");
  bad.measure.n = 0;
  CHECK(run(bad, out, err) == 2);
  bad.command = "validate";
  std::ostringstream vout;
  CHECK(run(bad, vout, err) == 0);
  CHECK(json::parse(vout.str())["valid"] == false);
}

TEST_CASE("run is deterministic") {
  for (const char* cmd : {"eig", "djf", "svd", "powerit", "trace", "jordan"}) {
    CAPTURE(cmd);
    const auto c = yz_config(cmd);
    std::ostringstream a, b, err;
    CHECK(run(c, a, err) == 0);
    CHECK(run(c, b, err) == 0);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("run outputs") {
  std::ostringstream out, err;
  auto c = yz_config("eig");
  REQUIRE(run(c, out, err) == 0);
  const auto doc = json::parse(out.str());
  CHECK(std::abs(complex_from_json(doc["eigenvalues"][0]) - 1.0 / 3.0) < 1e-12);

  auto solve = yz_config("solve");
  solve.params.lambda = cplx(3.0);
  std::ostringstream sout, serr;
  CHECK(run(solve, sout, serr) == 1);
  CHECK(serr.str().find("error: ") == 0);
  CHECK(serr.str().find("eigenvalue") != std::string::npos);
}

TEST_CASE("csv helpers") {
  CMatrix m(2, 2);
  m << cplx(1, 2), cplx(-0.5, 0), cplx(1e-300, 3), cplx(0.1, -0.1);
  std::stringstream ss;
  write_complex_csv(ss, m);
  CHECK(read_complex_csv(ss) == m);
  CHECK(format_double(1.0) == "1.0");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(complex_from_json(complex_json(cplx(0.25, -1))) == cplx(0.25, -1));
}

#ifdef FREDKIT_CLI_PATH
TEST_CASE("command-line interface") {
  const auto yz = write_config("yz.json", serialize_config(yz_config("eig")));
  std::string text;
  CHECK(cli("eig --config " + yz, &text) == 0);
  CHECK(std::abs(complex_from_json(json::parse(text)["eigenvalues"][0]) - 1.0 / 3.0) < 1e-12);

  CHECK(cli("det --config " + yz + " --lambda-grid 2:4:3 --format csv", &text) == 0);
  CHECK(text.rfind("lambda,re,im", 0) == 0);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 3);

  CHECK(cli("solve --config " + yz + " --lambda 3") == 1);
  CHECK(cli("frobnicate --config " + yz) == 2);
  CHECK(cli("eig --config " + write_config("broken.json", json("not an object"))) == 2);
  std::ofstream(std::filesystem::temp_directory_path() / "fredkit_cli_test" / "bad.json") << "{ nope";
  CHECK(cli("eig --config " + (std::filesystem::temp_directory_path() / "fredkit_cli_test" / "bad.json").string()) == 2);

  auto def = yz_config("djf");
  def.kernel = {"jordan", 0.5, {}, {{0.5, 2}}, ""};
  CHECK(cli("djf --config " + write_config("def.json", serialize_config(def))) == 1);
  CHECK(cli("jordan --config " + write_config("def2.json", serialize_config(def)), &text) == 0);
}
#endif
