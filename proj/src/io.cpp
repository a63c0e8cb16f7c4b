#include "fredkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fredkit/error.hpp"

namespace fredkit {

namespace {

void write_json(std::ostream& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* newline = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << newline;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << newline;
        first = false;
        out << pad << nlohmann::json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write_json(out, it.value(), indent, depth + 1);
      }
      out << newline << close_pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[' << newline;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',' << newline;
        out << pad;
        write_json(out, j[i], indent, depth + 1);
      }
      out << newline << close_pad << ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        out << format_double(x);
      else
        out << "null";
      return;
    }
    default:
      out << j.dump();
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (quoted) fail(ErrorKind::InvalidArgument, "unterminated quote in CSV line: " + line);
  cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "not a number in CSV: '" + text + "'");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) fail(ErrorKind::InvalidArgument, "not a number in CSV: '" + text + "'");
  return x;
}

cplx parse_cell(const std::string& cell) {
  const auto comma = cell.find(',');
  if (comma == std::string::npos) return parse_number(cell);
  return {parse_number(cell.substr(0, comma)), parse_number(cell.substr(comma + 1))};
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

nlohmann::json complex_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorKind::InvalidArgument, "expected a complex number, got " + j.dump());
}

std::string dump_json(const nlohmann::json& j, int indent) {
  std::ostringstream out;
  write_json(out, j, indent, 0);
  return out.str();
}

void write_complex_csv(std::ostream& out, const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << '"' << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag()) << '"';
    }
    out << '\n';
  }
}

CMatrix read_complex_csv(std::istream& in) {
  std::vector<std::vector<cplx>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<cplx> row;
    for (const auto& cell : split_csv_line(line)) row.push_back(parse_cell(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorKind::InvalidArgument, "CSV rows have different widths");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::InvalidArgument, "CSV input is empty");
  CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

CMatrix read_complex_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open CSV file " + path);
  return read_complex_csv(in);
}

void write_complex_csv_file(const std::string& path, const CMatrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write CSV file " + path);
  write_complex_csv(out, m);
}

nlohmann::json spectral_json(const BiSpectralDecomposition& d) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : d.eigenvalues) values.push_back(complex_json(v));
  return {{"eigenvalues", values},
          {"biorth_residual", d.biorth_residual},
          {"retained", d.retained},
          {"hermitian", d.hermitian},
          {"condition_estimate", d.condition_estimate}};
}

nlohmann::json jordan_json(const JordanForm& jf) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : jf.blocks) blocks.push_back({{"lambda", complex_json(b.lambda)}, {"m", b.m}});
  return {{"blocks", blocks}, {"residuals", jf.residuals}};
}

nlohmann::json svd_json(const OperatorSVD& svd) {
  return {{"singular_values", svd.singular_values}, {"rank_numerical", svd.rank_numerical}};
}

void export_matrices(const std::string& dir, const std::map<std::string, CMatrix>& matrices) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::InvalidArgument, "cannot create export directory " + dir + ": " + ec.message());
  for (const auto& [name, m] : matrices) write_complex_csv_file((std::filesystem::path(dir) / (name + ".csv")).string(), m);
}

}  // namespace fredkit
