#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "fredkit/jordan.hpp"
#include "fredkit/linalg.hpp"
#include "fredkit/operator_svd.hpp"
#include "fredkit/spectral.hpp"

namespace fredkit {

/// Decimal text with 17 significant digits.
std::string format_double(double x);

nlohmann::json complex_json(cplx z);
/// Accepts {"re": .., "im": ..}, a bare number, or a two-element array.
cplx complex_from_json(const nlohmann::json& j);

/// JSON text with every float printed to 17 significant digits; keys keep
/// nlohmann's sorted order so output is byte-stable.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// One row per matrix row; each cell is a quoted "re,im" pair.
void write_complex_csv(std::ostream& out, const CMatrix& m);
/// Reads quoted "re,im" cells or plain real cells; rows must have equal width.
CMatrix read_complex_csv(std::istream& in);
CMatrix read_complex_csv_file(const std::string& path);
void write_complex_csv_file(const std::string& path, const CMatrix& m);

nlohmann::json spectral_json(const BiSpectralDecomposition& d);
nlohmann::json jordan_json(const JordanForm& jf);
nlohmann::json svd_json(const OperatorSVD& svd);

/// Writes each named matrix as <dir>/<name>.csv, creating dir if needed.
void export_matrices(const std::string& dir, const std::map<std::string, CMatrix>& matrices);

}  // namespace fredkit
