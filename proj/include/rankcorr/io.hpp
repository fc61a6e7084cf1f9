#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rankcorr/decomposer.hpp"
#include "rankcorr/gaussian_approx.hpp"
#include "rankcorr/infeasibility.hpp"
#include "rankcorr/matrix_core.hpp"
#include "rankcorr/sphere_copula.hpp"

namespace rankcorr::io {

using nlohmann::json;

struct Table {
  std::vector<std::string> header;  // empty when the text had no header row
  Matrix values;
};

/// Comma separated numbers, one row per line. Blank lines are skipped and
/// whitespace around fields is ignored. With `allow_header`, a first row that
/// does not parse as numbers is taken as column names. Throws ParseError on
/// ragged rows or malformed numbers.
Table parse_csv(const std::string& text, bool allow_header);

/// Square matrix CSV (no header).
Matrix parse_matrix_csv(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Writes rows with 17 significant digits, so values round-trip exactly.
void write_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header = {});
std::string to_csv(const Matrix& m, const std::vector<std::string>& header = {});

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json to_json(const ValidationReport& report);
json to_json(const MomentCertificate& cert);
json to_json(const DecompositionResult& result);

/// {type: "sphere", a} or {type: "mixture", weights, components: [{type: "sphere", a}, ...]}
json to_json(const CopulaModel& model);
/// {type: "gaussian", param, repaired, repair_distance}
json to_json(const GaussianModel& model);

using AnyModel = std::variant<SphereModel, MixtureModel, GaussianModel>;
/// Parses any of the model documents above. Throws ParseError or InvalidModel.
AnyModel model_from_json(const json& j);

}  // namespace rankcorr::io
