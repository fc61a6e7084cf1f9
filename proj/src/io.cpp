#include "rankcorr/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rankcorr::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

Table parse_csv(const std::string& text, bool allow_header) {
  Table table;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && parse_number(fields[i], row[i]);

    if (!numeric) {
      if (allow_header && rows.empty() && table.header.empty()) {
        for (auto f : fields) table.header.emplace_back(f);
        width = fields.size();
        continue;
      }
      parse_error(line_no, "malformed number");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      parse_error(line_no, "expected " + std::to_string(width) + " fields, got " +
                               std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

Matrix parse_matrix_csv(const std::string& text) {
  Table t = parse_csv(text, false);
  if (t.values.rows() == 0) throw Error(ErrorCode::ParseError, "empty matrix");
  return std::move(t.values);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

void write_csv(std::ostream& out, const Matrix& m, const std::vector<std::string>& header) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // Normalize negative zero so identical values print identically.
      const double v = m(i, j) == 0.0 ? 0.0 : m(i, j);
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::string to_csv(const Matrix& m, const std::vector<std::string>& header) {
  std::ostringstream os;
  write_csv(os, m, header);
  return os.str();
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) == 0.0 ? 0.0 : m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, "matrix must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw Error(ErrorCode::ParseError, "matrix rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::ParseError, "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw Error(ErrorCode::ParseError, "matrix entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

json to_json(const ValidationReport& report) {
  json errors = json::array();
  for (const auto& issue : report.issues) {
    errors.push_back({{"code", std::string(to_string(issue.code))}, {"message", issue.message}});
  }
  return {{"dimension", report.dimension},
          {"rank", report.rank},
          {"min_eigenvalue", report.min_eigenvalue},
          {"valid", report.valid},
          {"psd_tol", report.psd_tol},
          {"rank_tol", report.rank_tol},
          {"errors", errors}};
}

json to_json(const MomentCertificate& cert) {
  return {{"m", cert.m},
          {"k", cert.k},
          {"c2", cert.c2},
          {"c4", cert.c4},
          {"implied_m2", cert.implied_m2},
          {"implied_m4", cert.implied_m4},
          {"violated", cert.violated},
          {"margin", cert.margin}};
}

json to_json(const DecompositionResult& result) {
  json atoms = json::array();
  for (const auto& atom : result.atoms) atoms.push_back(matrix_to_json(atom.a));
  return {{"weights", result.weights},
          {"atoms", atoms},
          {"residual", result.residual},
          {"iterations", result.iterations},
          {"converged", result.converged},
          {"residual_trace", result.residual_trace}};
}

json to_json(const CopulaModel& model) {
  if (const auto* sphere = std::get_if<SphereModel>(&model)) {
    return {{"type", "sphere"}, {"a", matrix_to_json(sphere->a())}};
  }
  const auto& mixture = std::get<MixtureModel>(model);
  json components = json::array();
  for (const auto& c : mixture.components()) components.push_back(to_json(CopulaModel{c}));
  return {{"type", "mixture"}, {"weights", mixture.weights()}, {"components", components}};
}

json to_json(const GaussianModel& model) {
  return {{"type", "gaussian"},
          {"param", matrix_to_json(model.param.entries())},
          {"repaired", model.repaired},
          {"repair_distance", model.repair_distance}};
}

AnyModel model_from_json(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "sphere") return SphereModel(matrix_from_json(j.at("a")));
    if (type == "mixture") {
      std::vector<SphereModel> components;
      for (const auto& c : j.at("components")) {
        if (c.is_object()) {
          components.emplace_back(matrix_from_json(c.at("a")));
        } else {
          components.emplace_back(matrix_from_json(c));
        }
      }
      return MixtureModel(j.at("weights").get<std::vector<double>>(), std::move(components));
    }
    if (type == "gaussian") {
      return GaussianModel{validate(matrix_from_json(j.at("param"))), j.value("repaired", false),
                           j.value("repair_distance", 0.0)};
    }
    throw Error(ErrorCode::ParseError, "unknown model type '" + type + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace rankcorr::io
