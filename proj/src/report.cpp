#include "relik/report.hpp"

#include <cmath>
#include <cstdio>

namespace relik {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

Json cell_json(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  const double v = std::get<double>(cell);
  // JSON has no NaN/Inf; those cells become null.
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

std::string csv_cell(const Cell& cell) {
  if (const auto* v = std::get_if<double>(&cell)) return format_number(*v);
  const auto& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string dump_json(const Json& value) { return value.dump(2) + "\n"; }

std::string to_json(const EvalReport& report, const Json& manifest) {
  Json doc = Json::object();
  doc["kind"] = report.kind;
  doc["manifest"] = manifest;
  doc["config"] = report.config;
  doc["summary"] = report.summary;
  doc["columns"] = report.columns;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < report.columns.size() && i < row.size(); ++i) {
      obj[report.columns[i]] = cell_json(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return dump_json(doc);
}

std::string to_csv(const EvalReport& report) {
  std::string out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out += ',';
    out += report.columns[i];
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace relik
