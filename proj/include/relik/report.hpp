#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace relik {

using Json = nlohmann::ordered_json;

using Cell = std::variant<double, std::string>;

/// Tabular experiment output: a config echo, scalar summary metrics and
/// rows of named columns holding numbers or labels.
struct EvalReport {
  std::string kind;
  Json config = Json::object();
  Json summary = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// JSON document: {"kind", "manifest", "config", "summary", "columns",
/// "rows"}; rows are objects keyed by column name. Key order is fixed, so
/// parse-then-emit reproduces the text exactly.
std::string to_json(const EvalReport& report, const Json& manifest = Json::object());

/// CSV with a header of `columns` and one line per row; numbers use 17
/// significant digits, labels are quoted when they contain , " or a newline.
std::string to_csv(const EvalReport& report);

/// Canonical text of any JSON value (2-space indent, trailing newline).
std::string dump_json(const Json& value);

/// %.17g.
std::string format_number(double value);

}  // namespace relik
