#pragma once

#include <string>
#include <vector>

#include <json.hpp>

// Report assembly and serialization. Every experiment report is a JSON
// document with embedded tables; CSV emission is a generic dump of those
// tables with 17-significant-digit numbers (exact double round trip).

namespace rmt {

using json = nlohmann::json;

// Fixed-width decimal form that round-trips doubles exactly.
std::string format_double(double v);

json make_table(const std::string& name, std::vector<std::string> columns,
                std::vector<std::vector<json>> rows);

// Renders one table as CSV text: UTF-8, comma separated, header row, LF.
std::string table_to_csv(const json& table);

// Writes every table in report["tables"] to <dir>/<table name>.csv and the
// fitted-constants sidecar to <dir>/fitted.json. Returns the file names.
std::vector<std::string> emit_plotdata(const json& report,
                                       const std::string& dir);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rmt
