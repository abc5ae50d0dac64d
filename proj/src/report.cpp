#include "report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rmt {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

json make_table(const std::string& name, std::vector<std::string> columns,
                std::vector<std::vector<json>> rows) {
  json t;
  t["name"] = name;
  t["columns"] = columns;
  json r = json::array();
  for (auto& row : rows) {
    if (row.size() != columns.size()) {
      throw std::logic_error("make_table: row width mismatch in " + name);
    }
    r.push_back(row);
  }
  t["rows"] = std::move(r);
  return t;
}

std::string table_to_csv(const json& table) {
  std::ostringstream out;
  const auto& columns = table.at("columns");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out << ',';
    out << columns[i].get<std::string>();
  }
  out << '\n';
  for (const auto& row : table.at("rows")) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      const json& cell = row[i];
      if (cell.is_string()) {
        out << cell.get<std::string>();
      } else if (cell.is_number_integer()) {
        out << cell.get<std::int64_t>();
      } else if (cell.is_number()) {
        out << format_double(cell.get<double>());
      } else if (cell.is_boolean()) {
        out << (cell.get<bool>() ? "true" : "false");
      } else {
        out << cell.dump();
      }
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> emit_plotdata(const json& report,
                                       const std::string& dir) {
  std::vector<std::string> written;
  std::filesystem::create_directories(dir);
  if (report.contains("tables")) {
    for (const auto& table : report.at("tables")) {
      const std::string name = table.at("name").get<std::string>() + ".csv";
      write_text_file(dir + "/" + name, table_to_csv(table));
      written.push_back(name);
    }
  }
  json fitted = report.contains("fitted") ? report.at("fitted") : json::object();
  write_text_file(dir + "/fitted.json", fitted.dump(2) + "\n");
  written.push_back("fitted.json");
  return written;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rmt
