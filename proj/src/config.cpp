#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rmt {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

json parse_toml_scalar(const std::string& raw, int lineno) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("toml: empty value at line " + std::to_string(lineno));
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      throw ConfigError("toml: unterminated string at line " + std::to_string(lineno));
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) {
        ++i;
        switch (s[i]) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default:
            throw ConfigError("toml: bad escape at line " + std::to_string(lineno));
        }
      } else {
        out.push_back(s[i]);
      }
    }
    return json(out);
  }
  if (s == "true") return json(true);
  if (s == "false") return json(false);
  // Integer if it parses cleanly without '.', 'e' or 'E'.
  if (s.find_first_of(".eE") == std::string::npos) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return json(v);
    } catch (...) {
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return json(v);
  } catch (...) {
  }
  throw ConfigError("toml: cannot parse value '" + s + "' at line " +
                    std::to_string(lineno));
}

json parse_toml_value(const std::string& raw, int lineno) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') {
      throw ConfigError("toml: unterminated array at line " + std::to_string(lineno));
    }
    json arr = json::array();
    std::string body = s.substr(1, s.size() - 2);
    std::string item;
    bool in_string = false;
    for (char c : body) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, lineno));
        item.clear();
      } else {
        item.push_back(c);
      }
    }
    if (!trim(item).empty()) arr.push_back(parse_toml_scalar(item, lineno));
    return arr;
  }
  return parse_toml_scalar(s, lineno);
}

json* descend(json& root, const std::string& dotted, int lineno) {
  json* cur = &root;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = trim(part);
    if (part.empty()) {
      throw ConfigError("toml: empty key segment at line " + std::to_string(lineno));
    }
    if (!cur->contains(part)) (*cur)[part] = json::object();
    cur = &(*cur)[part];
    if (!cur->is_object()) {
      throw ConfigError("toml: key '" + part + "' redefined at line " +
                        std::to_string(lineno));
    }
  }
  return cur;
}

}  // namespace

json parse_toml(const std::string& text) {
  json root = json::object();
  json* section = &root;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("toml: bad section header at line " + std::to_string(lineno));
      }
      section = descend(root, line.substr(1, line.size() - 2), lineno);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("toml: expected key = value at line " + std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("toml: empty key at line " + std::to_string(lineno));
    }
    if (key.find('.') != std::string::npos) {
      json* target = descend(*section, key.substr(0, key.rfind('.')), lineno);
      (*target)[trim(key.substr(key.rfind('.') + 1))] =
          parse_toml_value(line.substr(eq + 1), lineno);
    } else {
      (*section)[key] = parse_toml_value(line.substr(eq + 1), lineno);
    }
  }
  return root;
}

json parse_config_text(const std::string& text, const std::string& format) {
  std::string fmt = format;
  if (fmt == "auto") {
    std::string t = trim(text);
    fmt = (!t.empty() && (t.front() == '{' || t.front() == '[')) ? "json" : "toml";
  }
  if (fmt == "json") {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config: invalid JSON");
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
  }
  if (fmt == "toml") return parse_toml(text);
  throw ConfigError("config: unknown format '" + format + "'");
}

json parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string fmt = "auto";
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") fmt = "json";
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") fmt = "toml";
  try {
    return parse_config_text(buf.str(), fmt);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (" + path + ")");
  }
}

json merge_json(json base, const json& over) {
  if (!base.is_object() || !over.is_object()) return over;
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (base.contains(it.key()) && base[it.key()].is_object() &&
        it.value().is_object()) {
      base[it.key()] = merge_json(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
  return base;
}

Config Config::layered(const json& defaults, const json& file,
                       const json& overrides) {
  return Config(merge_json(merge_json(defaults, file), overrides));
}

double Config::num(const std::string& key, double def) const {
  if (!merged_.contains(key)) return def;
  const json& v = merged_.at(key);
  if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t Config::integer(const std::string& key, std::int64_t def) const {
  if (!merged_.contains(key)) return def;
  const json& v = merged_.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError("config: '" + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t Config::seed() const {
  if (!merged_.contains("seed")) return 1;
  const json& v = merged_.at("seed");
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw ConfigError("config: 'seed' must be an integer");
  }
  return v.get<std::uint64_t>();
}

std::string Config::str(const std::string& key, const std::string& def) const {
  if (!merged_.contains(key)) return def;
  const json& v = merged_.at(key);
  if (!v.is_string()) throw ConfigError("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

bool Config::flag(const std::string& key, bool def) const {
  if (!merged_.contains(key)) return def;
  const json& v = merged_.at(key);
  if (!v.is_boolean()) throw ConfigError("config: '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> Config::num_list(const std::string& key) const {
  std::vector<double> out;
  if (!merged_.contains(key)) return out;
  const json& v = merged_.at(key);
  if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array");
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError("config: '" + key + "' must be numeric");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::int64_t> Config::int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  if (!merged_.contains(key)) return out;
  const json& v = merged_.at(key);
  if (!v.is_array()) throw ConfigError("config: '" + key + "' must be an array");
  for (const json& e : v) {
    if (!e.is_number_integer()) {
      throw ConfigError("config: '" + key + "' must hold integers");
    }
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

json Config::sub(const std::string& key) const {
  if (!merged_.contains(key)) return json::object();
  const json& v = merged_.at(key);
  if (!v.is_object()) throw ConfigError("config: '" + key + "' must be a table");
  return v;
}

std::string Config::hash() const { return json_hash(merged_); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string json_hash(const json& j) {
  const std::string canon = j.dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  return std::string(buf);
}

}  // namespace rmt
