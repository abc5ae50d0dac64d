#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Experiment configuration: TOML (subset) or JSON files, flag overrides with
// precedence flag > file > default, and a canonical content hash used for
// run identity and resume safety.

namespace rmt {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses the TOML subset used by the lab configs: [dotted.sections],
// key = value with strings, integers, floats, booleans and flat arrays.
json parse_toml(const std::string& text);

// Parses a config by format ("toml" or "json"); "auto" sniffs the content.
json parse_config_text(const std::string& text, const std::string& format);

// Reads a config file; format from the extension, sniffed otherwise.
json parse_config_file(const std::string& path);

class Config {
 public:
  Config() : merged_(json::object()) {}
  explicit Config(json merged) : merged_(std::move(merged)) {}

  static Config layered(const json& defaults, const json& file,
                        const json& overrides);

  const json& raw() const { return merged_; }

  bool has(const std::string& key) const { return merged_.contains(key); }
  double num(const std::string& key, double def) const;
  std::int64_t integer(const std::string& key, std::int64_t def) const;
  std::uint64_t seed() const;
  std::string str(const std::string& key, const std::string& def) const;
  bool flag(const std::string& key, bool def) const;
  std::vector<double> num_list(const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& key) const;
  json sub(const std::string& key) const;  // object-valued key or {}

  // 16 hex chars of FNV-1a over the canonical serialization.
  std::string hash() const;

 private:
  json merged_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string json_hash(const json& j);

// Deep merge: values in `over` win; objects merge recursively.
json merge_json(json base, const json& over);

}  // namespace rmt
