#include "runner.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <thread>

#include "experiments.hpp"
#include "report.hpp"

namespace rmt {

namespace fs = std::filesystem;

namespace {

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

json load_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("invalid JSON in '" + path + "'");
  return j;
}

struct RunState {
  std::string run_dir;
  std::string subcommand;
  Config cfg;
  const ExperimentDriver* driver = nullptr;
  int units = 0;
  std::vector<json> unit_results;  // null for pending
  std::string started_at;
};

void write_manifest(const RunState& st, const std::string& status,
                    const std::vector<std::string>& outputs) {
  json m;
  m["schema_version"] = 1;
  m["run_id"] = fs::path(st.run_dir).filename().string();
  m["subcommand"] = st.subcommand;
  m["config_hash"] = st.cfg.hash();
  m["tool_version"] = version_string();
  m["status"] = status;
  m["started_at"] = st.started_at;
  m["updated_at"] = timestamp_now();
  json units = json::array();
  for (int i = 0; i < st.units; ++i) {
    units.push_back(json{{"unit", i},
                         {"status", st.unit_results[static_cast<std::size_t>(i)]
                                            .is_null()
                                        ? "pending"
                                        : "done"}});
  }
  m["units"] = units;
  m["outputs"] = outputs;
  write_text_file(st.run_dir + "/manifest.json", m.dump(2) + "\n");
}

void write_partial(const RunState& st) {
  json p;
  p["config_hash"] = st.cfg.hash();
  json results = json::object();
  for (int i = 0; i < st.units; ++i) {
    const json& r = st.unit_results[static_cast<std::size_t>(i)];
    if (!r.is_null()) results[std::to_string(i)] = r;
  }
  p["units"] = results;
  write_text_file(st.run_dir + "/partial.json", p.dump() + "\n");
}

RunOutcome finish_run(RunState& st, const RunOptions& options) {
  RunOutcome out;
  out.run_dir = st.run_dir;
  std::vector<json> results;
  results.reserve(static_cast<std::size_t>(st.units));
  for (const json& r : st.unit_results) results.push_back(r);
  out.report = st.driver->assemble(st.cfg, results);
  write_text_file(st.run_dir + "/report.json", out.report.dump(2) + "\n");
  std::vector<std::string> outputs = {"report.json"};
  if (options.format == "csv") {
    for (const std::string& f : emit_plotdata(out.report, st.run_dir)) {
      outputs.push_back(f);
    }
  } else {
    write_text_file(st.run_dir + "/fitted.json",
                    out.report.at("fitted").dump(2) + "\n");
    outputs.push_back("fitted.json");
  }
  out.violations = static_cast<int>(out.report.at("violations").size());
  out.exit_code = out.violations > 0 ? kExitViolation : kExitOk;
  write_manifest(st, out.violations > 0 ? "done_with_violations" : "done",
                 outputs);
  if (out.violations > 0) {
    out.message = "experiment reported " + std::to_string(out.violations) +
                  " invariant violation(s)";
  }
  return out;
}

RunOutcome drive_units(RunState& st, const RunOptions& options) {
  // --threads wins over a config-file default; neither affects outputs.
  const int threads = resolve_threads(
      options.threads > 0 ? options.threads
                          : static_cast<int>(st.cfg.integer("threads", 0)));
  int processed = 0;
  for (int u = 0; u < st.units; ++u) {
    if (!st.unit_results[static_cast<std::size_t>(u)].is_null()) continue;
    if (options.halt_after_units >= 0 && processed >= options.halt_after_units) {
      write_partial(st);
      write_manifest(st, "interrupted", {});
      RunOutcome out;
      out.exit_code = kExitInterrupted;
      out.run_dir = st.run_dir;
      out.message = "halted after " + std::to_string(processed) + " unit(s)";
      return out;
    }
    st.unit_results[static_cast<std::size_t>(u)] =
        st.driver->run_unit(st.cfg, u, threads);
    ++processed;
    write_partial(st);
    write_manifest(st, "running", {});
  }
  return finish_run(st, options);
}

}  // namespace

std::string version_string() { return "rmtlab 0.1.0"; }

Config build_config(const std::string& subcommand, const std::string& config_path,
                    const json& overrides) {
  const ExperimentDriver* driver = find_driver(subcommand);
  if (driver == nullptr) {
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  }
  json file = json::object();
  if (!config_path.empty()) file = parse_config_file(config_path);
  json base = driver->defaults();
  if (!base.contains("seed")) base["seed"] = 1;
  return Config::layered(base, file, overrides);
}

RunOutcome run_experiment(const std::string& subcommand, const Config& cfg,
                          const RunOptions& options) {
  const ExperimentDriver* driver = find_driver(subcommand);
  if (driver == nullptr) {
    RunOutcome out;
    out.exit_code = kExitUsage;
    out.message = "unknown subcommand '" + subcommand + "'";
    return out;
  }
  RunState st;
  st.subcommand = subcommand;
  st.cfg = cfg;
  st.driver = driver;
  st.units = driver->unit_count(cfg);
  st.unit_results.assign(static_cast<std::size_t>(st.units), json());
  st.started_at = timestamp_now();

  const std::string run_id =
      subcommand + "-" + cfg.hash().substr(0, 12) + "-s" +
      std::to_string(cfg.seed());
  st.run_dir = (fs::path(options.out_dir) / run_id).string();
  fs::create_directories(st.run_dir);
  write_text_file(st.run_dir + "/config.json", cfg.raw().dump(2) + "\n");
  write_partial(st);
  write_manifest(st, "running", {});
  return drive_units(st, options);
}

RunOutcome resume_run(const std::string& manifest_path, int threads) {
  RunOutcome bad;
  bad.exit_code = kExitUsage;
  json manifest;
  try {
    manifest = load_json_file(manifest_path);
  } catch (const std::exception& e) {
    bad.message = std::string("cannot load manifest: ") + e.what();
    return bad;
  }
  const fs::path run_dir = fs::path(manifest_path).parent_path();
  std::string subcommand, config_hash;
  try {
    subcommand = manifest.at("subcommand").get<std::string>();
    config_hash = manifest.at("config_hash").get<std::string>();
  } catch (const std::exception&) {
    bad.message = "corrupted manifest: missing subcommand/config_hash";
    return bad;
  }

  RunState st;
  st.subcommand = subcommand;
  st.driver = find_driver(subcommand);
  if (st.driver == nullptr) {
    bad.message = "manifest names unknown subcommand '" + subcommand + "'";
    return bad;
  }
  st.run_dir = run_dir.string();
  try {
    st.cfg = Config(load_json_file((run_dir / "config.json").string()));
  } catch (const std::exception& e) {
    bad.message = std::string("cannot load run config: ") + e.what();
    return bad;
  }
  if (st.cfg.hash() != config_hash) {
    bad.message = "config hash mismatch: manifest " + config_hash + " vs config " +
                  st.cfg.hash();
    return bad;
  }
  st.units = st.driver->unit_count(st.cfg);
  st.unit_results.assign(static_cast<std::size_t>(st.units), json());
  st.started_at = manifest.contains("started_at")
                      ? manifest.at("started_at").get<std::string>()
                      : timestamp_now();
  try {
    const json partial = load_json_file((run_dir / "partial.json").string());
    if (partial.at("config_hash").get<std::string>() != config_hash) {
      bad.message = "partial results do not match the manifest config hash";
      return bad;
    }
    for (const auto& [key, value] : partial.at("units").items()) {
      const int idx = std::stoi(key);
      if (idx < 0 || idx >= st.units) {
        bad.message = "partial results reference unit out of range";
        return bad;
      }
      st.unit_results[static_cast<std::size_t>(idx)] = value;
    }
  } catch (const std::exception& e) {
    bad.message = std::string("cannot load partial results: ") + e.what();
    return bad;
  }

  RunOptions options;
  options.threads = threads;
  options.out_dir = run_dir.parent_path().string();
  return drive_units(st, options);
}

}  // namespace rmt
