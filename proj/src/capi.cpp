#include "rmtlab/rmtlab.h"

#include <cstring>
#include <memory>
#include <string>

#include "config.hpp"
#include "experiments.hpp"
#include "runner.hpp"

// C binding of the lab. Opaque handles wrap the C++ objects; exceptions are
// converted to status codes with a thread-local message.

struct rmtlab_config {
  std::string subcommand;
  rmt::json overrides = rmt::json::object();
  rmt::Config effective;
};

struct rmtlab_result {
  std::string run_dir;
  std::string report_json;
  int violations = 0;
};

namespace {

thread_local std::string g_last_error = "ok";

rmtlab_status fail(rmtlab_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

rmtlab_status guard_usage(const char* what) {
  return fail(RMTLAB_E_USAGE, std::string("invalid argument: ") + what);
}

rmtlab_result* make_result(const rmt::RunOutcome& out) {
  auto* r = new rmtlab_result;
  r->run_dir = out.run_dir;
  r->report_json = out.report.is_null() ? "null" : out.report.dump(2) + "\n";
  r->violations = out.violations;
  return r;
}

rmtlab_status from_exit_code(int code, const std::string& message) {
  switch (code) {
    case rmt::kExitOk:
      return RMTLAB_OK;
    case rmt::kExitUsage:
      return fail(RMTLAB_E_USAGE, message.empty() ? "usage error" : message);
    case rmt::kExitViolation:
      return fail(RMTLAB_E_VIOLATION,
                  message.empty() ? "invariant violation" : message);
    case rmt::kExitInterrupted:
      return fail(RMTLAB_E_INTERRUPTED, message.empty() ? "interrupted" : message);
    default:
      return fail(RMTLAB_E_INTERNAL, message.empty() ? "internal error" : message);
  }
}

}  // namespace

extern "C" {

const char* rmtlab_version(void) {
  static const std::string v = rmt::version_string();
  return v.c_str();
}

const char* rmtlab_last_error(void) { return g_last_error.c_str(); }

const char* const* rmtlab_subcommands(void) {
  static const std::vector<std::string> names = rmt::driver_names();
  static const std::vector<const char*> ptrs = [] {
    std::vector<const char*> p;
    for (const auto& n : names) p.push_back(n.c_str());
    p.push_back(nullptr);
    return p;
  }();
  return ptrs.data();
}

rmtlab_status rmtlab_config_create(const char* subcommand,
                                   const char* config_path,
                                   rmtlab_config** out) {
  if (subcommand == nullptr || out == nullptr) return guard_usage("null pointer");
  *out = nullptr;
  try {
    auto cfg = std::make_unique<rmtlab_config>();
    cfg->subcommand = subcommand;
    cfg->effective = rmt::build_config(
        subcommand, config_path == nullptr ? "" : config_path,
        rmt::json::object());
    *out = cfg.release();
    return RMTLAB_OK;
  } catch (const rmt::ConfigError& e) {
    return fail(RMTLAB_E_USAGE, e.what());
  } catch (const std::exception& e) {
    return fail(RMTLAB_E_INTERNAL, e.what());
  }
}

rmtlab_status rmtlab_config_create_from_text(const char* subcommand,
                                             const char* text,
                                             const char* format,
                                             rmtlab_config** out) {
  if (subcommand == nullptr || text == nullptr || out == nullptr) {
    return guard_usage("null pointer");
  }
  *out = nullptr;
  try {
    const rmt::ExperimentDriver* driver = rmt::find_driver(subcommand);
    if (driver == nullptr) {
      return fail(RMTLAB_E_USAGE,
                  std::string("unknown subcommand '") + subcommand + "'");
    }
    const rmt::json file = rmt::parse_config_text(
        text, format == nullptr ? "auto" : format);
    auto cfg = std::make_unique<rmtlab_config>();
    cfg->subcommand = subcommand;
    rmt::json base = driver->defaults();
    if (!base.contains("seed")) base["seed"] = 1;
    cfg->effective = rmt::Config::layered(base, file, rmt::json::object());
    *out = cfg.release();
    return RMTLAB_OK;
  } catch (const rmt::ConfigError& e) {
    return fail(RMTLAB_E_USAGE, e.what());
  } catch (const std::exception& e) {
    return fail(RMTLAB_E_INTERNAL, e.what());
  }
}

rmtlab_status rmtlab_config_override(rmtlab_config* cfg, const char* key,
                                     const char* value_json) {
  if (cfg == nullptr || key == nullptr || value_json == nullptr) {
    return guard_usage("null pointer");
  }
  try {
    rmt::json v = rmt::json::parse(value_json, nullptr, false);
    if (v.is_discarded()) {
      return fail(RMTLAB_E_USAGE,
                  std::string("override value for '") + key + "' is not JSON");
    }
    cfg->overrides[key] = v;
    rmt::json merged = cfg->effective.raw();
    merged[key] = cfg->overrides[key];
    cfg->effective = rmt::Config(merged);
    return RMTLAB_OK;
  } catch (const std::exception& e) {
    return fail(RMTLAB_E_INTERNAL, e.what());
  }
}

rmtlab_status rmtlab_config_hash(const rmtlab_config* cfg, char* buf,
                                 size_t buflen) {
  if (cfg == nullptr || buf == nullptr) return guard_usage("null pointer");
  const std::string h = cfg->effective.hash();
  if (buflen < h.size() + 1) return guard_usage("hash buffer too small");
  std::memcpy(buf, h.c_str(), h.size() + 1);
  return RMTLAB_OK;
}

void rmtlab_config_destroy(rmtlab_config* cfg) { delete cfg; }

rmtlab_status rmtlab_run(const char* subcommand, const rmtlab_config* cfg,
                         const char* out_dir, const char* format, int threads,
                         int halt_after_units, rmtlab_result** out) {
  if (subcommand == nullptr || cfg == nullptr || out == nullptr) {
    return guard_usage("null pointer");
  }
  *out = nullptr;
  try {
    rmt::RunOptions options;
    options.out_dir = (out_dir == nullptr || out_dir[0] == '\0') ? "runs" : out_dir;
    options.format = (format == nullptr || format[0] == '\0') ? "csv" : format;
    if (options.format != "csv" && options.format != "json") {
      return fail(RMTLAB_E_USAGE, "format must be 'csv' or 'json'");
    }
    options.threads = threads;
    options.halt_after_units = halt_after_units;
    const rmt::RunOutcome outcome =
        rmt::run_experiment(subcommand, cfg->effective, options);
    if (outcome.exit_code != rmt::kExitUsage) *out = make_result(outcome);
    return from_exit_code(outcome.exit_code, outcome.message);
  } catch (const rmt::ConfigError& e) {
    return fail(RMTLAB_E_USAGE, e.what());
  } catch (const std::exception& e) {
    return fail(RMTLAB_E_INTERNAL, e.what());
  }
}

rmtlab_status rmtlab_resume(const char* manifest_path, int threads,
                            rmtlab_result** out) {
  if (manifest_path == nullptr || out == nullptr) return guard_usage("null pointer");
  *out = nullptr;
  try {
    const rmt::RunOutcome outcome = rmt::resume_run(manifest_path, threads);
    if (outcome.exit_code != rmt::kExitUsage) *out = make_result(outcome);
    return from_exit_code(outcome.exit_code, outcome.message);
  } catch (const rmt::ConfigError& e) {
    return fail(RMTLAB_E_USAGE, e.what());
  } catch (const std::exception& e) {
    return fail(RMTLAB_E_INTERNAL, e.what());
  }
}

const char* rmtlab_result_report_json(const rmtlab_result* result) {
  return result == nullptr ? "null" : result->report_json.c_str();
}

const char* rmtlab_result_run_dir(const rmtlab_result* result) {
  return result == nullptr ? "" : result->run_dir.c_str();
}

int rmtlab_result_violation_count(const rmtlab_result* result) {
  return result == nullptr ? -1 : result->violations;
}

void rmtlab_result_destroy(rmtlab_result* result) { delete result; }

}  // extern "C"
