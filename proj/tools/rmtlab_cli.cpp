// rmtlab command-line front end. Talks to the core exclusively through the
// shared-library C API (rmtlab/rmtlab.h).

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmtlab/rmtlab.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t trials = 0;
  bool trials_set = false;
  std::int64_t n = 0;
  bool n_set = false;
  int threads = 0;
  int halt_after_units = -1;
  std::vector<std::string> sets;
};

void add_common_flags(CLI::App* sub, CommonArgs* args) {
  sub->add_option("--config", args->config_path, "Config file (TOML or JSON)");
  sub->add_option("--seed", args->seed, "Random seed")
      ->each([args](const std::string&) { args->seed_set = true; });
  sub->add_option("--trials", args->trials, "Monte Carlo trials")
      ->each([args](const std::string&) { args->trials_set = true; });
  sub->add_option("-n,--n", args->n, "Matrix / vector dimension")
      ->each([args](const std::string&) { args->n_set = true; });
  sub->add_option("--threads", args->threads,
                  "Worker threads (default: hardware)");
  sub->add_option("--out", args->out_dir,
                  "Output directory (default: $RMTLAB_OUT or ./runs)");
  sub->add_option("--format", args->format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--set", args->sets,
                  "Extra config override key=JSON (repeatable)");
  sub->add_option("--halt-after-units", args->halt_after_units,
                  "Testing hook: stop after N work units")
      ->group("");
}

int fail_usage(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return 1;
}

int run_subcommand(const std::string& name, const CommonArgs& args) {
  rmtlab_config* cfg = nullptr;
  rmtlab_status st = rmtlab_config_create(
      name.c_str(), args.config_path.empty() ? nullptr : args.config_path.c_str(),
      &cfg);
  if (st != RMTLAB_OK) return fail_usage(rmtlab_last_error());

  auto override_int = [&](const char* key, std::int64_t value) {
    const std::string v = std::to_string(value);
    return rmtlab_config_override(cfg, key, v.c_str());
  };
  if (args.seed_set) override_int("seed", static_cast<std::int64_t>(args.seed));
  if (args.trials_set) override_int("trials", args.trials);
  if (args.n_set) override_int("n", args.n);
  for (const std::string& kv : args.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      rmtlab_config_destroy(cfg);
      return fail_usage("--set expects key=JSON, got '" + kv + "'");
    }
    st = rmtlab_config_override(cfg, kv.substr(0, eq).c_str(),
                                kv.substr(eq + 1).c_str());
    if (st != RMTLAB_OK) {
      const std::string msg = rmtlab_last_error();
      rmtlab_config_destroy(cfg);
      return fail_usage(msg);
    }
  }

  std::string out_dir = args.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("RMTLAB_OUT");
    out_dir = (env != nullptr && env[0] != '\0') ? env : "runs";
  }

  rmtlab_result* result = nullptr;
  st = rmtlab_run(name.c_str(), cfg, out_dir.c_str(), args.format.c_str(),
                  args.threads, args.halt_after_units, &result);
  rmtlab_config_destroy(cfg);

  int exit_code = 0;
  switch (st) {
    case RMTLAB_OK:
      std::printf("%s: ok, outputs in %s\n", name.c_str(),
                  rmtlab_result_run_dir(result));
      exit_code = 0;
      break;
    case RMTLAB_E_VIOLATION:
      std::printf("%s: %d invariant violation(s), outputs in %s\n", name.c_str(),
                  rmtlab_result_violation_count(result),
                  rmtlab_result_run_dir(result));
      exit_code = 2;
      break;
    case RMTLAB_E_INTERRUPTED:
      std::printf("%s: interrupted (%s)\n", name.c_str(), rmtlab_last_error());
      exit_code = 3;
      break;
    default:
      std::fprintf(stderr, "error: %s\n", rmtlab_last_error());
      exit_code = 1;
      break;
  }
  rmtlab_result_destroy(result);
  return exit_code;
}

int run_resume(const std::string& manifest, int threads) {
  rmtlab_result* result = nullptr;
  const rmtlab_status st = rmtlab_resume(manifest.c_str(), threads, &result);
  int exit_code = 0;
  switch (st) {
    case RMTLAB_OK:
      std::printf("resume: ok, outputs in %s\n", rmtlab_result_run_dir(result));
      exit_code = 0;
      break;
    case RMTLAB_E_VIOLATION:
      std::printf("resume: %d invariant violation(s), outputs in %s\n",
                  rmtlab_result_violation_count(result),
                  rmtlab_result_run_dir(result));
      exit_code = 2;
      break;
    default:
      std::fprintf(stderr, "error: %s\n", rmtlab_last_error());
      exit_code = 1;
      break;
  }
  rmtlab_result_destroy(result);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("rmtlab — random-matrix Monte Carlo lab (") +
               rmtlab_version() + ")"};
  app.require_subcommand(1);

  struct SubEntry {
    CLI::App* sub;
    CommonArgs args;
  };
  std::vector<std::pair<std::string, SubEntry*>> entries;

  const char* const* names = rmtlab_subcommands();
  for (const char* const* p = names; *p != nullptr; ++p) {
    auto* entry = new SubEntry;
    entry->sub = app.add_subcommand(*p, std::string("Run the ") + *p +
                                            " experiment");
    add_common_flags(entry->sub, &entry->args);
    entries.emplace_back(*p, entry);
  }

  std::string manifest_path;
  int resume_threads = 0;
  CLI::App* resume = app.add_subcommand("resume", "Complete a partial run");
  resume->add_option("manifest", manifest_path, "Path to manifest.json")
      ->required();
  resume->add_option("--threads", resume_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints help itself; map parse failures to exit 1, help to 0.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (resume->parsed()) return run_resume(manifest_path, resume_threads);
  for (auto& [name, entry] : entries) {
    if (entry->sub->parsed()) return run_subcommand(name, entry->args);
  }
  return fail_usage("no subcommand given");
}
