/* rmtlab — random-matrix Monte Carlo verification lab.
 *
 * C API of the shared library. All state lives behind opaque handles; every
 * function returns a status code (rmtlab_status) unless documented otherwise.
 * Error details for the calling thread are available via rmtlab_last_error().
 */

#ifndef RMTLAB_H
#define RMTLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef RMTLAB_API
#define RMTLAB_API __attribute__((visibility("default")))
#endif

typedef struct rmtlab_config rmtlab_config;
typedef struct rmtlab_result rmtlab_result;

typedef enum rmtlab_status {
  RMTLAB_OK = 0,
  RMTLAB_E_USAGE = 1,      /* bad arguments, unknown subcommand, bad config */
  RMTLAB_E_VIOLATION = 2,  /* experiment detected an invariant violation */
  RMTLAB_E_INTERRUPTED = 3,
  RMTLAB_E_INTERNAL = 4,
} rmtlab_status;

RMTLAB_API const char* rmtlab_version(void);

/* Message describing the last failure on this thread (never NULL). */
RMTLAB_API const char* rmtlab_last_error(void);

/* NULL-terminated array of subcommand names; owned by the library. */
RMTLAB_API const char* const* rmtlab_subcommands(void);

/* Creates the effective config for a subcommand from driver defaults plus an
 * optional TOML/JSON file (pass NULL or "" to skip the file). */
RMTLAB_API rmtlab_status rmtlab_config_create(const char* subcommand,
                                              const char* config_path,
                                              rmtlab_config** out);

/* Same, parsing config text directly; format is "toml", "json" or "auto". */
RMTLAB_API rmtlab_status rmtlab_config_create_from_text(const char* subcommand,
                                                        const char* text,
                                                        const char* format,
                                                        rmtlab_config** out);

/* Sets one key to a JSON-encoded value, e.g. ("trials", "5000") or
 * ("ensemble", "{\"kind\":\"gaussian\"}"). Overrides win over file values. */
RMTLAB_API rmtlab_status rmtlab_config_override(rmtlab_config* cfg,
                                                const char* key,
                                                const char* value_json);

/* Canonical 16-hex-character content hash; buf must hold >= 17 bytes. */
RMTLAB_API rmtlab_status rmtlab_config_hash(const rmtlab_config* cfg, char* buf,
                                            size_t buflen);

RMTLAB_API void rmtlab_config_destroy(rmtlab_config* cfg);

/* Runs a subcommand. Outputs land under out_dir/<run id>/. threads <= 0 means
 * hardware concurrency; halt_after_units < 0 disables the testing hook.
 * format is "csv" (report + per-table CSVs) or "json" (report only).
 * Returns RMTLAB_OK, RMTLAB_E_VIOLATION (run completed, invariants failed),
 * or an error. *out is set whenever the run produced a report. */
RMTLAB_API rmtlab_status rmtlab_run(const char* subcommand,
                                    const rmtlab_config* cfg,
                                    const char* out_dir, const char* format,
                                    int threads, int halt_after_units,
                                    rmtlab_result** out);

/* Completes an interrupted or partial run from its manifest; a finished run
 * resumes as a no-op and returns its report. */
RMTLAB_API rmtlab_status rmtlab_resume(const char* manifest_path, int threads,
                                       rmtlab_result** out);

/* Serialized report JSON; owned by the result handle. */
RMTLAB_API const char* rmtlab_result_report_json(const rmtlab_result* result);

RMTLAB_API const char* rmtlab_result_run_dir(const rmtlab_result* result);

RMTLAB_API int rmtlab_result_violation_count(const rmtlab_result* result);

RMTLAB_API void rmtlab_result_destroy(rmtlab_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RMTLAB_H */
