/* C interface to the ahmsim simulation core.
 *
 * All entry points are thread-compatible: distinct sessions may be used from
 * distinct threads, a single session must not be shared. Strings returned
 * through char** are heap-allocated and must be released with
 * ahmsim_string_free.
 */
#ifndef AHMSIM_C_H
#define AHMSIM_C_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ahmsim_status {
  AHMSIM_OK = 0,
  AHMSIM_ERR_INVALID_ARGUMENT = 1,
  AHMSIM_ERR_SCHEMA = 2,    /* config schema violation */
  AHMSIM_ERR_NUMERICAL = 3, /* numerical failure in a module */
  AHMSIM_ERR_IO = 4,
  AHMSIM_ERR_UNKNOWN = 5
} ahmsim_status;

typedef struct ahmsim_session ahmsim_session;

const char* ahmsim_version(void);

ahmsim_status ahmsim_session_create(ahmsim_session** out);
void ahmsim_session_destroy(ahmsim_session* session);

/* Load an experiment config, either from disk or from a JSON string. */
ahmsim_status ahmsim_session_load_config_file(ahmsim_session* session, const char* path);
ahmsim_status ahmsim_session_load_config_json(ahmsim_session* session, const char* json_text);

/* Optional overrides applied on top of the loaded config. */
ahmsim_status ahmsim_session_set_seed(ahmsim_session* session, uint64_t seed);
ahmsim_status ahmsim_session_set_output_dir(ahmsim_session* session, const char* dir);
ahmsim_status ahmsim_session_set_threads(ahmsim_session* session, int threads);

/* Schema + physics checks without running. *diagnostics_json receives a JSON
 * array of {path, message, fatal}; empty array means a clean config. */
ahmsim_status ahmsim_session_validate(ahmsim_session* session, char** diagnostics_json);

/* Run the experiment; outputs land in the configured directory. */
ahmsim_status ahmsim_session_run(ahmsim_session* session);

/* Directory and file list of the last successful run (JSON). */
ahmsim_status ahmsim_session_outputs(ahmsim_session* session, char** outputs_json);

/* Human-readable message for the last failed call on this session. */
const char* ahmsim_session_last_error(const ahmsim_session* session);

/* Registry of experiment names, descriptions and figure references (JSON
 * array, stable order). Caller frees. */
char* ahmsim_list_experiments_json(void);

void ahmsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* AHMSIM_C_H */
