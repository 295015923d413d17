#ifndef CHEVREP_H
#define CHEVREP_H

/* C interface to the chevrep library. All strings are UTF-8 JSON or text
 * owned by the caller after return and released with chevrep_string_free.
 * Functions return a chevrep_status; on failure chevrep_last_error() gives a
 * message for the calling thread. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CHEVREP_BUILDING)
#define CHEVREP_API __attribute__((visibility("default")))
#else
#define CHEVREP_API
#endif

typedef enum chevrep_status {
  CHEVREP_OK = 0,
  CHEVREP_INVALID_ARGUMENT = 1,
  CHEVREP_CONFIG = 2,
  CHEVREP_BUDGET = 3,
  CHEVREP_PRECONDITION = 4,
  CHEVREP_IO = 5,
  CHEVREP_INTERNAL = 6
} chevrep_status;

typedef enum chevrep_format { CHEVREP_FORMAT_JSON = 0, CHEVREP_FORMAT_TABLE = 1 } chevrep_format;

typedef struct chevrep_config chevrep_config;
typedef struct chevrep_report chevrep_report;

CHEVREP_API const char* chevrep_version(void);
CHEVREP_API const char* chevrep_last_error(void);
CHEVREP_API const char* chevrep_status_name(chevrep_status s);
CHEVREP_API void chevrep_string_free(char* s);

/* Parses and validates a config; unknown fields are rejected. */
CHEVREP_API chevrep_status chevrep_config_parse(const char* json_text, chevrep_config** out);
CHEVREP_API void chevrep_config_free(chevrep_config* cfg);
/* Normalized config with all defaults filled in. */
CHEVREP_API chevrep_status chevrep_config_json(const chevrep_config* cfg, char** out);
/* Nonzero when the config asks for a dry run. */
CHEVREP_API int chevrep_config_dry_run(const chevrep_config* cfg);
/* Planned work as a report, without computing. */
CHEVREP_API chevrep_status chevrep_plan(const chevrep_config* cfg, chevrep_report** out);

CHEVREP_API chevrep_status chevrep_run(const chevrep_config* cfg, chevrep_report** out);
CHEVREP_API void chevrep_report_free(chevrep_report* rep);
CHEVREP_API chevrep_status chevrep_report_render(const chevrep_report* rep, chevrep_format fmt, char** out);
/* Loads a report emitted as JSON so it can be re-rendered. */
CHEVREP_API chevrep_status chevrep_report_parse(const char* json_text, chevrep_report** out);

/* One-shot convenience: config text in, rendered report out (dry runs give
 * the plan). */
CHEVREP_API chevrep_status chevrep_run_json(const char* config_json, char** out);

#ifdef __cplusplus
}
#endif

#endif
