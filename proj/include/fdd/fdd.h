/* SPDX-License-Identifier: Apache-2.0 */
#ifndef FDD_FDD_H
#define FDD_FDD_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(FDD_BUILDING)
#    define FDD_API __declspec(dllexport)
#  else
#    define FDD_API __declspec(dllimport)
#  endif
#else
#  define FDD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdd_status {
  FDD_OK = 0,
  FDD_ERR_INVALID_ARGUMENT = 1, /* null handle, bad index, unknown key */
  FDD_ERR_CONFIG = 2,           /* malformed config text or value */
  FDD_ERR_IO = 3,
  FDD_ERR_NUMERIC = 4,          /* singular system, Newton failure, ... */
  FDD_ERR_NOT_NUMBER = 5,       /* report cell is empty or text */
  FDD_ERR_INTERNAL = 6
} fdd_status;

typedef struct fdd_config fdd_config;
typedef struct fdd_report fdd_report;

/* Library version, e.g. "0.1.0". */
FDD_API const char* fdd_version(void);

/* Message of the last failed call on this thread; "" if none. */
FDD_API const char* fdd_last_error(void);

/* Experiment names: poisson, poisson-mixed, quadrature, infsup, condition,
 * ns-manufactured, cavity, dump-lambda. */
FDD_API fdd_status fdd_config_new(const char* experiment, fdd_config** out);

/* Parse key = value text. `experiment` may be NULL when the text names one. */
FDD_API fdd_status fdd_config_parse(const char* text, const char* experiment, fdd_config** out);
FDD_API fdd_status fdd_config_load(const char* path, const char* experiment, fdd_config** out);

FDD_API fdd_status fdd_config_set(fdd_config* config, const char* key, const char* value);

/* Copies the value text into buf (always NUL-terminated when capacity > 0);
 * *needed receives the full length without the terminator. */
FDD_API fdd_status fdd_config_get(const fdd_config* config, const char* key, char* buf, size_t capacity,
                                  size_t* needed);

FDD_API void fdd_config_free(fdd_config* config);

/* Runs the experiment. Row-level failures land in the report's status column;
 * only invalid configs fail the call. */
FDD_API fdd_status fdd_run(const fdd_config* config, fdd_report** out);

FDD_API size_t fdd_report_rows(const fdd_report* report);
FDD_API size_t fdd_report_columns(const fdd_report* report);

/* Column name, or NULL for an invalid index. Valid while the report lives. */
FDD_API const char* fdd_report_column_name(const fdd_report* report, size_t column);

FDD_API fdd_status fdd_report_number(const fdd_report* report, size_t row, size_t column, double* value);

/* Cell as text (numbers formatted as in the CSV). Valid until the next call on this thread. */
FDD_API fdd_status fdd_report_text(const fdd_report* report, size_t row, size_t column, const char** text);

/* NULL or "-" writes to stdout. */
FDD_API fdd_status fdd_report_write_csv(const fdd_report* report, const char* path);
FDD_API fdd_status fdd_report_write_json(const fdd_report* report, const char* path);

FDD_API void fdd_report_free(fdd_report* report);

#ifdef __cplusplus
}
#endif

#endif /* FDD_FDD_H */
