/* paver.h - C interface to the path-wise mitigation patching pipeline. */
#ifndef PAVER_PAVER_H
#define PAVER_PAVER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PAVER_API __declspec(dllexport)
#else
#define PAVER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line driver. */
typedef enum paver_status {
  PAVER_OK = 0,
  PAVER_ERR_USAGE = 2,
  PAVER_ERR_INPUT = 3,
  PAVER_ERR_ANALYSIS = 4,
  PAVER_ERR_INTERNAL = 5
} paver_status;

typedef enum paver_mode {
  PAVER_MODE_AUTO = 0,
  PAVER_MODE_MINILANG = 1,
  PAVER_MODE_GRAPH = 2
} paver_mode;

typedef struct paver_config paver_config;
typedef struct paver_result paver_result;

PAVER_API const char *paver_version(void);

/* Message of the last failure on the calling thread; never NULL. */
PAVER_API const char *paver_last_error(void);

PAVER_API paver_config *paver_config_create(void);
PAVER_API void paver_config_destroy(paver_config *cfg);

PAVER_API paver_status paver_config_set_program(paver_config *cfg, const char *path);
PAVER_API paver_status paver_config_set_vuln(paver_config *cfg, const char *path);
PAVER_API paver_status paver_config_set_suite(paver_config *cfg, const char *path);
PAVER_API paver_status paver_config_set_out(paver_config *cfg, const char *dir);
PAVER_API paver_status paver_config_set_mode(paver_config *cfg, paver_mode mode);
PAVER_API paver_status paver_config_set_cap(paver_config *cfg, uint64_t cap);
PAVER_API paver_status paver_config_set_max_steps(paver_config *cfg, int64_t steps);
PAVER_API paver_status paver_config_set_jobs(paver_config *cfg, unsigned jobs);
PAVER_API paver_status paver_config_set_seed(paver_config *cfg, uint64_t seed);

/* Each phase writes its report files when an output directory is set and
 * hands back the report through *out (NULL on failure). */
PAVER_API paver_status paver_analyze(const paver_config *cfg, paver_result **out);
PAVER_API paver_status paver_locate(const paver_config *cfg, paver_result **out);
PAVER_API paver_status paver_evaluate(const paver_config *cfg, paver_result **out);
PAVER_API paver_status paver_run_all(const paver_config *cfg, paver_result **out);

PAVER_API const char *paver_result_json(const paver_result *r);
PAVER_API const char *paver_result_text(const paver_result *r);
PAVER_API size_t paver_result_file_count(const paver_result *r);
PAVER_API const char *paver_result_file(const paver_result *r, size_t i);
PAVER_API size_t paver_result_warning_count(const paver_result *r);
PAVER_API void paver_result_destroy(paver_result *r);

#ifdef __cplusplus
}
#endif

#endif
