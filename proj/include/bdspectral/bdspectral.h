#ifndef BDSPECTRAL_BDSPECTRAL_H
#define BDSPECTRAL_BDSPECTRAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(BDS_BUILDING_LIBRARY)
#define BDS_API __attribute__((visibility("default")))
#else
#define BDS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the CLI exit codes for the first four. */
typedef enum bds_status {
  BDS_OK = 0,
  BDS_VERIFY_FAILED = 1,
  BDS_DOMAIN_ERROR = 2,
  BDS_IO_ERROR = 3,
  BDS_INVALID_ARGUMENT = 4,
  BDS_INTERNAL_ERROR = 5
} bds_status;

/* A validated, solved chain. Immutable; may be shared across threads. */
typedef struct bds_scenario bds_scenario;

/* Output of one request: CSV text, a JSON sidecar and the numbers behind
   the CSV as a row-major table. */
typedef struct bds_result bds_result;

BDS_API const char* bds_version(void);

/* JSON object {"error", "subject", "message", "status"} describing the last
   failure on the calling thread, or "null". */
BDS_API const char* bds_last_error(void);

BDS_API bds_status bds_list_families(bds_result** out);

/* config_json follows the scenario schema in docs/schemas.md. */
BDS_API bds_status bds_scenario_create(const char* config_json, bds_scenario** out);
BDS_API void bds_scenario_destroy(bds_scenario* scenario);
/* The normalised config; feeding it back to bds_scenario_create gives the
   same scenario. Free with bds_free_string. */
BDS_API bds_status bds_scenario_config(const bds_scenario* scenario, char** json_out);
BDS_API void bds_free_string(char* s);

/* `initial` is "delta:Y", "uniform" or "file:PATH" (CSV rows x,value). */
BDS_API bds_status bds_rates(const bds_scenario* scenario, bds_result** out);
BDS_API bds_status bds_stationary(const bds_scenario* scenario, bds_result** out);
BDS_API bds_status bds_evolve(const bds_scenario* scenario, const char* initial, long steps, bds_result** out);
BDS_API bds_status bds_evolve_continuous(const bds_scenario* scenario, const char* initial, double t,
                                         bds_result** out);
BDS_API bds_status bds_transition(const bds_scenario* scenario, long steps, bds_result** out);
BDS_API bds_status bds_transition_continuous(const bds_scenario* scenario, double t, bds_result** out);

/* level 0 runs the fast suite, 1 adds Monte Carlo. corrupt_dn2 > 0 scales
   d_1^2 first (negative control). BDS_VERIFY_FAILED still fills *out. */
BDS_API bds_status bds_verify(const bds_scenario* scenario, int level, double corrupt_dn2, bds_result** out);
BDS_API bds_status bds_simulate(const bds_scenario* scenario, long start, long steps, uint64_t samples,
                                bds_result** out);

BDS_API bds_status bds_mirror_spectrum(const bds_scenario* scenario, bds_result** out);
BDS_API bds_status bds_mirror_evolve(const bds_scenario* scenario, const char* initial, long steps,
                                     bds_result** out);
BDS_API bds_status bds_dual(const bds_scenario* scenario, bds_result** out);

BDS_API const char* bds_result_csv(const bds_result* result);
BDS_API const char* bds_result_json(const bds_result* result);
BDS_API size_t bds_result_rows(const bds_result* result);
BDS_API size_t bds_result_cols(const bds_result* result);
BDS_API const double* bds_result_data(const bds_result* result);
BDS_API void bds_result_destroy(bds_result* result);

#ifdef __cplusplus
}
#endif

#endif
