/* C ABI for the fuzzplan acceptance-sampling library.
 *
 * Kept in sync with src/lib.rs by hand; regenerate with
 * `cbindgen --config cbindgen.toml --crate fuzzplan-capi --output include/fuzzplan.h`
 * when cbindgen is available.
 */

#ifndef FUZZPLAN_H
#define FUZZPLAN_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status code returned by every fallible call. */
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  /* A design request had no feasible plan within its limits. */
  FP_STATUS_INFEASIBLE = 1,
  /* Invalid argument or domain violation. */
  FP_STATUS_INVALID = 2,
  /* Internal consistency failure. */
  FP_STATUS_INTERNAL = 3,
  /* A required pointer was null. */
  FP_STATUS_NULL_POINTER = 4,
  /* A string argument was not valid UTF-8 or JSON. */
  FP_STATUS_BAD_STRING = 5,
} FpStatus;

/* Defect-count model selector. */
typedef enum FpModel {
  FP_MODEL_BINOMIAL = 0,
  FP_MODEL_POISSON = 1,
} FpModel;

/* Opaque deferred-state plan handle. */
typedef struct FpPlan FpPlan;

/* Opaque fuzzy-fraction handle. */
typedef struct FpFuzzy FpFuzzy;

/* Message of the most recent failing call on this thread, or NULL. The
 * pointer stays valid until the next failing call on the same thread. */
const char *fp_last_error_message(void);

/* Create a plan handle; free with fp_plan_free. */
FpStatus fp_plan_new(uint32_t n,
                     uint32_t m,
                     uint32_t k,
                     uint32_t c1,
                     uint32_t c2,
                     FpPlan **out);

void fp_plan_free(FpPlan *plan);

/* Create a triangular fuzzy fraction; free with fp_fuzzy_free. */
FpStatus fp_fuzzy_triangular(double p1, double p2, double p3, FpFuzzy **out);

/* Create a pentagonal fuzzy fraction; free with fp_fuzzy_free. */
FpStatus fp_fuzzy_pentagonal(double x1,
                             double x2,
                             double x3,
                             double x4,
                             double x5,
                             FpFuzzy **out);

void fp_fuzzy_free(FpFuzzy *fuzzy);

/* Crisp acceptance probability of the deferred-state plan. */
FpStatus fp_pa_gmds(const FpPlan *plan, FpModel model, double p, double *out);

/* Cut of the fuzzy fraction at level nu. */
FpStatus fp_alpha_cut(const FpFuzzy *fuzzy,
                      double nu,
                      double *out_lo,
                      double *out_hi);

/* Acceptance-probability band of the plan over the fraction cut at nu. */
FpStatus fp_pa_band(const FpFuzzy *fuzzy,
                    double nu,
                    const FpPlan *plan,
                    FpModel model,
                    double *out_lo,
                    double *out_hi);

/* Average-total-inspection band for lot size lot_size. */
FpStatus fp_ati_band(const FpFuzzy *fuzzy,
                     double nu,
                     const FpPlan *plan,
                     FpModel model,
                     uint32_t lot_size,
                     double *out_lo,
                     double *out_hi);

/* Transform a triangular fraction through inspection error rates. */
FpStatus fp_apply_inspection_errors(const FpFuzzy *fuzzy,
                                    double delta1,
                                    double delta2,
                                    FpFuzzy **out);

/* Acceptance band of the error-perturbed fraction. */
FpStatus fp_pa_band_with_errors(const FpFuzzy *fuzzy,
                                double delta1,
                                double delta2,
                                double nu,
                                const FpPlan *plan,
                                FpModel model,
                                double *out_lo,
                                double *out_hi);

/* Simulate the lot stream; delta1 = delta2 = 0 runs error-free. */
FpStatus fp_simulate_gmds(double p,
                          const FpPlan *plan,
                          FpModel model,
                          uint64_t lots,
                          uint64_t warmup,
                          uint64_t seed,
                          double delta1,
                          double delta2,
                          double *out_rate,
                          double *out_stderr);

/* Design a plan from a JSON request and return a JSON result. The request
 * mirrors the CLI config schema:
 *   {"aql":..., "lql":..., "alpha":..., "beta":..., "nu":..., "model":...,
 *    "limits":..., "family":"gmds"|"mds"|"ssp"|"dsp"}
 * On success and on infeasibility *out_json carries the serialized result;
 * free it with fp_string_free. */
FpStatus fp_design_json(const char *request_json, char **out_json);

/* Free a string returned by fp_design_json. */
void fp_string_free(char *s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FUZZPLAN_H */
