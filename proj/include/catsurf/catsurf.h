#ifndef CATSURF_CATSURF_H
#define CATSURF_CATSURF_H

/*
 * C interface to the catalytic surface library.
 *
 * Objects are opaque handles created by *_create / producer functions and
 * released with the matching *_destroy. Every fallible call returns a
 * catsurf_status; on failure catsurf_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread).
 *
 * Results come back as a catsurf_report holding a JSON document, a CSV body
 * and named numeric values. Strings returned by accessors stay valid until
 * the owning handle is destroyed.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CATSURF_API __declspec(dllexport)
#else
#define CATSURF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum catsurf_status {
  CATSURF_OK = 0,
  CATSURF_ERR_NULL = 1,
  CATSURF_ERR_INVALID_ARGUMENT = 2,
  CATSURF_ERR_OUT_OF_RANGE = 3,
  CATSURF_ERR_NOT_FOUND = 4,
  CATSURF_ERR_INTERNAL = 5
} catsurf_status;

typedef enum catsurf_boundary { CATSURF_TORUS = 0, CATSURF_BLOCKED = 1 } catsurf_boundary;

/* Pass as the gas count to select the infinite-gas variant. */
#define CATSURF_GAS_INFINITE 0

typedef struct catsurf_model catsurf_model;
typedef struct catsurf_scores catsurf_scores;
typedef struct catsurf_report catsurf_report;

CATSURF_API const char* catsurf_version(void);
/* Identifier of the per-site random stream mixer. */
CATSURF_API const char* catsurf_mixer_id(void);
CATSURF_API const char* catsurf_status_string(catsurf_status status);
CATSURF_API const char* catsurf_last_error(void);

/* Models ---------------------------------------------------------------- */

/* Gas 1 at rate p1, every other gas at (1 - p1)/(n - 1). */
CATSURF_API catsurf_status catsurf_model_create(int n, double p1, catsurf_model** out);
CATSURF_API catsurf_status catsurf_model_create_rates(const double* rates, size_t count,
                                                      catsurf_model** out);
CATSURF_API const char* catsurf_model_describe(const catsurf_model* model);
CATSURF_API void catsurf_model_destroy(catsurf_model* model);

/* Score tables ---------------------------------------------------------- */

CATSURF_API catsurf_status catsurf_scores_table1(catsurf_scores** out);
CATSURF_API catsurf_status catsurf_scores_zeros(int length, int n, catsurf_scores** out);
CATSURF_API catsurf_status catsurf_scores_from_json(const char* json, catsurf_scores** out);
CATSURF_API catsurf_status catsurf_scores_get(const catsurf_scores* scores, const char* block,
                                              double* value);
CATSURF_API catsurf_status catsurf_scores_set(catsurf_scores* scores, const char* block,
                                              double value);
CATSURF_API const char* catsurf_scores_json(catsurf_scores* scores);
CATSURF_API void catsurf_scores_destroy(catsurf_scores* scores);

/* Reports --------------------------------------------------------------- */

CATSURF_API const char* catsurf_report_json(const catsurf_report* report);
CATSURF_API const char* catsurf_report_csv(const catsurf_report* report);
/* CATSURF_ERR_NOT_FOUND when the report has no such value. */
CATSURF_API catsurf_status catsurf_report_number(const catsurf_report* report, const char* key,
                                                 double* value);
CATSURF_API void catsurf_report_destroy(catsurf_report* report);

/* Lattice --------------------------------------------------------------- */

/* One arrival of `gas` at `site` of a digit-string configuration.
   Numbers: kind (0 stick, 1 react, 2 noop), victim (-1 if none). */
CATSURF_API catsurf_status catsurf_apply_arrival(const char* config, catsurf_boundary boundary,
                                                 size_t site, uint64_t gas, int prefer_left,
                                                 catsurf_report** out);
/* W of a blocked digit-string configuration; +inf when every site is 1. */
CATSURF_API catsurf_status catsurf_weight(const char* config, const catsurf_scores* scores,
                                          double* value);

/* Certificates and scores ----------------------------------------------- */

/* Numbers: c, positive (0/1). followers <= 0 selects length + 3. */
CATSURF_API catsurf_status catsurf_verify_certificate(const catsurf_model* model, int length,
                                                      const catsurf_scores* scores,
                                                      int followers, catsurf_report** out);

typedef struct catsurf_solve_options {
  int n;              /* gas count or CATSURF_GAS_INFINITE */
  int length;
  double p1;
  double tolerance;
  int max_sweeps;
  int followers;      /* <= 0: length + 3 */
  double damping;
} catsurf_solve_options;

CATSURF_API void catsurf_solve_options_init(catsurf_solve_options* options);
/* Numbers: converged, sweeps, reference_drift, certified. `scores` may be
   NULL; otherwise it receives the solved table. */
CATSURF_API catsurf_status catsurf_solve_scores(const catsurf_solve_options* options,
                                                catsurf_report** out,
                                                catsurf_scores** scores);

/* Numbers: p1_star (NaN when nothing certifies), found. */
CATSURF_API catsurf_status catsurf_threshold(int n, int length, int followers, double tolerance,
                                             int max_sweeps, catsurf_report** out);

/* Simulation ------------------------------------------------------------ */

typedef struct catsurf_sim_options {
  size_t size;
  catsurf_boundary boundary;
  uint64_t runs;
  uint64_t seed;
  uint64_t max_events; /* 0: 10^4 x size */
  unsigned threads;    /* 0: hardware concurrency */
} catsurf_sim_options;

CATSURF_API void catsurf_sim_options_init(catsurf_sim_options* options);

/* Absorption frequencies from all-0. Numbers: gas1_frequency,
   gas1_stderr, undecided_frequency, mean_time. */
CATSURF_API catsurf_status catsurf_simulate(const catsurf_model* model,
                                            const catsurf_sim_options* options,
                                            catsurf_report** out);

/* One trajectory. max_time <= 0 means unbounded. The CSV is the event log
   thinned by log_stride (0 disables it). Numbers: events, time, absorbed
   (gas or -1), fingerprint_hi, fingerprint_lo. */
CATSURF_API catsurf_status catsurf_trajectory(const catsurf_model* model, const char* initial,
                                              catsurf_boundary boundary, uint64_t seed,
                                              double max_time, uint64_t max_events,
                                              uint64_t log_stride, catsurf_report** out);

/* Numbers: inversions, crossing (NaN when none). */
CATSURF_API catsurf_status catsurf_sweep(int n, const double* grid, size_t count,
                                         const catsurf_sim_options* options,
                                         catsurf_report** out);

/* Numbers: naive_mean, naive_stderr, compensator_mean, compensator_stderr,
   initial_generator_drift. */
CATSURF_API catsurf_status catsurf_empirical_drift(const catsurf_model* model,
                                                   const char* initial,
                                                   const catsurf_scores* scores, double horizon,
                                                   uint64_t replicas, uint64_t seed,
                                                   unsigned threads, catsurf_report** out);

/* Coupling -------------------------------------------------------------- */

/* Replays a script (`site pair_a pair_b L|R` per line) from two digit-string
   configurations. Numbers: steps, violations (count at the end). */
CATSURF_API catsurf_status catsurf_couple_replay(const char* script, const char* initial_a,
                                                 const char* initial_b,
                                                 catsurf_boundary boundary,
                                                 catsurf_report** out);

/* Monte Carlo violation frequency. With count == 0 the built-in
   counterexample law is used. Numbers: fraction, violating, runs. */
CATSURF_API catsurf_status catsurf_couple_mc(const uint64_t* gas_a, const uint64_t* gas_b,
                                             const double* probabilities, size_t count,
                                             size_t size, catsurf_boundary boundary,
                                             double horizon, uint64_t runs, uint64_t seed,
                                             unsigned threads, catsurf_report** out);

#ifdef __cplusplus
}
#endif

#endif /* CATSURF_CATSURF_H */
