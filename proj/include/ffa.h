/*
 * ffa — regional flood frequency analysis, C API.
 *
 * A thin, stable surface over the C++ core: opaque handles, integer status
 * codes, and UTF-8 strings. Every function returns FFA_OK (0) on success or
 * one of the FFA_ERR_* codes; ffa_last_error() describes the most recent
 * failure on the calling thread. Strings returned through char** outputs are
 * heap-allocated and must be released with ffa_string_free().
 *
 * Configuration is passed as a JSON document with the same schema the CLI
 * uses (see the project README); unknown fields are rejected.
 */
#ifndef FFA_H
#define FFA_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define FFA_OK 0
#define FFA_ERR_INTERNAL 1
#define FFA_ERR_CONFIG 2
#define FFA_ERR_DATA 3
#define FFA_ERR_NUMERIC 4

typedef struct ffa_dataset ffa_dataset;
typedef struct ffa_samples ffa_samples;

const char* ffa_version(void);

/* Message for the last failing call on this thread; never NULL. */
const char* ffa_last_error(void);

void ffa_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

/* Loads and joins a maxima CSV (station_id,year,value) with a covariate CSV
 * (station_id,<name>,...). Stations with fewer than min_years records are
 * dropped with a warning (pass 0 for the default of 20). */
int ffa_dataset_load(const char* maxima_csv, const char* covariates_csv,
                     int min_years, ffa_dataset** out);

/* Synthesizes a dataset from the "simulate" section of a config document;
 * the generating parameters are kept on the handle for ffa_dataset_write. */
int ffa_dataset_simulate(const char* config_json, ffa_dataset** out);

void ffa_dataset_free(ffa_dataset* d);

int ffa_dataset_n_stations(const ffa_dataset* d);
int ffa_dataset_n_covariates(const ffa_dataset* d);
int ffa_dataset_station_id(const ffa_dataset* d, size_t index, char** out);

/* Newline-joined loader warnings (empty string when none). */
int ffa_dataset_warnings(const ffa_dataset* d, char** out);

/* Writes maxima.csv and covariates.csv (plus truth.json for simulated
 * datasets) into out_dir. */
int ffa_dataset_write(const ffa_dataset* d, const char* out_dir);

/* ---- fitting ------------------------------------------------------------ */

/* Runs the regional hierarchical chain. Honors config fields: chain, priors,
 * preselect, resume, output (for mid-run checkpoints when
 * chain.checkpoint_every > 0). */
int ffa_fit(const ffa_dataset* d, const char* config_json, ffa_samples** out);

/* Single-station GEV/Gumbel fit under the record-length rule. */
int ffa_fit_local(const ffa_dataset* d, const char* station_id,
                  const char* config_json, ffa_samples** out);

void ffa_samples_free(ffa_samples* s);

int ffa_samples_save(const ffa_samples* s, const char* path);
int ffa_samples_load(const char* path, ffa_samples** out);
int ffa_samples_n_draws(const ffa_samples* s);

/* Posterior summaries, inclusion table, per-station parameters, acceptance
 * rates and a checkpoint, written into out_dir. */
int ffa_write_fit_artifacts(const ffa_samples* s, const char* out_dir);

/* ---- prediction ----------------------------------------------------------- */

/* Return-level table (CSV text) for a fitted station at the given return
 * periods. config_json may carry a "prediction" section. */
int ffa_predict_station(const ffa_samples* s, const char* station_id,
                        const double* return_periods, size_t n_periods,
                        const char* config_json, char** csv_out);

/* Return-level table for an ungauged site. covariates are raw values in the
 * training covariate order, without the constant column; they are
 * standardized with the training statistics. */
int ffa_predict_new_site(const ffa_samples* s, const double* covariates,
                         size_t n_covariates, const double* return_periods,
                         size_t n_periods, const char* config_json,
                         char** csv_out);

/* ---- validation pipelines --------------------------------------------------- */

/* Leave-one-out cross-validation over config.folds (or n_random_folds);
 * writes per-fold and pooled artifacts into out_dir. */
int ffa_cv_run(const ffa_dataset* d, const char* config_json,
               const char* out_dir);

/* In-sample reliability artifacts (PIT, PP, KS, quantile scores) for a
 * fitted model on a dataset. */
int ffa_validate_run(const ffa_samples* s, const ffa_dataset* d,
                     const char* config_json, const char* out_dir);

/* Stepwise-AIC covariate pre-selection; returns a JSON object mapping
 * covariate names to 0/1 inclusion flags. */
int ffa_stepwise_select(const ffa_dataset* d, int log_response,
                        char** json_out);

/* Expands a (possibly partial) config document into the fully resolved form
 * actually used by a run, with every default and derived seed filled in.
 * Feeding the result back reproduces the run exactly. */
int ffa_resolve_config(const char* config_json, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* FFA_H */
