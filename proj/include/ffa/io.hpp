#pragma once

#include <string>
#include <vector>

#include "ffa/data.hpp"
#include "ffa/local.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/prediction.hpp"
#include "ffa/serialize.hpp"
#include "ffa/validation.hpp"

namespace ffa {

// ---- dataset files ---------------------------------------------------------
//
// maxima CSV:     station_id,year,value        (one row per station-year)
// covariates CSV: station_id,<name>,...        (one row per station)
// Lines starting with '#' are ignored. Stations are joined on station_id and
// ordered by id; per-station maxima are ordered by year.

struct LoadResult {
  Dataset data;
  std::vector<std::string> warnings;
};

// Loads and joins the two files. Stations with fewer than min_years of data
// are dropped with a warning, as are covariate rows without any maxima;
// maxima for a station missing from the covariate file are an error.
LoadResult load_dataset(const std::string& maxima_path,
                        const std::string& covariates_path,
                        std::size_t min_years = 20);

// Writes maxima.csv / covariates.csv (raw covariates, no constant column)
// for a dataset; simulate also writes truth.json via write_truth_json.
void write_dataset_csv(const Dataset& data, const std::string& out_dir);
void write_truth_json(const SimulatedDataset& sim, const std::string& out_dir);

// ---- run configuration ------------------------------------------------------

struct RunConfig {
  std::uint64_t seed = 12345;  // master; every component stream derives from it

  std::string maxima_path;
  std::string covariates_path;
  std::string output_dir = "ffa-run";

  std::string model = "regional";  // "regional" or "local"
  std::string station;             // local fit / prediction target

  ChainConfig chain;
  Priors priors;
  LocalPriors local_priors;
  PredictOptions predict;
  ScoreOptions score;
  SimulationSpec sim;

  std::vector<double> return_periods{10.0, 50.0, 100.0, 1000.0};
  std::vector<std::string> folds;
  std::size_t n_random_folds = 0;  // used when folds is empty

  bool preselect = false;              // stepwise-AIC covariate pre-selection
  bool preselect_log_response = false;
  std::size_t min_years = 20;
  std::string resume_path;

  // Derives all component seeds from the master seed; parsing an echoed
  // config therefore reproduces the run exactly.
  void resolve_seeds();
  void validate_common() const;
};

RunConfig run_config_from_json(const Json& j, RunConfig defaults = {});
Json to_json(const RunConfig& c);
RunConfig load_run_config_file(const std::string& path);

// ---- artifact writers --------------------------------------------------------

// Fit artifacts: checkpoint.bin, inclusion_probabilities.csv,
// theta_summary.csv, alpha_summary.csv, station_parameters.csv,
// acceptance_rates.csv, manifest.json.
void write_fit_artifacts(const PosteriorSamples& samples,
                         const std::string& out_dir);

struct LabeledReturnLevel {
  std::string site;
  ReturnLevelSummary summary;
};
std::string return_levels_to_csv(const std::vector<LabeledReturnLevel>& rows);
void write_return_levels_csv(const std::vector<LabeledReturnLevel>& rows,
                             const std::string& path);

// Cross-validation artifacts (per-fold directories plus pooled summaries).
void write_cv_artifacts(const LooResult& result, const std::string& out_dir);

// In-sample validation artifacts for a fitted model on a dataset:
// pit.csv, pp.csv, ks.json, scores.csv, manifest.json.
void write_validation_artifacts(const PosteriorSamples& samples,
                                const Dataset& data, const RunConfig& cfg,
                                const std::string& out_dir);

// Filesystem helpers shared by the CLI layer.
void ensure_directory(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Canonical number formatting for artifacts (round-trip exact, stable).
std::string format_double(double v);

}  // namespace ffa
