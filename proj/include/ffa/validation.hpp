#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ffa/data.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/prediction.hpp"

namespace ffa {

// ---- probability integral transforms -------------------------------------

struct PitRecord {
  std::string station_id;
  std::size_t year_index = 0;
  double pit = 0.0;
};

// Predictive mixture CDF at y: the mean of the component CDFs.
double mixture_cdf(const std::vector<gev::GevParams>& components, double y);

// PITs of one station's observations under a set of mixture components.
std::vector<PitRecord> station_pits(
    const std::vector<gev::GevParams>& components, const Station& station);

// In-sample PITs for every station, using each station's own sampled random
// effects (the chain's tau draws).
std::vector<PitRecord> in_sample_pits(const PosteriorSamples& samples,
                                      const Dataset& data);

struct PpData {
  std::vector<double> empirical;    // sorted PITs
  std::vector<double> theoretical;  // plotting positions i/(n+1)
  double max_gap = 0.0;
};
PpData pp_plot_data(std::vector<double> pits);

// Kolmogorov-Smirnov distance of a sample to U(0,1).
double ks_statistic_uniform(std::vector<double> values);

// ---- quantile scores ------------------------------------------------------

// s_Q = (y - q)(tau - 1{y <= q}); nonnegative, zero iff y == q.
double quantile_score(double predicted_quantile, double y, double tau);

struct ScoreReport {
  std::string model_name;
  double return_period = 0.0;
  double mean_score = 0.0;
  double ci_lo = 0.0;  // bootstrap 90% interval
  double ci_hi = 0.0;
  std::size_t n_obs = 0;
};

struct ScoreOptions {
  std::size_t n_bootstrap = 1000;
  std::uint64_t seed = 0;
  // Resample whole stations instead of station-year pairs.
  bool station_block = false;
};

// Mean quantile score at tau = 1 - 1/return_period over per-observation
// (predicted quantile, observation) pairs, with a bootstrap 90% interval.
// station_of[i] is only consulted for the station-block bootstrap.
ScoreReport mean_quantile_score(const std::string& model_name,
                                const std::vector<double>& predicted_quantiles,
                                const std::vector<double>& observations,
                                const std::vector<std::size_t>& station_of,
                                double return_period, const ScoreOptions& opts);

// ---- leave-one-out cross-validation ---------------------------------------

struct LooOptions {
  std::vector<double> return_periods{10.0, 50.0, 100.0};
  PredictOptions predict;
  ScoreOptions score;
  std::uint64_t seed = 0;  // master; per-fold seeds are derived
};

struct LooFold {
  std::string held_out_id;
  PosteriorSamples samples;                     // fit without the station
  std::vector<ReturnLevelSummary> predictions;  // one per return period
  std::vector<PitRecord> pits;                  // held-out observations
  std::vector<ScoreReport> scores;              // one per return period
};

struct LooResult {
  PosteriorSamples full_fit;
  std::vector<LooFold> folds;
  std::vector<PitRecord> in_sample_pits;        // fold stations, full fit
  std::vector<ScoreReport> out_of_sample_scores;  // pooled over folds, per T
  std::vector<ScoreReport> in_sample_scores;      // same stations, full fit
};

// Refits without each fold station in turn; predictions, PITs and scores for
// the held-out station use the new-site composition (fresh random effects).
// In-sample counterparts come from one full-data fit.
LooResult loo_cross_validate(const Dataset& data,
                             const std::vector<std::string>& fold_ids,
                             const Priors& priors, const ChainConfig& chain,
                             const LooOptions& opts);

// Box-plot summary of per-fold posterior means of one coefficient.
struct StabilitySummary {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};
StabilitySummary stability_stats(const std::vector<PosteriorSamples>& folds,
                                 std::size_t covariate_index, Block block);

// Posterior mean of one coefficient over a sample's draws.
double posterior_mean_theta(const PosteriorSamples& samples, Block block,
                            std::size_t covariate_index);

// ---- synthetic data -------------------------------------------------------

struct SimulationSpec {
  std::size_t n_stations = 50;
  std::size_t n_years_min = 60;
  std::size_t n_years_max = 60;
  // Coefficients on the standardized covariate scale, leading intercept.
  // All three must share one dimension >= 1.
  std::vector<double> theta_mu{100.0};
  std::vector<double> theta_kappa{-3.0};
  std::vector<double> theta_xi{0.1};
  // Random-effect precisions; +inf means no random effects in that block.
  double alpha_mu = 0.1;
  double alpha_kappa = 100.0;
  double alpha_xi = 2500.0;
  std::uint64_t seed = 1;

  void validate() const;
  std::size_t dim() const { return theta_mu.size(); }
};

struct SimulatedDataset {
  Dataset data;
  HierState truth;  // theta as specified, tau as drawn, alpha as specified
  SimulationSpec spec;
};

// Draws covariates N(0,1), standardizes them, composes site parameters from
// the standardized covariates and drawn random effects, and samples the
// annual maxima. Fully reproducible from spec.seed.
SimulatedDataset simulate_dataset(const SimulationSpec& spec);

}  // namespace ffa
