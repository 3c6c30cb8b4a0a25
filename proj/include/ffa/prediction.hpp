#pragma once

#include <cstddef>
#include <vector>

#include "ffa/gev.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/rng.hpp"

namespace ffa {

struct PredictOptions {
  double credible_level = 0.8;        // pointwise posterior interval
  std::size_t sims_per_component = 50;  // mixture-quantile simulations
  std::uint64_t seed = 0;             // stream for mixture sims / new-site tau

  void validate() const;
};

struct ReturnLevelSummary {
  double prob = 0.0;
  double return_period = 0.0;
  double posterior_median = 0.0;
  double posterior_mean = 0.0;
  double credible_lo = 0.0;
  double credible_hi = 0.0;
  double predictive_quantile = 0.0;
};

// Pooled simulated observations from a set of mixture components (one GEV
// per posterior draw); empirical quantiles of the pool approximate the
// quantiles of the predictive mixture.
class MixturePool {
 public:
  MixturePool(const std::vector<gev::GevParams>& components,
              std::size_t sims_per_component, Rng& rng);
  double quantile(double prob) const;
  std::size_t size() const { return pooled_.size(); }

 private:
  std::vector<double> pooled_;  // sorted
};

// Interpolated empirical quantile (linear between order statistics).
double empirical_quantile(const std::vector<double>& sorted, double prob);

// Per-draw site parameters for a training station, using that station's
// sampled random effects.
std::vector<gev::GevParams> station_draw_params(const PosteriorSamples& samples,
                                                std::size_t station_index);

// Per-draw site parameters for an unobserved site: for each retained draw,
// fresh random effects tau^nu ~ N(0, 1/alpha^nu) are sampled and combined
// with the draw's fixed effects. x must be standardized (leading 1).
std::vector<gev::GevParams> new_site_draw_params(
    const PosteriorSamples& samples, const std::vector<double>& x_standardized,
    Rng& rng);

// Summary of the prob-return-level over a set of per-draw parameters; the
// predictive quantile comes from the supplied mixture pool.
ReturnLevelSummary summarize_return_level(
    const std::vector<gev::GevParams>& draw_params, const MixturePool& pool,
    double prob, double credible_level);

// Posterior + predictive return level at a training station.
ReturnLevelSummary return_level_posterior(const PosteriorSamples& samples,
                                          std::size_t station_index,
                                          double prob,
                                          const PredictOptions& opts);

// The mixture predictive prob-quantile at a training station.
double predictive_quantile(const PosteriorSamples& samples,
                           std::size_t station_index, double prob,
                           std::size_t sims_per_component, Rng& rng);

// Return level at a new site from standardized covariates. Throws
// ConfigError on dimension mismatch, a leading entry != 1, or covariate
// values implausibly far outside the training standardization.
ReturnLevelSummary predict_new_site(const PosteriorSamples& samples,
                                    const std::vector<double>& x_standardized,
                                    double prob, const PredictOptions& opts);

// Batch variants sharing one set of composed parameters (and one mixture
// pool) across all probabilities, so the outputs are monotone in prob.
std::vector<ReturnLevelSummary> return_levels_station(
    const PosteriorSamples& samples, std::size_t station_index,
    const std::vector<double>& probs, const PredictOptions& opts);
std::vector<ReturnLevelSummary> return_levels_new_site(
    const PosteriorSamples& samples, const std::vector<double>& x_standardized,
    const std::vector<double>& probs, const PredictOptions& opts);

}  // namespace ffa
