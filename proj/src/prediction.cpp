#include "ffa/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffa/error.hpp"

namespace ffa {

void PredictOptions::validate() const {
  if (!(credible_level > 0.0) || !(credible_level < 1.0)) {
    throw ConfigError("credible_level must lie in (0, 1)");
  }
  if (sims_per_component < 1) {
    throw ConfigError("sims_per_component must be >= 1");
  }
}

double empirical_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw NumericError("empirical quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

MixturePool::MixturePool(const std::vector<gev::GevParams>& components,
                         std::size_t sims_per_component, Rng& rng) {
  pooled_.reserve(components.size() * sims_per_component);
  for (const auto& p : components) {
    for (std::size_t k = 0; k < sims_per_component; ++k) {
      pooled_.push_back(gev::sample_one(p, rng));
    }
  }
  std::sort(pooled_.begin(), pooled_.end());
}

double MixturePool::quantile(double prob) const {
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw NumericError("mixture quantile requires prob in (0,1)");
  }
  return empirical_quantile(pooled_, prob);
}

std::vector<gev::GevParams> station_draw_params(const PosteriorSamples& samples,
                                                std::size_t station_index) {
  if (station_index >= samples.n_stations()) {
    throw DataError("station index " + std::to_string(station_index) +
                    " out of range");
  }
  const auto& x = samples.station_covariates[station_index];
  std::vector<gev::GevParams> out;
  out.reserve(samples.draws.size());
  for (const auto& draw : samples.draws) {
    gev::GevParams p;
    p.mu = linear_predictor(draw.block(Block::Mu), x, station_index);
    p.kappa =
        std::exp(linear_predictor(draw.block(Block::Kappa), x, station_index));
    p.xi = linear_predictor(draw.block(Block::Xi), x, station_index);
    out.push_back(p);
  }
  return out;
}

namespace {

void check_new_site_covariates(const PosteriorSamples& samples,
                               const std::vector<double>& x) {
  if (x.size() != samples.covariate_names.size()) {
    throw ConfigError("covariate vector has dimension " +
                      std::to_string(x.size()) + ", expected " +
                      std::to_string(samples.covariate_names.size()));
  }
  if (x.empty() || x[0] != 1.0) {
    throw ConfigError("covariate vector must start with the constant 1");
  }
  // Standardized training covariates are z-scores; values this large mean
  // the caller almost surely passed raw covariates.
  constexpr double kZLimit = 25.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || std::abs(x[j]) > kZLimit) {
      throw ConfigError(
          "covariate '" + samples.covariate_names[j] + "' = " +
          std::to_string(x[j]) +
          " is not a plausible standardized value; standardize with the "
          "training statistics first");
    }
  }
}

double dot_theta(const RegressionBlock& blk, const std::vector<double>& x) {
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += x[j] * blk.theta[j];
  return v;
}

}  // namespace

std::vector<gev::GevParams> new_site_draw_params(
    const PosteriorSamples& samples, const std::vector<double>& x,
    Rng& rng) {
  check_new_site_covariates(samples, x);
  std::vector<gev::GevParams> out;
  out.reserve(samples.draws.size());
  for (const auto& draw : samples.draws) {
    const double tau_mu =
        rng.normal(0.0, std::sqrt(1.0 / draw.block(Block::Mu).alpha));
    const double tau_kappa =
        rng.normal(0.0, std::sqrt(1.0 / draw.block(Block::Kappa).alpha));
    const double tau_xi =
        rng.normal(0.0, std::sqrt(1.0 / draw.block(Block::Xi).alpha));
    gev::GevParams p;
    p.mu = dot_theta(draw.block(Block::Mu), x) + tau_mu;
    p.kappa = std::exp(dot_theta(draw.block(Block::Kappa), x) + tau_kappa);
    p.xi = dot_theta(draw.block(Block::Xi), x) + tau_xi;
    out.push_back(p);
  }
  return out;
}

ReturnLevelSummary summarize_return_level(
    const std::vector<gev::GevParams>& draw_params, const MixturePool& pool,
    double prob, double credible_level) {
  if (draw_params.empty()) {
    throw NumericError("no posterior draws to summarize");
  }
  std::vector<double> z;
  z.reserve(draw_params.size());
  for (const auto& p : draw_params) z.push_back(gev::quantile(prob, p));
  std::sort(z.begin(), z.end());

  ReturnLevelSummary s;
  s.prob = prob;
  s.return_period = gev::return_period_of(prob);
  s.posterior_median = empirical_quantile(z, 0.5);
  s.posterior_mean =
      std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  const double tail = 0.5 * (1.0 - credible_level);
  s.credible_lo = empirical_quantile(z, tail);
  s.credible_hi = empirical_quantile(z, 1.0 - tail);
  s.predictive_quantile = pool.quantile(prob);
  return s;
}

std::vector<ReturnLevelSummary> return_levels_station(
    const PosteriorSamples& samples, std::size_t station_index,
    const std::vector<double>& probs, const PredictOptions& opts) {
  opts.validate();
  const auto params = station_draw_params(samples, station_index);
  Rng rng(derive_seed(opts.seed, "predict.station", station_index));
  const MixturePool pool(params, opts.sims_per_component, rng);
  std::vector<ReturnLevelSummary> out;
  out.reserve(probs.size());
  for (const double p : probs) {
    out.push_back(summarize_return_level(params, pool, p,
                                         opts.credible_level));
  }
  return out;
}

ReturnLevelSummary return_level_posterior(const PosteriorSamples& samples,
                                          std::size_t station_index,
                                          double prob,
                                          const PredictOptions& opts) {
  return return_levels_station(samples, station_index, {prob}, opts).front();
}

double predictive_quantile(const PosteriorSamples& samples,
                           std::size_t station_index, double prob,
                           std::size_t sims_per_component, Rng& rng) {
  const auto params = station_draw_params(samples, station_index);
  const MixturePool pool(params, sims_per_component, rng);
  return pool.quantile(prob);
}

std::vector<ReturnLevelSummary> return_levels_new_site(
    const PosteriorSamples& samples, const std::vector<double>& x,
    const std::vector<double>& probs, const PredictOptions& opts) {
  opts.validate();
  Rng rng(derive_seed(opts.seed, "predict.new_site"));
  const auto params = new_site_draw_params(samples, x, rng);
  const MixturePool pool(params, opts.sims_per_component, rng);
  std::vector<ReturnLevelSummary> out;
  out.reserve(probs.size());
  for (const double p : probs) {
    out.push_back(summarize_return_level(params, pool, p,
                                         opts.credible_level));
  }
  return out;
}

ReturnLevelSummary predict_new_site(const PosteriorSamples& samples,
                                    const std::vector<double>& x,
                                    double prob, const PredictOptions& opts) {
  return return_levels_new_site(samples, x, {prob}, opts).front();
}

}  // namespace ffa
