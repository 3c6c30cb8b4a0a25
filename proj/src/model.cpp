#include "ffa/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ffa/error.hpp"

namespace ffa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* block_name(Block b) {
  switch (b) {
    case Block::Mu: return "mu";
    case Block::Kappa: return "kappa";
    case Block::Xi: return "xi";
  }
  return "?";
}

HierState HierState::zeros(std::size_t n_covariates, std::size_t n_stations) {
  HierState s;
  for (auto& blk : s.blocks) {
    blk.theta.assign(n_covariates, 0.0);
    blk.inclusion.assign(n_covariates, 0);
    blk.inclusion[0] = 1;
    blk.tau.assign(n_stations, 0.0);
    blk.alpha = 1.0;
  }
  return s;
}

void HierState::check(std::size_t n_covariates, std::size_t n_stations) const {
  for (const auto& blk : blocks) {
    if (blk.theta.size() != n_covariates ||
        blk.inclusion.size() != n_covariates || blk.tau.size() != n_stations) {
      throw NumericError("hierarchical state dimensions do not match dataset");
    }
    if (!blk.inclusion.empty() && !blk.inclusion[0]) {
      throw NumericError("intercept must always be included");
    }
    if (!(blk.alpha > 0.0) || !std::isfinite(blk.alpha)) {
      throw NumericError("random-effect precision must be positive");
    }
    for (std::size_t i = 0; i < n_covariates; ++i) {
      if (!blk.inclusion[i] && blk.theta[i] != 0.0) {
        throw NumericError("excluded coefficient must be exactly zero");
      }
    }
  }
}

void Priors::validate() const {
  if (!(theta_sd > 0.0) || !(alpha_shape > 0.0) || !(alpha_rate > 0.0)) {
    throw ConfigError("prior scales must be positive");
  }
  if (!(inclusion_prob > 0.0) || inclusion_prob > 1.0) {
    throw ConfigError("inclusion_prob must lie in (0, 1]");
  }
}

double linear_predictor(const RegressionBlock& block,
                        const std::vector<double>& covariates,
                        std::size_t station_index) {
  if (covariates.size() != block.theta.size()) {
    throw NumericError("covariate dimension does not match coefficients");
  }
  double v = block.tau[station_index];
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    v += covariates[j] * block.theta[j];
  }
  return v;
}

gev::GevParams site_params(const HierState& state, const Dataset& data,
                           std::size_t station_index) {
  const auto& x = data.station(station_index).covariates;
  gev::GevParams p;
  p.mu = linear_predictor(state.block(Block::Mu), x, station_index);
  p.kappa = std::exp(linear_predictor(state.block(Block::Kappa), x,
                                      station_index));
  p.xi = linear_predictor(state.block(Block::Xi), x, station_index);
  return p;
}

double station_log_likelihood(const HierState& state, const Dataset& data,
                              std::size_t station_index) {
  const gev::GevParams p = site_params(state, data, station_index);
  double ll = 0.0;
  for (const double y : data.station(station_index).annual_maxima) {
    const double l = gev::log_density(y, p);
    if (l == -kInf) return -kInf;
    ll += l;
  }
  return ll;
}

double total_log_likelihood(const HierState& state, const Dataset& data) {
  double ll = 0.0;
  for (std::size_t s = 0; s < data.n_stations(); ++s) {
    const double l = station_log_likelihood(state, data, s);
    if (l == -kInf) return -kInf;
    ll += l;
  }
  return ll;
}

double log_normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) -
         d * d / (2.0 * variance);
}

double log_gamma_density(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double log_posterior(const HierState& state, const Dataset& data,
                     const Priors& priors) {
  state.check(data.n_covariates(), data.n_stations());
  double lp = total_log_likelihood(state, data);
  if (lp == -kInf) return -kInf;
  const double theta_var = priors.theta_sd * priors.theta_sd;
  for (const auto& blk : state.blocks) {
    for (std::size_t i = 0; i < blk.theta.size(); ++i) {
      if (blk.inclusion[i]) {
        lp += log_normal_density(blk.theta[i], 0.0, theta_var);
      }
    }
    for (const double t : blk.tau) {
      lp += log_normal_density(t, 0.0, 1.0 / blk.alpha);
    }
    lp += log_gamma_density(blk.alpha, priors.alpha_shape, priors.alpha_rate);
  }
  return lp;
}

}  // namespace ffa
