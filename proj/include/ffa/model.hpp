#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ffa/data.hpp"
#include "ffa/gev.hpp"

namespace ffa {

// The three regression targets. Mu and Xi use an identity link; Kappa is
// regressed on the log scale, eta_s = log(kappa_s).
enum class Block : int { Mu = 0, Kappa = 1, Xi = 2 };

inline constexpr std::array<Block, 3> kBlocks{Block::Mu, Block::Kappa,
                                              Block::Xi};
const char* block_name(Block b);

// One regression block: coefficients theta, model-averaging inclusion flags,
// site random effects tau, and their precision alpha. Excluded coefficients
// are held at exactly zero; the intercept is always included.
struct RegressionBlock {
  std::vector<double> theta;
  std::vector<std::uint8_t> inclusion;
  std::vector<double> tau;
  double alpha = 1.0;
};

struct HierState {
  std::array<RegressionBlock, 3> blocks;

  RegressionBlock& block(Block b) { return blocks[static_cast<int>(b)]; }
  const RegressionBlock& block(Block b) const {
    return blocks[static_cast<int>(b)];
  }

  static HierState zeros(std::size_t n_covariates, std::size_t n_stations);
  std::size_t n_covariates() const { return blocks[0].theta.size(); }
  std::size_t n_stations() const { return blocks[0].tau.size(); }

  // Enforces the structural invariants (dimensions, excluded => zero,
  // alpha > 0, intercept included); throws NumericError on violation.
  void check(std::size_t n_covariates, std::size_t n_stations) const;
};

struct Priors {
  double theta_sd = 1.0;       // N(0, theta_sd^2) on included coefficients
  double alpha_shape = 0.1;    // Gamma(shape, rate) on each precision
  double alpha_rate = 0.1;
  double inclusion_prob = 0.5; // Bernoulli prior per non-intercept covariate

  void validate() const;
};

// Linear predictor x_s . theta + tau_s for one block.
double linear_predictor(const RegressionBlock& block,
                        const std::vector<double>& covariates,
                        std::size_t station_index);

// Site GEV parameters composed per the hierarchical model:
// mu = x.theta_mu + tau_mu, kappa = exp(x.theta_kappa + tau_kappa),
// xi = x.theta_xi + tau_xi.
gev::GevParams site_params(const HierState& state, const Dataset& data,
                           std::size_t station_index);

// Sum of GEV log densities over one station's years; -inf if any observation
// falls outside the support of the composed parameters.
double station_log_likelihood(const HierState& state, const Dataset& data,
                              std::size_t station_index);

double total_log_likelihood(const HierState& state, const Dataset& data);

// Unnormalized log posterior: data likelihood plus theta, tau and alpha log
// priors. Excluded coefficients contribute no theta-prior term.
double log_posterior(const HierState& state, const Dataset& data,
                     const Priors& priors);

// Log prior terms used by the samplers.
double log_normal_density(double x, double mean, double variance);
double log_gamma_density(double x, double shape, double rate);

}  // namespace ffa
