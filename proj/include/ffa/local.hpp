#pragma once

#include "ffa/data.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/prediction.hpp"

namespace ffa {

// Priors for the single-station model: vague normals on mu and eta = log
// kappa, and a mildly informative N(0, xi_sd^2) on the shape to regularize
// short records.
struct LocalPriors {
  double mu_sd = 1e6;
  double eta_sd = 10.0;
  double xi_sd = 0.25;

  void validate() const;
};

// Single-station Bayesian GEV/Gumbel fit following the national record-length
// rule: a 3-parameter GEV when n_years >= 50, a Gumbel (xi held at exactly 0)
// when 20 <= n_years < 50, and a refusal below 20 years. The sampler updates
// mu, eta and (in GEV mode) xi in turn with the same Gaussian-approximation /
// random-walk machinery as the regional chain.
//
// The result is a single-site PosteriorSamples (one intercept-only covariate,
// one station), so the prediction operations apply unchanged.
PosteriorSamples fit_local(const Station& station, const ChainConfig& config,
                           const LocalPriors& priors = {});

// Return-level summary from a local fit; identical to
// return_level_posterior at the fit's single site.
ReturnLevelSummary local_return_level(const PosteriorSamples& samples,
                                      double prob,
                                      const PredictOptions& opts);

}  // namespace ffa
