#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ffa/data.hpp"
#include "ffa/model.hpp"
#include "ffa/rng.hpp"

namespace ffa {

struct ChainConfig {
  std::size_t n_iterations = 100000;
  std::size_t n_burnin = 20000;
  std::size_t thin = 1;
  std::uint64_t seed = 12345;

  // Fallback random-walk step sizes, used when the Gaussian approximation
  // has non-positive curvature or a derivative probe leaves the support.
  double rw_step_theta = 0.1;
  double rw_step_tau = 0.25;

  // Proposals producing any site |xi_s| >= xi_bound are rejected outright;
  // keeps the chain away from infinite-mean GEV regimes.
  double xi_bound = 1.0;

  // When > 0, the thinning interval is raised so at most this many draws are
  // stored; 0 keeps every post-burn-in draw at the configured thin.
  std::size_t max_stored_draws = 0;

  // Write a resumable checkpoint every k iterations (0 = only on completion,
  // and only when a checkpoint path is supplied to run_chain).
  std::size_t checkpoint_every = 0;

  void validate() const;
  std::size_t effective_thin() const;
  std::size_t n_retained() const;
};

// Gaussian approximation of a scalar log-target from its first two
// derivatives at the current point: with b = f1 - f2*current and c = -f2 the
// proposal is N(b/c, 1/c). Returns nullopt when c <= 0 (or non-finite), in
// which case the caller falls back to a symmetric random walk.
struct GaussianApprox {
  double mean = 0.0;
  double variance = 0.0;
};
std::optional<GaussianApprox> gaussian_approx_proposal(double f1, double f2,
                                                       double current);

// Metropolis-Hastings acceptance:
//   log r = (log_target_new - log_target_old)
//         + (log_q_old_given_new - log_q_new_given_old).
// Draws one uniform unless the new target is -inf.
bool mh_accept(double log_target_new, double log_target_old,
               double log_q_old_given_new, double log_q_new_given_old,
               Rng& rng);

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

// First and second derivatives of one observation's GEV log density with
// respect to the kappa-block random effect tau, where
// kappa = exp(eta_hat + tau) and eps = y - mu. The xi = 0 branch is taken
// for |xi| < gev::kXiEps. Throws NumericError when the observation lies
// outside the support at the expansion point.
Derivatives dloglik_dtau_kappa(double y, double mu, double xi, double eta_hat,
                               double tau);

struct AcceptCount {
  std::uint64_t accepted = 0;
  std::uint64_t attempted = 0;
};

// Retained draws plus everything needed to predict from them and to resume
// the chain: the training covariates, standardization, configuration, and
// the sampler state at the last completed iteration.
struct PosteriorSamples {
  std::vector<HierState> draws;
  ChainConfig config;
  Priors priors;
  std::string model_type = "regional";  // or "local-gev" / "local-gumbel"

  std::vector<std::string> covariate_names;
  std::vector<std::string> station_ids;
  Standardization standardization;
  std::vector<std::vector<double>> station_covariates;  // standardized

  std::size_t completed_iterations = 0;
  HierState last_state;
  std::string rng_state;
  std::map<std::string, AcceptCount> accept_counts;

  std::size_t n_draws() const { return draws.size(); }
  std::size_t n_stations() const { return station_ids.size(); }
  std::map<std::string, double> acceptance_rates() const;
  std::size_t station_index(const std::string& id) const;
};

// One Metropolis-within-Gibbs sweep engine over HierState. Exposed so the
// per-update operations can be driven directly in tests; run_chain is the
// ordinary entry point.
class Sampler {
 public:
  Sampler(const Dataset& data, const Priors& priors, const ChainConfig& cfg);

  HierState initial_state() const;

  // One full sweep: for each block mu -> kappa -> xi, update theta,
  // inclusion, tau, then alpha.
  void sweep(HierState& state, Rng& rng);

  void update_theta(Block b, HierState& state, Rng& rng);
  void update_inclusion(Block b, HierState& state, Rng& rng);
  void update_tau(Block b, HierState& state, Rng& rng);
  void update_alpha(Block b, HierState& state, Rng& rng);

  const std::map<std::string, AcceptCount>& accept_counts() const {
    return counts_;
  }
  void set_accept_counts(const std::map<std::string, AcceptCount>& c) {
    counts_ = c;
  }

  // Sampler-side likelihoods: identical to station_log_likelihood /
  // total_log_likelihood except that states violating the xi bound (or
  // composing non-finite parameters) evaluate to -inf instead of throwing.
  double station_loglik(const HierState& state, std::size_t s) const;
  double total_loglik(const HierState& state) const;

 private:
  void record(const std::string& key, bool accepted);

  // Analytic likelihood derivatives for the kappa block (theta_i at value v,
  // or tau_s at value v), summed over observations; nullopt when any term
  // leaves the support or overflows.
  std::optional<Derivatives> kappa_theta_loglik_derivs(HierState& state,
                                                       std::size_t i,
                                                       double v) const;
  std::optional<Derivatives> kappa_tau_loglik_derivs(const HierState& state,
                                                     std::size_t s,
                                                     double v) const;

  const Dataset& data_;
  Priors priors_;
  ChainConfig cfg_;
  std::map<std::string, AcceptCount> counts_;
};

// Runs the sampler. If checkpoint_path is nonempty a resumable checkpoint is
// written there (every config.checkpoint_every iterations and at the end).
// Passing resume continues that run: the combined draw sequence is
// bit-identical to an uninterrupted run with the same seed and settings.
PosteriorSamples run_chain(const Dataset& data, const Priors& priors,
                           const ChainConfig& cfg,
                           const std::string& checkpoint_path = "",
                           const PosteriorSamples* resume = nullptr);

// Versioned binary checkpoint of a PosteriorSamples value.
void save_samples(const std::string& path, const PosteriorSamples& samples);
PosteriorSamples load_samples(const std::string& path);

}  // namespace ffa
