#include "ffa/local.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ffa/error.hpp"
#include "ffa/gev.hpp"
#include "scalar_mh.hpp"

namespace ffa {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEulerGamma = 0.5772156649015329;

double local_loglik(const Station& st, double mu, double eta, double xi,
                    double xi_bound) {
  const double kappa = std::exp(eta);
  if (!(kappa > 0.0) || !std::isfinite(kappa) || !std::isfinite(mu) ||
      std::abs(xi) >= xi_bound) {
    return -kInf;
  }
  const gev::GevParams p{mu, kappa, xi};
  double ll = 0.0;
  for (const double y : st.annual_maxima) {
    const double l = gev::log_density(y, p);
    if (l == -kInf) return -kInf;
    ll += l;
  }
  return ll;
}

}  // namespace

void LocalPriors::validate() const {
  if (!(mu_sd > 0.0) || !(eta_sd > 0.0) || !(xi_sd > 0.0)) {
    throw ConfigError("local prior sds must be positive");
  }
}

PosteriorSamples fit_local(const Station& station, const ChainConfig& config,
                           const LocalPriors& priors) {
  config.validate();
  priors.validate();
  if (station.n_years() < 20) {
    throw DataError("station " + station.id + " has only " +
                    std::to_string(station.n_years()) +
                    " years; the local model requires at least 20");
  }
  const bool gev_mode = station.n_years() >= 50;

  // Moment-based Gumbel start.
  const double n = static_cast<double>(station.n_years());
  const double mean = station.mean_annual_maximum();
  double ss = 0.0;
  for (const double y : station.annual_maxima) ss += (y - mean) * (y - mean);
  double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 1.0;
  if (!(sd > 0.0)) sd = 1.0;
  const double kappa0 = std::numbers::pi / (sd * std::sqrt(6.0));

  double mu = mean - kEulerGamma / kappa0;
  double eta = std::log(kappa0);
  double xi = 0.0;
  if (gev_mode) {
    xi = 0.1;
    if (local_loglik(station, mu, eta, xi, config.xi_bound) == -kInf) {
      xi = 1e-4;
    }
  }
  if (local_loglik(station, mu, eta, xi, config.xi_bound) == -kInf) {
    throw NumericError("could not find an in-support start for station " +
                       station.id);
  }

  Rng rng(derive_seed(config.seed, "local"));
  PosteriorSamples out;
  out.config = config;
  out.model_type = gev_mode ? "local-gev" : "local-gumbel";
  out.covariate_names = {"constant"};
  out.station_ids = {station.id};
  out.standardization.mean = {0.0};
  out.standardization.sd = {1.0};
  out.station_covariates = {{1.0}};

  std::map<std::string, AcceptCount> counts;
  const auto record = [&counts](const char* key, bool acc) {
    auto& c = counts[key];
    ++c.attempted;
    if (acc) ++c.accepted;
  };

  // One scalar MH update; the eta update can use the analytic kappa-block
  // derivatives, mu and xi use numeric ones.
  const auto update = [&](double& value, double prior_var, const char* key,
                          const auto& loglik_at, const auto& lik_derivs_at) {
    const double cur_ll = loglik_at(value);
    const auto logprior_at = [&](double v) {
      return log_normal_density(v, 0.0, prior_var);
    };
    const auto derivs_at =
        [&](double v, double ll_v) -> std::optional<Derivatives> {
      auto d = lik_derivs_at(v, ll_v);
      if (!d) return std::nullopt;
      d->first += -v / prior_var;
      d->second += -1.0 / prior_var;
      return d;
    };
    const auto step = detail::scalar_mh_step(value, cur_ll, loglik_at,
                                             logprior_at, derivs_at,
                                             config.rw_step_theta, rng);
    record(key, step.accepted);
    if (step.accepted) value = step.value;
  };

  const std::size_t eff_thin = config.effective_thin();
  for (std::size_t iter = 1; iter <= config.n_iterations; ++iter) {
    {
      const auto loglik_at = [&](double v) {
        return local_loglik(station, v, eta, xi, config.xi_bound);
      };
      const auto numeric = [&](double v, double ll_v) {
        return detail::numeric_loglik_derivs(loglik_at, v, ll_v);
      };
      update(mu, priors.mu_sd * priors.mu_sd, "local.mu", loglik_at, numeric);
    }
    {
      const auto loglik_at = [&](double v) {
        return local_loglik(station, mu, v, xi, config.xi_bound);
      };
      const auto analytic =
          [&](double v, double) -> std::optional<Derivatives> {
        Derivatives sum;
        try {
          for (const double y : station.annual_maxima) {
            const Derivatives d = dloglik_dtau_kappa(y, mu, xi, v, 0.0);
            sum.first += d.first;
            sum.second += d.second;
          }
        } catch (const NumericError&) {
          return std::nullopt;
        }
        if (!std::isfinite(sum.first) || !std::isfinite(sum.second)) {
          return std::nullopt;
        }
        return sum;
      };
      update(eta, priors.eta_sd * priors.eta_sd, "local.eta", loglik_at,
             analytic);
    }
    if (gev_mode) {
      const auto loglik_at = [&](double v) {
        return local_loglik(station, mu, eta, v, config.xi_bound);
      };
      const auto numeric = [&](double v, double ll_v) {
        return detail::numeric_loglik_derivs(loglik_at, v, ll_v);
      };
      update(xi, priors.xi_sd * priors.xi_sd, "local.xi", loglik_at, numeric);
    }

    if (iter > config.n_burnin && (iter - config.n_burnin) % eff_thin == 0) {
      HierState draw = HierState::zeros(1, 1);
      draw.block(Block::Mu).theta[0] = mu;
      draw.block(Block::Kappa).theta[0] = eta;
      draw.block(Block::Xi).theta[0] = xi;
      out.draws.push_back(std::move(draw));
    }
  }

  out.completed_iterations = config.n_iterations;
  out.last_state = HierState::zeros(1, 1);
  out.last_state.block(Block::Mu).theta[0] = mu;
  out.last_state.block(Block::Kappa).theta[0] = eta;
  out.last_state.block(Block::Xi).theta[0] = xi;
  out.rng_state = rng.serialize();
  out.accept_counts = counts;
  return out;
}

ReturnLevelSummary local_return_level(const PosteriorSamples& samples,
                                      double prob,
                                      const PredictOptions& opts) {
  return return_level_posterior(samples, 0, prob, opts);
}

}  // namespace ffa
