#pragma once

// Shared scalar Metropolis-Hastings step: Gaussian-approximation proposal
// built from the conditional's first two derivatives at the current point,
// with a symmetric random-walk fallback whenever the curvature is unusable.
// The reverse proposal density is evaluated under the same rule at the
// proposed point, so the acceptance ratio is exact for the mixed kernel.

#include <cmath>
#include <limits>
#include <optional>

#include "ffa/mcmc.hpp"
#include "ffa/model.hpp"
#include "ffa/rng.hpp"

namespace ffa::detail {

struct ScalarStep {
  double value;
  double loglik;
  bool accepted;
};

// loglik_at(v): conditional log-likelihood part (may be -inf).
// logprior_at(v): log prior part, finite.
// derivs_at(v, loglik_v): derivatives of loglik+prior at v, or nullopt to
// force the random-walk fallback.
template <class LogLikFn, class LogPriorFn, class DerivFn>
ScalarStep scalar_mh_step(double cur, double loglik_cur, LogLikFn&& loglik_at,
                          LogPriorFn&& logprior_at, DerivFn&& derivs_at,
                          double rw_step, Rng& rng) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double target_cur = loglik_cur + logprior_at(cur);

  const std::optional<Derivatives> d = derivs_at(cur, loglik_cur);
  std::optional<GaussianApprox> ga;
  if (d) ga = gaussian_approx_proposal(d->first, d->second, cur);

  double prop;
  double lq_fwd;
  if (ga) {
    prop = rng.normal(ga->mean, std::sqrt(ga->variance));
    lq_fwd = log_normal_density(prop, ga->mean, ga->variance);
  } else {
    prop = rng.normal(cur, rw_step);
    lq_fwd = log_normal_density(prop, cur, rw_step * rw_step);
  }

  const double loglik_prop = loglik_at(prop);
  if (!(loglik_prop > -kInf)) return {cur, loglik_cur, false};
  const double target_prop = loglik_prop + logprior_at(prop);

  const std::optional<Derivatives> d2 = derivs_at(prop, loglik_prop);
  std::optional<GaussianApprox> ga2;
  if (d2) ga2 = gaussian_approx_proposal(d2->first, d2->second, prop);
  const double lq_rev =
      ga2 ? log_normal_density(cur, ga2->mean, ga2->variance)
          : log_normal_density(cur, prop, rw_step * rw_step);

  if (mh_accept(target_prop, target_cur, lq_rev, lq_fwd, rng)) {
    return {prop, loglik_prop, true};
  }
  return {cur, loglik_cur, false};
}

// Central-difference derivatives of a log-likelihood, step scaled to the
// value; returns nullopt when a probe leaves the support.
template <class LogLikFn>
std::optional<Derivatives> numeric_loglik_derivs(LogLikFn&& loglik_at,
                                                 double v, double loglik_v) {
  const double step = 1e-5 * std::max(1.0, std::abs(v));
  const double lp = loglik_at(v + step);
  const double lm = loglik_at(v - step);
  if (!std::isfinite(lp) || !std::isfinite(lm)) return std::nullopt;
  Derivatives d;
  d.first = (lp - lm) / (2.0 * step);
  d.second = (lp - 2.0 * loglik_v + lm) / (step * step);
  if (!std::isfinite(d.first) || !std::isfinite(d.second)) return std::nullopt;
  return d;
}

}  // namespace ffa::detail
