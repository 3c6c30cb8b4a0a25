#include "ffa/mcmc.hpp"

#include <algorithm>
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
}  // namespace

void ChainConfig::validate() const {
  if (n_iterations == 0) throw ConfigError("n_iterations must be positive");
  if (n_burnin >= n_iterations) {
    throw ConfigError("n_burnin (" + std::to_string(n_burnin) +
                      ") must be smaller than n_iterations (" +
                      std::to_string(n_iterations) + ")");
  }
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (!(rw_step_theta > 0.0) || !(rw_step_tau > 0.0)) {
    throw ConfigError("random-walk fallback steps must be positive");
  }
  if (!(xi_bound > 0.0)) throw ConfigError("xi_bound must be positive");
}

std::size_t ChainConfig::effective_thin() const {
  std::size_t eff = thin;
  if (max_stored_draws > 0) {
    const std::size_t at_thin = (n_iterations - n_burnin) / thin;
    if (at_thin > max_stored_draws) {
      const std::size_t factor =
          (at_thin + max_stored_draws - 1) / max_stored_draws;
      eff = thin * factor;
    }
  }
  return eff;
}

std::size_t ChainConfig::n_retained() const {
  return (n_iterations - n_burnin) / effective_thin();
}

std::optional<GaussianApprox> gaussian_approx_proposal(double f1, double f2,
                                                       double current) {
  if (!std::isfinite(f1) || !std::isfinite(f2)) return std::nullopt;
  const double c = -f2;
  if (!(c > 0.0)) return std::nullopt;
  const double b = f1 - f2 * current;
  GaussianApprox ga;
  ga.mean = b / c;
  ga.variance = 1.0 / c;
  if (!std::isfinite(ga.mean) || !(ga.variance > 0.0) ||
      !std::isfinite(ga.variance)) {
    return std::nullopt;
  }
  return ga;
}

bool mh_accept(double log_target_new, double log_target_old,
               double log_q_old_given_new, double log_q_new_given_old,
               Rng& rng) {
  if (!(log_target_new > -kInf)) return false;  // also rejects NaN
  const double log_r = (log_target_new - log_target_old) +
                       (log_q_old_given_new - log_q_new_given_old);
  if (std::isnan(log_r)) return false;
  return std::log(rng.uniform()) < log_r;
}

Derivatives dloglik_dtau_kappa(double y, double mu, double xi, double eta_hat,
                               double tau) {
  const double eps = y - mu;
  Derivatives d;
  if (std::abs(xi) < gev::kXiEps) {
    // Gumbel branch: h = exp(-exp(eta_hat + tau) * eps), dh/dtau = h log h.
    const double logh = -std::exp(eta_hat + tau) * eps;
    const double h = std::exp(logh);
    d.first = 1.0 + logh - h * logh;
    d.second = logh - h * logh * logh - h * logh;
    return d;
  }
  // g = h - 1 = xi * eps * exp(eta_hat + tau); dh/dtau = g.
  const double g = xi * eps * std::exp(eta_hat + tau);
  const double h = 1.0 + g;
  if (!(h > 0.0)) {
    throw NumericError("dloglik_dtau_kappa: observation outside support "
                       "(h <= 0)");
  }
  const double a = (xi + 1.0) / xi;
  const double p0 = std::exp(-std::log1p(g) / xi);  // h^{-1/xi}
  const double p1 = p0 / h;
  const double p2 = p1 / h;
  d.first = 1.0 - a * g / h + (p0 - p1) / xi;
  d.second = -a * g / (h * h) + g * ((xi + 1.0) * p2 - p1) / (xi * xi);
  return d;
}

std::map<std::string, double> PosteriorSamples::acceptance_rates() const {
  std::map<std::string, double> out;
  for (const auto& [key, c] : accept_counts) {
    if (c.attempted > 0) {
      out[key] = static_cast<double>(c.accepted) /
                 static_cast<double>(c.attempted);
    }
  }
  return out;
}

std::size_t PosteriorSamples::station_index(const std::string& id) const {
  const auto it = std::find(station_ids.begin(), station_ids.end(), id);
  if (it == station_ids.end()) {
    throw DataError("unknown station id '" + id + "'");
  }
  return static_cast<std::size_t>(it - station_ids.begin());
}

Sampler::Sampler(const Dataset& data, const Priors& priors,
                 const ChainConfig& cfg)
    : data_(data), priors_(priors), cfg_(cfg) {
  priors_.validate();
  cfg_.validate();
  if (data_.n_stations() == 0) throw DataError("dataset has no stations");
}

double Sampler::station_loglik(const HierState& state, std::size_t s) const {
  const auto& st = data_.station(s);
  const auto& x = st.covariates;
  gev::GevParams p;
  p.mu = linear_predictor(state.block(Block::Mu), x, s);
  p.kappa = std::exp(linear_predictor(state.block(Block::Kappa), x, s));
  p.xi = linear_predictor(state.block(Block::Xi), x, s);
  if (!std::isfinite(p.mu) || !std::isfinite(p.xi) || !(p.kappa > 0.0) ||
      !std::isfinite(p.kappa)) {
    return -kInf;
  }
  if (std::abs(p.xi) >= cfg_.xi_bound) return -kInf;
  double ll = 0.0;
  for (const double y : st.annual_maxima) {
    const double l = gev::log_density(y, p);
    if (l == -kInf) return -kInf;
    ll += l;
  }
  return ll;
}

double Sampler::total_loglik(const HierState& state) const {
  double ll = 0.0;
  for (std::size_t s = 0; s < data_.n_stations(); ++s) {
    const double l = station_loglik(state, s);
    if (l == -kInf) return -kInf;
    ll += l;
  }
  return ll;
}

HierState Sampler::initial_state() const {
  // Moment-based Gumbel start shared by all stations.
  double sum = 0.0;
  double n = 0.0;
  for (const auto& st : data_.stations()) {
    for (const double y : st.annual_maxima) {
      sum += y;
      n += 1.0;
    }
  }
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& st : data_.stations()) {
    for (const double y : st.annual_maxima) ss += (y - mean) * (y - mean);
  }
  double sd = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 1.0;
  if (!(sd > 0.0)) sd = 1.0;
  const double kappa0 = std::numbers::pi / (sd * std::sqrt(6.0));
  const double mu0 = mean - kEulerGamma / kappa0;

  HierState state = HierState::zeros(data_.n_covariates(), data_.n_stations());
  state.block(Block::Mu).theta[0] = mu0;
  state.block(Block::Kappa).theta[0] = std::log(kappa0);
  state.block(Block::Xi).theta[0] = 0.1;
  for (auto& blk : state.blocks) {
    blk.alpha = priors_.alpha_shape / priors_.alpha_rate;
  }
  if (total_loglik(state) == -kInf) {
    // A mild Frechet start can violate the support for extreme data; a
    // near-Gumbel shape never does.
    state.block(Block::Xi).theta[0] = 1e-4;
  }
  if (total_loglik(state) == -kInf) {
    throw NumericError("could not find an in-support initial state");
  }
  return state;
}

void Sampler::record(const std::string& key, bool accepted) {
  auto& c = counts_[key];
  ++c.attempted;
  if (accepted) ++c.accepted;
}

void Sampler::update_theta(Block b, HierState& state, Rng& rng) {
  auto& blk = state.block(b);
  const double theta_var = priors_.theta_sd * priors_.theta_sd;
  const std::string key = std::string("theta.") + block_name(b);
  double cur_ll = total_loglik(state);

  for (std::size_t i = 0; i < blk.theta.size(); ++i) {
    if (!blk.inclusion[i]) continue;
    const double cur = blk.theta[i];

    const auto loglik_at = [&](double v) {
      blk.theta[i] = v;
      const double ll = total_loglik(state);
      blk.theta[i] = cur;
      return ll;
    };
    const auto logprior_at = [&](double v) {
      return log_normal_density(v, 0.0, theta_var);
    };
    const auto derivs_at =
        [&](double v, double ll_v) -> std::optional<Derivatives> {
      std::optional<Derivatives> d;
      if (b == Block::Kappa) {
        d = kappa_theta_loglik_derivs(state, i, v);
      } else {
        d = detail::numeric_loglik_derivs(loglik_at, v, ll_v);
      }
      if (!d) return std::nullopt;
      d->first += -v / theta_var;
      d->second += -1.0 / theta_var;
      return d;
    };

    const auto step = detail::scalar_mh_step(cur, cur_ll, loglik_at,
                                             logprior_at, derivs_at,
                                             cfg_.rw_step_theta, rng);
    record(key, step.accepted);
    if (step.accepted) {
      blk.theta[i] = step.value;
      cur_ll = step.loglik;
    }
  }
}

std::optional<Derivatives> Sampler::kappa_theta_loglik_derivs(
    HierState& state, std::size_t i, double v) const {
  auto& blk = state.block(Block::Kappa);
  const double save = blk.theta[i];
  blk.theta[i] = v;
  std::optional<Derivatives> out = Derivatives{};
  try {
    for (std::size_t s = 0; s < data_.n_stations(); ++s) {
      const auto& st = data_.station(s);
      const auto& x = st.covariates;
      const double mu = linear_predictor(state.block(Block::Mu), x, s);
      const double xi = linear_predictor(state.block(Block::Xi), x, s);
      const double tau = blk.tau[s];
      const double eta_hat = linear_predictor(blk, x, s) - tau;
      double s1 = 0.0;
      double s2 = 0.0;
      for (const double y : st.annual_maxima) {
        const Derivatives d = dloglik_dtau_kappa(y, mu, xi, eta_hat, tau);
        s1 += d.first;
        s2 += d.second;
      }
      out->first += x[i] * s1;
      out->second += x[i] * x[i] * s2;
    }
  } catch (const NumericError&) {
    out.reset();
  }
  blk.theta[i] = save;
  if (out && (!std::isfinite(out->first) || !std::isfinite(out->second))) {
    out.reset();
  }
  return out;
}

std::optional<Derivatives> Sampler::kappa_tau_loglik_derivs(
    const HierState& state, std::size_t s, double v) const {
  const auto& st = data_.station(s);
  const auto& x = st.covariates;
  const double mu = linear_predictor(state.block(Block::Mu), x, s);
  const double xi = linear_predictor(state.block(Block::Xi), x, s);
  const auto& blk = state.block(Block::Kappa);
  const double eta_hat = linear_predictor(blk, x, s) - blk.tau[s];
  Derivatives sum;
  try {
    for (const double y : st.annual_maxima) {
      const Derivatives d = dloglik_dtau_kappa(y, mu, xi, eta_hat, v);
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
}

void Sampler::update_tau(Block b, HierState& state, Rng& rng) {
  auto& blk = state.block(b);
  const double alpha = blk.alpha;
  const std::string key = std::string("tau.") + block_name(b);

  for (std::size_t s = 0; s < data_.n_stations(); ++s) {
    const double cur = blk.tau[s];
    const double cur_ll = station_loglik(state, s);

    const auto loglik_at = [&](double v) {
      blk.tau[s] = v;
      const double ll = station_loglik(state, s);
      blk.tau[s] = cur;
      return ll;
    };
    const auto logprior_at = [&](double v) {
      return log_normal_density(v, 0.0, 1.0 / alpha);
    };
    const auto derivs_at =
        [&](double v, double ll_v) -> std::optional<Derivatives> {
      std::optional<Derivatives> d;
      if (b == Block::Kappa) {
        d = kappa_tau_loglik_derivs(state, s, v);
      } else {
        d = detail::numeric_loglik_derivs(loglik_at, v, ll_v);
      }
      if (!d) return std::nullopt;
      d->first += -alpha * v;
      d->second += -alpha;
      return d;
    };

    const auto step = detail::scalar_mh_step(cur, cur_ll, loglik_at,
                                             logprior_at, derivs_at,
                                             cfg_.rw_step_tau, rng);
    record(key, step.accepted);
    if (step.accepted) blk.tau[s] = step.value;
  }
}

void Sampler::update_inclusion(Block b, HierState& state, Rng& rng) {
  auto& blk = state.block(b);
  if (blk.theta.size() <= 1) return;
  const double theta_var = priors_.theta_sd * priors_.theta_sd;
  const double lp_in = std::log(priors_.inclusion_prob);
  const double lp_out = std::log1p(-priors_.inclusion_prob);  // -inf at p = 1
  const std::string key = std::string("inclusion.") + block_name(b);
  double cur_ll = total_loglik(state);

  for (std::size_t i = 1; i < blk.theta.size(); ++i) {
    const double cur = blk.theta[i];
    const auto loglik_at = [&](double v) {
      blk.theta[i] = v;
      const double ll = total_loglik(state);
      blk.theta[i] = cur;
      return ll;
    };
    // Gaussian approximation of the conditional at theta_i = 0; the prior
    // N(0, theta_var) stands in when the curvature is unusable. The same
    // rule prices both the birth draw and the death move's reverse density.
    const auto approx_at_zero =
        [&](double ll_at_zero) -> std::optional<GaussianApprox> {
      std::optional<Derivatives> d;
      if (b == Block::Kappa) {
        d = kappa_theta_loglik_derivs(state, i, 0.0);
      } else {
        d = detail::numeric_loglik_derivs(loglik_at, 0.0, ll_at_zero);
      }
      if (!d) return std::nullopt;
      d->second += -1.0 / theta_var;  // prior curvature; prior slope at 0 is 0
      return gaussian_approx_proposal(d->first, d->second, 0.0);
    };

    if (!blk.inclusion[i]) {
      // Birth: draw theta_i from the approximation at zero.
      const auto ga = approx_at_zero(cur_ll);
      const double mean = ga ? ga->mean : 0.0;
      const double var = ga ? ga->variance : theta_var;
      const double prop = rng.normal(mean, std::sqrt(var));
      const double lq = log_normal_density(prop, mean, var);
      const double ll_new = loglik_at(prop);
      if (!(ll_new > -kInf)) {
        record(key, false);
        continue;
      }
      const double target_new =
          ll_new + log_normal_density(prop, 0.0, theta_var) + lp_in;
      const double target_old = cur_ll + lp_out;
      const bool acc = mh_accept(target_new, target_old, 0.0, lq, rng);
      record(key, acc);
      if (acc) {
        blk.theta[i] = prop;
        blk.inclusion[i] = 1;
        cur_ll = ll_new;
      }
    } else {
      // Death: move theta_i to exactly zero; the reverse move is a birth
      // whose proposal density is evaluated at the current value.
      const double ll_zero = loglik_at(0.0);
      if (!(ll_zero > -kInf)) {
        record(key, false);
        continue;
      }
      const auto ga = approx_at_zero(ll_zero);
      const double mean = ga ? ga->mean : 0.0;
      const double var = ga ? ga->variance : theta_var;
      const double lq_rev = log_normal_density(cur, mean, var);
      const double target_new = ll_zero + lp_out;
      const double target_old =
          cur_ll + log_normal_density(cur, 0.0, theta_var) + lp_in;
      const bool acc = mh_accept(target_new, target_old, lq_rev, 0.0, rng);
      record(key, acc);
      if (acc) {
        blk.theta[i] = 0.0;
        blk.inclusion[i] = 0;
        cur_ll = ll_zero;
      }
    }
  }
}

void Sampler::update_alpha(Block b, HierState& state, Rng& rng) {
  auto& blk = state.block(b);
  double ss = 0.0;
  for (const double t : blk.tau) ss += t * t;
  const double shape =
      priors_.alpha_shape + 0.5 * static_cast<double>(blk.tau.size());
  const double rate = priors_.alpha_rate + 0.5 * ss;
  blk.alpha = rng.gamma(shape, rate);
  record(std::string("alpha.") + block_name(b), true);
}

void Sampler::sweep(HierState& state, Rng& rng) {
  for (const Block b : kBlocks) {
    update_theta(b, state, rng);
    update_inclusion(b, state, rng);
    update_tau(b, state, rng);
    update_alpha(b, state, rng);
  }
}

namespace {

void check_resume_compatible(const PosteriorSamples& resume,
                             const Dataset& data, const Priors& priors,
                             const ChainConfig& cfg) {
  const ChainConfig& rc = resume.config;
  if (rc.seed != cfg.seed || rc.n_burnin != cfg.n_burnin ||
      rc.thin != cfg.thin || rc.rw_step_theta != cfg.rw_step_theta ||
      rc.rw_step_tau != cfg.rw_step_tau || rc.xi_bound != cfg.xi_bound ||
      rc.max_stored_draws != cfg.max_stored_draws) {
    throw ConfigError("resume: chain settings differ from the checkpoint");
  }
  if (cfg.max_stored_draws > 0 && rc.n_iterations != cfg.n_iterations) {
    throw ConfigError(
        "resume: n_iterations cannot change when max_stored_draws is set "
        "(the effective thinning would differ)");
  }
  if (cfg.n_iterations < resume.completed_iterations) {
    throw ConfigError("resume: checkpoint already has " +
                      std::to_string(resume.completed_iterations) +
                      " iterations, more than requested");
  }
  const Priors& rp = resume.priors;
  if (rp.theta_sd != priors.theta_sd || rp.alpha_shape != priors.alpha_shape ||
      rp.alpha_rate != priors.alpha_rate ||
      rp.inclusion_prob != priors.inclusion_prob) {
    throw ConfigError("resume: priors differ from the checkpoint");
  }
  if (resume.covariate_names != data.covariate_names()) {
    throw ConfigError("resume: covariates differ from the checkpoint");
  }
  if (resume.station_ids.size() != data.n_stations()) {
    throw ConfigError("resume: station count differs from the checkpoint");
  }
  for (std::size_t s = 0; s < data.n_stations(); ++s) {
    if (resume.station_ids[s] != data.station(s).id) {
      throw ConfigError("resume: station order differs from the checkpoint");
    }
  }
}

}  // namespace

PosteriorSamples run_chain(const Dataset& data, const Priors& priors,
                           const ChainConfig& cfg,
                           const std::string& checkpoint_path,
                           const PosteriorSamples* resume) {
  cfg.validate();
  priors.validate();
  Sampler sampler(data, priors, cfg);

  PosteriorSamples out;
  out.config = cfg;
  out.priors = priors;
  out.covariate_names = data.covariate_names();
  out.standardization = data.standardization();
  out.station_ids.reserve(data.n_stations());
  out.station_covariates.reserve(data.n_stations());
  for (const auto& st : data.stations()) {
    out.station_ids.push_back(st.id);
    out.station_covariates.push_back(st.covariates);
  }

  HierState state;
  Rng rng(derive_seed(cfg.seed, "chain"));
  std::size_t start_iter = 0;

  if (resume) {
    check_resume_compatible(*resume, data, priors, cfg);
    state = resume->last_state;
    rng.restore(resume->rng_state);
    start_iter = resume->completed_iterations;
    out.draws = resume->draws;
    sampler.set_accept_counts(resume->accept_counts);
  } else {
    state = sampler.initial_state();
  }
  state.check(data.n_covariates(), data.n_stations());

  const std::size_t eff_thin = cfg.effective_thin();
  for (std::size_t iter = start_iter + 1; iter <= cfg.n_iterations; ++iter) {
    sampler.sweep(state, rng);
    if (iter > cfg.n_burnin && (iter - cfg.n_burnin) % eff_thin == 0) {
      out.draws.push_back(state);
    }
    if (!checkpoint_path.empty() && cfg.checkpoint_every > 0 &&
        iter % cfg.checkpoint_every == 0 && iter < cfg.n_iterations) {
      out.completed_iterations = iter;
      out.last_state = state;
      out.rng_state = rng.serialize();
      out.accept_counts = sampler.accept_counts();
      save_samples(checkpoint_path, out);
    }
  }

  out.completed_iterations = cfg.n_iterations;
  out.last_state = state;
  out.rng_state = rng.serialize();
  out.accept_counts = sampler.accept_counts();
  if (!checkpoint_path.empty()) save_samples(checkpoint_path, out);
  return out;
}

}  // namespace ffa
