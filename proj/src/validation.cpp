#include "ffa/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ffa/error.hpp"

namespace ffa {

double mixture_cdf(const std::vector<gev::GevParams>& components, double y) {
  if (components.empty()) throw NumericError("mixture has no components");
  double acc = 0.0;
  for (const auto& p : components) acc += gev::cdf(y, p);
  return acc / static_cast<double>(components.size());
}

std::vector<PitRecord> station_pits(
    const std::vector<gev::GevParams>& components, const Station& station) {
  std::vector<PitRecord> out;
  out.reserve(station.n_years());
  for (std::size_t t = 0; t < station.n_years(); ++t) {
    out.push_back(
        {station.id, t, mixture_cdf(components, station.annual_maxima[t])});
  }
  return out;
}

std::vector<PitRecord> in_sample_pits(const PosteriorSamples& samples,
                                      const Dataset& data) {
  std::vector<PitRecord> out;
  for (std::size_t s = 0; s < data.n_stations(); ++s) {
    const std::size_t idx = samples.station_index(data.station(s).id);
    const auto components = station_draw_params(samples, idx);
    auto pits = station_pits(components, data.station(s));
    out.insert(out.end(), pits.begin(), pits.end());
  }
  return out;
}

PpData pp_plot_data(std::vector<double> pits) {
  if (pits.empty()) throw DataError("pp_plot_data needs at least one PIT");
  std::sort(pits.begin(), pits.end());
  PpData pp;
  pp.theoretical.reserve(pits.size());
  const double n1 = static_cast<double>(pits.size()) + 1.0;
  for (std::size_t i = 0; i < pits.size(); ++i) {
    pp.theoretical.push_back(static_cast<double>(i + 1) / n1);
  }
  pp.empirical = std::move(pits);
  pp.max_gap = 0.0;
  for (std::size_t i = 0; i < pp.empirical.size(); ++i) {
    pp.max_gap =
        std::max(pp.max_gap, std::abs(pp.empirical[i] - pp.theoretical[i]));
  }
  return pp;
}

double ks_statistic_uniform(std::vector<double> values) {
  if (values.empty()) throw DataError("KS statistic of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - u);
    d = std::max(d, u - static_cast<double>(i) / n);
  }
  return d;
}

double quantile_score(double predicted_quantile, double y, double tau) {
  if (!(tau > 0.0) || !(tau < 1.0)) {
    throw NumericError("quantile score requires tau in (0,1)");
  }
  const double indicator = y <= predicted_quantile ? 1.0 : 0.0;
  return (y - predicted_quantile) * (tau - indicator);
}

ScoreReport mean_quantile_score(const std::string& model_name,
                                const std::vector<double>& predicted_quantiles,
                                const std::vector<double>& observations,
                                const std::vector<std::size_t>& station_of,
                                double return_period,
                                const ScoreOptions& opts) {
  const std::size_t n = observations.size();
  if (n == 0) throw DataError("mean_quantile_score: no observations");
  if (predicted_quantiles.size() != n) {
    throw DataError("mean_quantile_score: quantile/observation length "
                    "mismatch");
  }
  const double tau = gev::prob_of_return_period(return_period);

  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = quantile_score(predicted_quantiles[i], observations[i], tau);
  }
  ScoreReport rep;
  rep.model_name = model_name;
  rep.return_period = return_period;
  rep.n_obs = n;
  rep.mean_score =
      std::accumulate(scores.begin(), scores.end(), 0.0) /
      static_cast<double>(n);

  // Bootstrap over observations (or whole stations).
  Rng rng(derive_seed(opts.seed, "score.bootstrap",
                      static_cast<std::uint64_t>(return_period)));
  std::vector<double> means;
  means.reserve(opts.n_bootstrap);
  if (!opts.station_block) {
    for (std::size_t b = 0; b < opts.n_bootstrap; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += scores[rng.below(n)];
      }
      means.push_back(acc / static_cast<double>(n));
    }
  } else {
    if (station_of.size() != n) {
      throw DataError("station-block bootstrap needs station indices");
    }
    std::size_t n_stations = 0;
    for (const std::size_t s : station_of) {
      n_stations = std::max(n_stations, s + 1);
    }
    std::vector<std::vector<double>> by_station(n_stations);
    for (std::size_t i = 0; i < n; ++i) {
      by_station[station_of[i]].push_back(scores[i]);
    }
    for (std::size_t b = 0; b < opts.n_bootstrap; ++b) {
      double acc = 0.0;
      double cnt = 0.0;
      for (std::size_t k = 0; k < n_stations; ++k) {
        const auto& st = by_station[rng.below(n_stations)];
        acc = std::accumulate(st.begin(), st.end(), acc);
        cnt += static_cast<double>(st.size());
      }
      means.push_back(cnt > 0.0 ? acc / cnt : rep.mean_score);
    }
  }
  std::sort(means.begin(), means.end());
  rep.ci_lo = empirical_quantile(means, 0.05);
  rep.ci_hi = empirical_quantile(means, 0.95);
  return rep;
}

double posterior_mean_theta(const PosteriorSamples& samples, Block block,
                            std::size_t covariate_index) {
  if (samples.draws.empty()) throw NumericError("no draws");
  double acc = 0.0;
  for (const auto& d : samples.draws) {
    acc += d.block(block).theta.at(covariate_index);
  }
  return acc / static_cast<double>(samples.draws.size());
}

StabilitySummary stability_stats(const std::vector<PosteriorSamples>& folds,
                                 std::size_t covariate_index, Block block) {
  if (folds.size() < 2) {
    throw DataError("stability_stats needs at least two folds");
  }
  std::vector<double> means;
  means.reserve(folds.size());
  for (const auto& f : folds) {
    means.push_back(posterior_mean_theta(f, block, covariate_index));
  }
  std::sort(means.begin(), means.end());
  StabilitySummary s;
  s.min = means.front();
  s.q1 = empirical_quantile(means, 0.25);
  s.median = empirical_quantile(means, 0.5);
  s.q3 = empirical_quantile(means, 0.75);
  s.max = means.back();
  return s;
}

LooResult loo_cross_validate(const Dataset& data,
                             const std::vector<std::string>& fold_ids,
                             const Priors& priors, const ChainConfig& chain,
                             const LooOptions& opts) {
  if (fold_ids.empty()) throw ConfigError("cross-validation needs fold ids");
  for (const auto& id : fold_ids) {
    if (!data.has_station(id)) {
      throw DataError("fold station '" + id + "' is not in the dataset");
    }
  }
  if (fold_ids.size() >= data.n_stations()) {
    throw ConfigError("cannot hold out every station");
  }

  LooResult result;
  ChainConfig full_cfg = chain;
  full_cfg.seed = derive_seed(opts.seed, "cv.full");
  result.full_fit = run_chain(data, priors, full_cfg);

  // Pooled holders, one slot per return period.
  const std::size_t n_periods = opts.return_periods.size();
  std::vector<std::vector<double>> q_out(n_periods), y_out(n_periods);
  std::vector<std::vector<double>> q_in(n_periods), y_in(n_periods);
  std::vector<std::vector<std::size_t>> st_out(n_periods), st_in(n_periods);

  for (std::size_t f = 0; f < fold_ids.size(); ++f) {
    const std::string& id = fold_ids[f];
    const Station held_out = data.station(data.index_of(id));

    const Dataset training = data.without({id});
    // Training/holdout disjointness is a hard guarantee of the scheme.
    if (training.has_station(id) ||
        training.n_stations() != data.n_stations() - 1) {
      throw NumericError("cross-validation fold is not disjoint");
    }

    ChainConfig fold_cfg = chain;
    fold_cfg.seed = derive_seed(opts.seed, "cv.fold", f);
    LooFold fold;
    fold.held_out_id = id;
    fold.samples = run_chain(training, priors, fold_cfg);

    // Standardize the held-out covariates with the fold's training stats.
    const std::vector<double> x =
        training.standardization().apply(held_out.raw_covariates);

    PredictOptions popts = opts.predict;
    popts.seed = derive_seed(opts.seed, "cv.predict", f);
    std::vector<double> probs;
    probs.reserve(n_periods);
    for (const double T : opts.return_periods) {
      probs.push_back(gev::prob_of_return_period(T));
    }
    fold.predictions = return_levels_new_site(fold.samples, x, probs, popts);
    for (std::size_t k = 0; k < n_periods; ++k) {
      fold.predictions[k].return_period = opts.return_periods[k];
    }

    // PITs and scores for the held-out data use the same new-site
    // composition (fresh random effects per retained draw).
    Rng comp_rng(derive_seed(opts.seed, "cv.compose", f));
    const auto components = new_site_draw_params(fold.samples, x, comp_rng);
    fold.pits = station_pits(components, held_out);

    ScoreOptions sopts = opts.score;
    sopts.seed = derive_seed(opts.seed, "cv.score", f);
    for (std::size_t k = 0; k < n_periods; ++k) {
      const double q = fold.predictions[k].predictive_quantile;
      std::vector<double> qs(held_out.n_years(), q);
      fold.scores.push_back(mean_quantile_score(
          "regional.out_of_sample", qs, held_out.annual_maxima,
          std::vector<std::size_t>(held_out.n_years(), 0),
          opts.return_periods[k], sopts));
      for (const double y : held_out.annual_maxima) {
        q_out[k].push_back(q);
        y_out[k].push_back(y);
        st_out[k].push_back(f);
      }
    }
    result.folds.push_back(std::move(fold));
  }

  // In-sample counterparts from the full-data fit.
  PredictOptions in_opts = opts.predict;
  in_opts.seed = derive_seed(opts.seed, "cv.insample");
  for (std::size_t f = 0; f < fold_ids.size(); ++f) {
    const std::size_t idx = data.index_of(fold_ids[f]);
    const Station& st = data.station(idx);
    const std::size_t sample_idx = result.full_fit.station_index(st.id);
    const auto components = station_draw_params(result.full_fit, sample_idx);
    auto pits = station_pits(components, st);
    result.in_sample_pits.insert(result.in_sample_pits.end(), pits.begin(),
                                 pits.end());

    std::vector<double> probs;
    for (const double T : opts.return_periods) {
      probs.push_back(gev::prob_of_return_period(T));
    }
    const auto summaries =
        return_levels_station(result.full_fit, sample_idx, probs, in_opts);
    for (std::size_t k = 0; k < n_periods; ++k) {
      for (const double y : st.annual_maxima) {
        q_in[k].push_back(summaries[k].predictive_quantile);
        y_in[k].push_back(y);
        st_in[k].push_back(f);
      }
    }
  }

  ScoreOptions pooled_opts = opts.score;
  pooled_opts.seed = derive_seed(opts.seed, "cv.pooled");
  for (std::size_t k = 0; k < n_periods; ++k) {
    result.out_of_sample_scores.push_back(mean_quantile_score(
        "regional.out_of_sample", q_out[k], y_out[k], st_out[k],
        opts.return_periods[k], pooled_opts));
    result.in_sample_scores.push_back(mean_quantile_score(
        "regional.in_sample", q_in[k], y_in[k], st_in[k],
        opts.return_periods[k], pooled_opts));
  }
  return result;
}

void SimulationSpec::validate() const {
  if (n_stations == 0) throw ConfigError("simulation needs stations");
  if (n_years_min < 1 || n_years_max < n_years_min) {
    throw ConfigError("invalid n_years range");
  }
  if (theta_mu.empty() || theta_mu.size() != theta_kappa.size() ||
      theta_mu.size() != theta_xi.size()) {
    throw ConfigError("simulation theta vectors must share one dimension");
  }
  if (!(alpha_mu > 0.0) || !(alpha_kappa > 0.0) || !(alpha_xi > 0.0)) {
    throw ConfigError("simulation precisions must be positive (use inf for "
                      "no random effects)");
  }
}

SimulatedDataset simulate_dataset(const SimulationSpec& spec) {
  spec.validate();
  const std::size_t D = spec.dim();
  const std::size_t S = spec.n_stations;
  Rng rng(derive_seed(spec.seed, "simulate"));

  // Covariates and record lengths first, so the standardization is fixed
  // before any site parameters are composed.
  std::vector<Station> stations(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto& st = stations[s];
    char buf[32];
    std::snprintf(buf, sizeof buf, "S%03zu", s + 1);
    st.id = buf;
    st.raw_covariates.assign(D, 1.0);
    for (std::size_t j = 1; j < D; ++j) st.raw_covariates[j] = rng.normal();
    const std::size_t span = spec.n_years_max - spec.n_years_min + 1;
    st.annual_maxima.assign(
        spec.n_years_min + static_cast<std::size_t>(rng.below(span)), 0.0);
  }
  std::vector<std::string> names(D);
  names[0] = "constant";
  for (std::size_t j = 1; j < D; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "cov%02zu", j);
    names[j] = buf;
  }

  // Placeholder maxima already sized; build the dataset to obtain the
  // standardized covariates, then fill the maxima in.
  Dataset shell = Dataset::from_raw(stations, names);

  HierState truth = HierState::zeros(D, S);
  const std::array<const std::vector<double>*, 3> thetas{
      &spec.theta_mu, &spec.theta_kappa, &spec.theta_xi};
  const std::array<double, 3> alphas{spec.alpha_mu, spec.alpha_kappa,
                                     spec.alpha_xi};
  for (std::size_t b = 0; b < 3; ++b) {
    auto& blk = truth.blocks[b];
    blk.theta = *thetas[b];
    blk.alpha = std::isinf(alphas[b]) ? 1e12 : alphas[b];
    for (std::size_t j = 0; j < D; ++j) {
      blk.inclusion[j] = (j == 0 || blk.theta[j] != 0.0) ? 1 : 0;
    }
    for (std::size_t s = 0; s < S; ++s) {
      blk.tau[s] = std::isinf(alphas[b])
                       ? 0.0
                       : rng.normal(0.0, std::sqrt(1.0 / alphas[b]));
    }
  }

  for (std::size_t s = 0; s < S; ++s) {
    const gev::GevParams p = site_params(truth, shell, s);
    if (std::abs(p.xi) >= 1.0) {
      throw NumericError("simulation spec yields |xi| >= 1 at station " +
                         shell.station(s).id);
    }
    stations[s].annual_maxima =
        gev::sample(p, stations[s].annual_maxima.size(), rng);
  }

  SimulatedDataset out;
  out.data = Dataset::from_raw(std::move(stations), names);
  out.truth = std::move(truth);
  out.spec = spec;
  return out;
}

}  // namespace ffa
