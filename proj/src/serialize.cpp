#include "ffa/serialize.hpp"

#include <cmath>
#include <set>

#include "ffa/error.hpp"

namespace ffa {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& known,
                    const char* what) {
  if (!j.is_object()) {
    throw ConfigError(std::string(what) + " section must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError(std::string("unknown ") + what + " field '" + key +
                        "'");
    }
  }
}

template <class T>
void get_to(const Json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) {
    try {
      it->get_to(out);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " +
                        e.what());
    }
  }
}

// Precisions may legitimately be infinite ("no random effects"); JSON has no
// inf literal, so they round-trip as the string "inf".
Json inf_to_json(double v) {
  if (std::isinf(v)) return "inf";
  return v;
}

void inf_from_json(const Json& j, const char* key, double& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_string()) {
    if (it->get<std::string>() == "inf") {
      out = std::numeric_limits<double>::infinity();
      return;
    }
    throw ConfigError(std::string("bad value for '") + key +
                      "': expected a number or \"inf\"");
  }
  it->get_to(out);
}

}  // namespace

Json to_json(const ChainConfig& c) {
  return Json{{"iterations", c.n_iterations},
              {"burnin", c.n_burnin},
              {"thin", c.thin},
              {"seed", c.seed},
              {"rw_step_theta", c.rw_step_theta},
              {"rw_step_tau", c.rw_step_tau},
              {"xi_bound", c.xi_bound},
              {"max_stored_draws", c.max_stored_draws},
              {"checkpoint_every", c.checkpoint_every}};
}

ChainConfig chain_config_from_json(const Json& j, ChainConfig d) {
  reject_unknown(j,
                 {"iterations", "burnin", "thin", "seed", "rw_step_theta",
                  "rw_step_tau", "xi_bound", "max_stored_draws",
                  "checkpoint_every"},
                 "chain");
  get_to(j, "iterations", d.n_iterations);
  get_to(j, "burnin", d.n_burnin);
  get_to(j, "thin", d.thin);
  get_to(j, "seed", d.seed);
  get_to(j, "rw_step_theta", d.rw_step_theta);
  get_to(j, "rw_step_tau", d.rw_step_tau);
  get_to(j, "xi_bound", d.xi_bound);
  get_to(j, "max_stored_draws", d.max_stored_draws);
  get_to(j, "checkpoint_every", d.checkpoint_every);
  return d;
}

Json to_json(const Priors& p) {
  return Json{{"theta_sd", p.theta_sd},
              {"alpha_shape", p.alpha_shape},
              {"alpha_rate", p.alpha_rate},
              {"inclusion_prob", p.inclusion_prob}};
}

Priors priors_from_json(const Json& j, Priors d) {
  reject_unknown(j, {"theta_sd", "alpha_shape", "alpha_rate", "inclusion_prob"},
                 "priors");
  get_to(j, "theta_sd", d.theta_sd);
  get_to(j, "alpha_shape", d.alpha_shape);
  get_to(j, "alpha_rate", d.alpha_rate);
  get_to(j, "inclusion_prob", d.inclusion_prob);
  return d;
}

Json to_json(const PredictOptions& p) {
  return Json{{"credible_level", p.credible_level},
              {"sims_per_component", p.sims_per_component},
              {"seed", p.seed}};
}

PredictOptions predict_options_from_json(const Json& j, PredictOptions d) {
  reject_unknown(j, {"credible_level", "sims_per_component", "seed"},
                 "prediction");
  get_to(j, "credible_level", d.credible_level);
  get_to(j, "sims_per_component", d.sims_per_component);
  get_to(j, "seed", d.seed);
  return d;
}

Json to_json(const ScoreOptions& s) {
  return Json{{"n_bootstrap", s.n_bootstrap},
              {"seed", s.seed},
              {"station_block", s.station_block}};
}

ScoreOptions score_options_from_json(const Json& j, ScoreOptions d) {
  reject_unknown(j, {"n_bootstrap", "seed", "station_block"}, "score");
  get_to(j, "n_bootstrap", d.n_bootstrap);
  get_to(j, "seed", d.seed);
  get_to(j, "station_block", d.station_block);
  return d;
}

Json to_json(const SimulationSpec& s) {
  return Json{{"n_stations", s.n_stations},
              {"n_years_min", s.n_years_min},
              {"n_years_max", s.n_years_max},
              {"theta_mu", s.theta_mu},
              {"theta_kappa", s.theta_kappa},
              {"theta_xi", s.theta_xi},
              {"alpha_mu", inf_to_json(s.alpha_mu)},
              {"alpha_kappa", inf_to_json(s.alpha_kappa)},
              {"alpha_xi", inf_to_json(s.alpha_xi)},
              {"seed", s.seed}};
}

SimulationSpec simulation_spec_from_json(const Json& j, SimulationSpec d) {
  reject_unknown(j,
                 {"n_stations", "n_years_min", "n_years_max", "theta_mu",
                  "theta_kappa", "theta_xi", "alpha_mu", "alpha_kappa",
                  "alpha_xi", "seed"},
                 "simulate");
  get_to(j, "n_stations", d.n_stations);
  get_to(j, "n_years_min", d.n_years_min);
  get_to(j, "n_years_max", d.n_years_max);
  get_to(j, "theta_mu", d.theta_mu);
  get_to(j, "theta_kappa", d.theta_kappa);
  get_to(j, "theta_xi", d.theta_xi);
  inf_from_json(j, "alpha_mu", d.alpha_mu);
  inf_from_json(j, "alpha_kappa", d.alpha_kappa);
  inf_from_json(j, "alpha_xi", d.alpha_xi);
  get_to(j, "seed", d.seed);
  return d;
}

Json to_json(const LocalPriors& p) {
  return Json{{"mu_sd", p.mu_sd}, {"eta_sd", p.eta_sd}, {"xi_sd", p.xi_sd}};
}

LocalPriors local_priors_from_json(const Json& j, LocalPriors d) {
  reject_unknown(j, {"mu_sd", "eta_sd", "xi_sd"}, "local priors");
  get_to(j, "mu_sd", d.mu_sd);
  get_to(j, "eta_sd", d.eta_sd);
  get_to(j, "xi_sd", d.xi_sd);
  return d;
}

}  // namespace ffa
