#include "ffa.h"

#include <cstring>
#include <exception>
#include <string>

#include "ffa/error.hpp"
#include "ffa/io.hpp"
#include "ffa/stepwise.hpp"

// Handle definitions. A dataset handle optionally carries the generating
// truth (for simulated data) and the loader warnings.
struct ffa_dataset {
  ffa::Dataset data;
  std::vector<std::string> warnings;
  bool simulated = false;
  ffa::SimulatedDataset sim;  // valid when simulated
};

struct ffa_samples {
  ffa::PosteriorSamples samples;
};

namespace {

thread_local std::string t_last_error = "";

int fail(int code, const std::string& msg) {
  t_last_error = msg;
  return code;
}

// Maps C++ exceptions onto status codes; the lambda does the real work.
template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return FFA_OK;
  } catch (const ffa::ConfigError& e) {
    return fail(FFA_ERR_CONFIG, e.what());
  } catch (const ffa::DataError& e) {
    return fail(FFA_ERR_DATA, e.what());
  } catch (const ffa::NumericError& e) {
    return fail(FFA_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(FFA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FFA_ERR_INTERNAL, "unknown error");
  }
}

int require(bool cond, const char* msg) {
  return cond ? FFA_OK : fail(FFA_ERR_CONFIG, msg);
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ffa::RunConfig parse_config(const char* config_json) {
  if (config_json == nullptr || config_json[0] == '\0') {
    ffa::RunConfig cfg;
    cfg.resolve_seeds();
    return cfg;
  }
  ffa::Json j;
  try {
    j = ffa::Json::parse(config_json);
  } catch (const ffa::Json::exception& e) {
    throw ffa::ConfigError(std::string("config is not valid JSON: ") +
                           e.what());
  }
  return ffa::run_config_from_json(j);
}

std::vector<double> to_vector(const double* p, size_t n) {
  return std::vector<double>(p, p + n);
}

}  // namespace

extern "C" {

const char* ffa_version(void) { return "1.0.0"; }

const char* ffa_last_error(void) { return t_last_error.c_str(); }

void ffa_string_free(char* s) { delete[] s; }

int ffa_dataset_load(const char* maxima_csv, const char* covariates_csv,
                     int min_years, ffa_dataset** out) {
  if (int rc = require(maxima_csv && covariates_csv && out,
                       "null argument to ffa_dataset_load")) {
    return rc;
  }
  return guarded([&] {
    auto loaded = ffa::load_dataset(
        maxima_csv, covariates_csv,
        min_years > 0 ? static_cast<std::size_t>(min_years) : 20);
    auto* h = new ffa_dataset;
    h->data = std::move(loaded.data);
    h->warnings = std::move(loaded.warnings);
    *out = h;
  });
}

int ffa_dataset_simulate(const char* config_json, ffa_dataset** out) {
  if (int rc = require(out != nullptr, "null output handle")) return rc;
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    auto* h = new ffa_dataset;
    h->sim = ffa::simulate_dataset(cfg.sim);
    h->data = h->sim.data;
    h->simulated = true;
    *out = h;
  });
}

void ffa_dataset_free(ffa_dataset* d) { delete d; }

int ffa_dataset_n_stations(const ffa_dataset* d) {
  return d ? static_cast<int>(d->data.n_stations()) : 0;
}

int ffa_dataset_n_covariates(const ffa_dataset* d) {
  return d ? static_cast<int>(d->data.n_covariates()) : 0;
}

int ffa_dataset_station_id(const ffa_dataset* d, size_t index, char** out) {
  if (int rc = require(d && out, "null argument")) return rc;
  return guarded([&] {
    if (index >= d->data.n_stations()) {
      throw ffa::DataError("station index out of range");
    }
    *out = copy_string(d->data.station(index).id);
  });
}

int ffa_dataset_warnings(const ffa_dataset* d, char** out) {
  if (int rc = require(d && out, "null argument")) return rc;
  return guarded([&] {
    std::string joined;
    for (const auto& w : d->warnings) {
      joined += w;
      joined += '\n';
    }
    *out = copy_string(joined);
  });
}

int ffa_dataset_write(const ffa_dataset* d, const char* out_dir) {
  if (int rc = require(d && out_dir, "null argument")) return rc;
  return guarded([&] {
    ffa::write_dataset_csv(d->data, out_dir);
    if (d->simulated) ffa::write_truth_json(d->sim, out_dir);
  });
}

int ffa_fit(const ffa_dataset* d, const char* config_json, ffa_samples** out) {
  if (int rc = require(d && out, "null argument to ffa_fit")) return rc;
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    if (cfg.model != "regional") {
      throw ffa::ConfigError("ffa_fit drives the regional model; use "
                             "ffa_fit_local for a single station");
    }

    ffa::Dataset data = d->data;
    if (cfg.preselect) {
      const auto flags =
          ffa::stepwise_aic_selection(data, cfg.preselect_log_response);
      std::vector<std::size_t> keep;
      for (std::size_t j = 0; j < flags.size(); ++j) {
        if (flags[j]) keep.push_back(j);
      }
      data = data.select_covariates(keep);
    }

    std::string checkpoint_path;
    if (cfg.chain.checkpoint_every > 0 || !cfg.resume_path.empty()) {
      ffa::ensure_directory(cfg.output_dir);
      checkpoint_path = cfg.output_dir + "/checkpoint.bin";
    }

    ffa::PosteriorSamples resume;
    const ffa::PosteriorSamples* resume_ptr = nullptr;
    if (!cfg.resume_path.empty()) {
      resume = ffa::load_samples(cfg.resume_path);
      resume_ptr = &resume;
    }

    auto* h = new ffa_samples;
    h->samples = ffa::run_chain(data, cfg.priors, cfg.chain, checkpoint_path,
                                resume_ptr);
    *out = h;
  });
}

int ffa_fit_local(const ffa_dataset* d, const char* station_id,
                  const char* config_json, ffa_samples** out) {
  if (int rc = require(d && station_id && out,
                       "null argument to ffa_fit_local")) {
    return rc;
  }
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    const std::size_t idx = d->data.index_of(station_id);
    auto* h = new ffa_samples;
    h->samples =
        ffa::fit_local(d->data.station(idx), cfg.chain, cfg.local_priors);
    *out = h;
  });
}

void ffa_samples_free(ffa_samples* s) { delete s; }

int ffa_samples_save(const ffa_samples* s, const char* path) {
  if (int rc = require(s && path, "null argument")) return rc;
  return guarded([&] { ffa::save_samples(path, s->samples); });
}

int ffa_samples_load(const char* path, ffa_samples** out) {
  if (int rc = require(path && out, "null argument")) return rc;
  return guarded([&] {
    auto* h = new ffa_samples;
    h->samples = ffa::load_samples(path);
    *out = h;
  });
}

int ffa_samples_n_draws(const ffa_samples* s) {
  return s ? static_cast<int>(s->samples.n_draws()) : 0;
}

int ffa_write_fit_artifacts(const ffa_samples* s, const char* out_dir) {
  if (int rc = require(s && out_dir, "null argument")) return rc;
  return guarded([&] { ffa::write_fit_artifacts(s->samples, out_dir); });
}

int ffa_predict_station(const ffa_samples* s, const char* station_id,
                        const double* return_periods, size_t n_periods,
                        const char* config_json, char** csv_out) {
  if (int rc = require(s && station_id && return_periods && n_periods > 0 &&
                           csv_out,
                       "null argument to ffa_predict_station")) {
    return rc;
  }
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    const std::size_t idx = s->samples.station_index(station_id);
    std::vector<double> probs;
    for (const double T : to_vector(return_periods, n_periods)) {
      probs.push_back(ffa::gev::prob_of_return_period(T));
    }
    auto rls = ffa::return_levels_station(s->samples, idx, probs, cfg.predict);
    std::vector<ffa::LabeledReturnLevel> rows;
    for (std::size_t k = 0; k < rls.size(); ++k) {
      rls[k].return_period = return_periods[k];  // as requested, no re-derive
      rows.push_back({station_id, rls[k]});
    }
    *csv_out = copy_string(ffa::return_levels_to_csv(rows));
  });
}

int ffa_predict_new_site(const ffa_samples* s, const double* covariates,
                         size_t n_covariates, const double* return_periods,
                         size_t n_periods, const char* config_json,
                         char** csv_out) {
  if (int rc = require(s && covariates && return_periods && n_periods > 0 &&
                           csv_out,
                       "null argument to ffa_predict_new_site")) {
    return rc;
  }
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    std::vector<double> raw;
    raw.reserve(n_covariates + 1);
    raw.push_back(1.0);
    raw.insert(raw.end(), covariates, covariates + n_covariates);
    const std::vector<double> x = s->samples.standardization.apply(raw);
    std::vector<double> probs;
    for (const double T : to_vector(return_periods, n_periods)) {
      probs.push_back(ffa::gev::prob_of_return_period(T));
    }
    auto rls = ffa::return_levels_new_site(s->samples, x, probs, cfg.predict);
    std::vector<ffa::LabeledReturnLevel> rows;
    for (std::size_t k = 0; k < rls.size(); ++k) {
      rls[k].return_period = return_periods[k];
      rows.push_back({"new_site", rls[k]});
    }
    *csv_out = copy_string(ffa::return_levels_to_csv(rows));
  });
}

int ffa_cv_run(const ffa_dataset* d, const char* config_json,
               const char* out_dir) {
  if (int rc = require(d && out_dir, "null argument to ffa_cv_run")) return rc;
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    std::vector<std::string> folds = cfg.folds;
    if (folds.empty()) {
      if (cfg.n_random_folds == 0) {
        throw ffa::ConfigError("cv needs config.folds or n_random_folds");
      }
      if (cfg.n_random_folds >= d->data.n_stations()) {
        throw ffa::ConfigError("n_random_folds must leave stations to train "
                               "on");
      }
      // Seeded sample without replacement, ordered by station index.
      ffa::Rng rng(ffa::derive_seed(cfg.seed, "cv.fold_choice"));
      std::vector<std::size_t> idx(d->data.n_stations());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < cfg.n_random_folds; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
      }
      idx.resize(cfg.n_random_folds);
      std::sort(idx.begin(), idx.end());
      for (const std::size_t i : idx) {
        folds.push_back(d->data.station(i).id);
      }
    }
    ffa::LooOptions opts;
    opts.return_periods = cfg.return_periods;
    opts.predict = cfg.predict;
    opts.score = cfg.score;
    opts.seed = cfg.seed;
    const ffa::LooResult result = ffa::loo_cross_validate(
        d->data, folds, cfg.priors, cfg.chain, opts);
    ffa::write_cv_artifacts(result, out_dir);
  });
}

int ffa_validate_run(const ffa_samples* s, const ffa_dataset* d,
                     const char* config_json, const char* out_dir) {
  if (int rc = require(s && d && out_dir,
                       "null argument to ffa_validate_run")) {
    return rc;
  }
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    ffa::write_validation_artifacts(s->samples, d->data, cfg, out_dir);
  });
}

int ffa_resolve_config(const char* config_json, char** json_out) {
  if (int rc = require(json_out != nullptr, "null argument")) return rc;
  return guarded([&] {
    const ffa::RunConfig cfg = parse_config(config_json);
    *json_out = copy_string(ffa::to_json(cfg).dump(2) + "\n");
  });
}

int ffa_stepwise_select(const ffa_dataset* d, int log_response,
                        char** json_out) {
  if (int rc = require(d && json_out, "null argument")) return rc;
  return guarded([&] {
    const auto flags =
        ffa::stepwise_aic_selection(d->data, log_response != 0);
    ffa::Json j = ffa::Json::object();
    for (std::size_t i = 0; i < flags.size(); ++i) {
      j[d->data.covariate_names()[i]] = static_cast<int>(flags[i]);
    }
    *json_out = copy_string(j.dump());
  });
}

}  // extern "C"
