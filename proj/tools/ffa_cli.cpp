// ffa command-line interface. Everything runs through the C API in ffa.h;
// this translation unit only parses flags, assembles the JSON config, and
// moves strings and files around.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ffa.h"

namespace {

using Json = nlohmann::json;

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> burnin;
  std::string folds;           // comma-separated station ids
  std::string return_periods;  // comma-separated numbers
  std::string output;
  std::string maxima;
  std::string covariates;
  std::string fit_path;  // checkpoint for predict/validate
  std::string station;
  std::string site_covariates;  // comma-separated raw values
  std::string resume;
  bool preselect = false;
  bool local = false;
};

[[noreturn]] void die(int code, const std::string& msg) {
  std::cerr << "ffa: " << msg << "\n";
  std::exit(code == FFA_OK ? 1 : code);
}

void check(int rc) {
  if (rc != FFA_OK) die(rc, ffa_last_error());
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      die(FFA_ERR_CONFIG, std::string("bad ") + what + " value '" + item +
                              "'");
    }
  }
  if (out.empty()) die(FFA_ERR_CONFIG, std::string("empty ") + what + " list");
  return out;
}

std::vector<std::string> parse_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Json load_config_json(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) die(FFA_ERR_CONFIG, "cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    die(FFA_ERR_CONFIG, "config '" + path + "' is not valid JSON: " +
                            std::string(e.what()));
  }
  return j;
}

// Environment overrides sit between the config file and the flags.
void apply_env(Json& cfg) {
  const auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || v[0] == '\0') return std::nullopt;
    return std::string(v);
  };
  if (const auto v = env("FFA_SEED")) cfg["seed"] = std::stoull(*v);
  if (const auto v = env("FFA_ITERATIONS")) {
    cfg["chain"]["iterations"] = std::stoull(*v);
  }
  if (const auto v = env("FFA_BURNIN")) cfg["chain"]["burnin"] = std::stoull(*v);
  if (const auto v = env("FFA_OUTPUT")) cfg["output"] = *v;
  if (const auto v = env("FFA_FOLDS")) cfg["folds"] = parse_list(*v);
  if (const auto v = env("FFA_RETURN_PERIODS")) {
    cfg["return_periods"] = parse_doubles(*v, "FFA_RETURN_PERIODS");
  }
}

Json resolve_config(const Flags& f) {
  Json cfg = load_config_json(f.config_path);
  apply_env(cfg);
  if (f.seed) cfg["seed"] = *f.seed;
  if (f.iterations) cfg["chain"]["iterations"] = *f.iterations;
  if (f.burnin) cfg["chain"]["burnin"] = *f.burnin;
  if (!f.output.empty()) cfg["output"] = f.output;
  if (!f.maxima.empty()) cfg["data"]["maxima"] = f.maxima;
  if (!f.covariates.empty()) cfg["data"]["covariates"] = f.covariates;
  if (!f.folds.empty()) cfg["folds"] = parse_list(f.folds);
  if (!f.return_periods.empty()) {
    cfg["return_periods"] = parse_doubles(f.return_periods, "return period");
  }
  if (!f.station.empty()) cfg["station"] = f.station;
  if (!f.resume.empty()) cfg["resume"] = f.resume;
  if (f.preselect) cfg["preselect"] = true;
  if (f.local) cfg["model"] = "local";
  return cfg;
}

std::string output_dir(const Json& cfg) {
  return cfg.value("output", "ffa-run");
}

struct DatasetHandle {
  ffa_dataset* p = nullptr;
  ~DatasetHandle() { ffa_dataset_free(p); }
};
struct SamplesHandle {
  ffa_samples* p = nullptr;
  ~SamplesHandle() { ffa_samples_free(p); }
};

void print_warnings(const ffa_dataset* d) {
  char* w = nullptr;
  check(ffa_dataset_warnings(d, &w));
  if (w != nullptr && w[0] != '\0') std::cerr << w;
  ffa_string_free(w);
}

DatasetHandle load_data(const Json& cfg) {
  const std::string maxima = cfg.value("data", Json::object())
                                 .value("maxima", "");
  const std::string covariates = cfg.value("data", Json::object())
                                     .value("covariates", "");
  if (maxima.empty() || covariates.empty()) {
    die(FFA_ERR_CONFIG,
        "data files required (--maxima/--covariates or config data.*)");
  }
  DatasetHandle d;
  check(ffa_dataset_load(maxima.c_str(), covariates.c_str(),
                         static_cast<int>(cfg.value("min_years", 20)), &d.p));
  print_warnings(d.p);
  return d;
}

// Records the fully resolved configuration (defaults and derived seeds
// included); rerunning with --config on this file reproduces the run.
void write_config_echo(const Json& cfg, const std::string& dir) {
  char* resolved = nullptr;
  check(ffa_resolve_config(cfg.dump().c_str(), &resolved));
  std::ofstream out(dir + "/resolved_config.json");
  out << resolved;
  ffa_string_free(resolved);
}

std::vector<double> return_periods_of(const Json& cfg) {
  if (cfg.contains("return_periods")) {
    return cfg["return_periods"].get<std::vector<double>>();
  }
  return {10.0, 50.0, 100.0, 1000.0};
}

int cmd_simulate(const Flags& f) {
  const Json cfg = resolve_config(f);
  DatasetHandle d;
  check(ffa_dataset_simulate(cfg.dump().c_str(), &d.p));
  const std::string dir = output_dir(cfg);
  check(ffa_dataset_write(d.p, dir.c_str()));
  write_config_echo(cfg, dir);
  std::cout << "simulated " << ffa_dataset_n_stations(d.p) << " stations ("
            << ffa_dataset_n_covariates(d.p) - 1 << " covariates) into "
            << dir << "\n";
  return 0;
}

int cmd_fit(const Flags& f) {
  const Json cfg = resolve_config(f);
  const std::string dir = output_dir(cfg);
  DatasetHandle d = load_data(cfg);
  SamplesHandle s;
  if (cfg.value("model", "regional") == "local") {
    const std::string station = cfg.value("station", "");
    if (station.empty()) {
      die(FFA_ERR_CONFIG, "local fit needs --station");
    }
    check(ffa_fit_local(d.p, station.c_str(), cfg.dump().c_str(), &s.p));
  } else {
    check(ffa_fit(d.p, cfg.dump().c_str(), &s.p));
  }
  check(ffa_write_fit_artifacts(s.p, dir.c_str()));
  write_config_echo(cfg, dir);
  std::cout << "fit complete: " << ffa_samples_n_draws(s.p)
            << " retained draws; artifacts in " << dir << "\n";
  return 0;
}

int cmd_predict(const Flags& f) {
  const Json cfg = resolve_config(f);
  if (f.fit_path.empty()) die(FFA_ERR_CONFIG, "predict needs --fit");
  SamplesHandle s;
  check(ffa_samples_load(f.fit_path.c_str(), &s.p));
  const std::vector<double> periods = return_periods_of(cfg);

  char* csv = nullptr;
  if (!f.site_covariates.empty()) {
    const std::vector<double> x =
        parse_doubles(f.site_covariates, "covariate");
    check(ffa_predict_new_site(s.p, x.data(), x.size(), periods.data(),
                               periods.size(), cfg.dump().c_str(), &csv));
  } else if (!f.station.empty()) {
    check(ffa_predict_station(s.p, f.station.c_str(), periods.data(),
                              periods.size(), cfg.dump().c_str(), &csv));
  } else {
    die(FFA_ERR_CONFIG, "predict needs --station or --covariates");
  }
  std::cout << csv;
  if (!f.output.empty()) {
    std::ofstream out(f.output + "/return_levels.csv");
    if (!out) {
      ffa_string_free(csv);
      die(FFA_ERR_DATA, "cannot write to " + f.output);
    }
    out << csv;
  }
  ffa_string_free(csv);
  return 0;
}

int cmd_cv(const Flags& f) {
  const Json cfg = resolve_config(f);
  const std::string dir = output_dir(cfg);
  DatasetHandle d = load_data(cfg);
  check(ffa_cv_run(d.p, cfg.dump().c_str(), dir.c_str()));
  write_config_echo(cfg, dir);
  std::cout << "cross-validation artifacts in " << dir << "\n";
  return 0;
}

int cmd_validate(const Flags& f) {
  const Json cfg = resolve_config(f);
  if (f.fit_path.empty()) die(FFA_ERR_CONFIG, "validate needs --fit");
  const std::string dir = output_dir(cfg);
  DatasetHandle d = load_data(cfg);
  SamplesHandle s;
  check(ffa_samples_load(f.fit_path.c_str(), &s.p));
  check(ffa_validate_run(s.p, d.p, cfg.dump().c_str(), dir.c_str()));
  write_config_echo(cfg, dir);
  std::cout << "validation artifacts in " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian regional flood frequency analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ffa_version());

  Flags f;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--output", f.output, "output directory");
  };
  const auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--maxima", f.maxima, "annual maxima CSV");
    cmd->add_option("--covariates", f.covariates, "covariates CSV");
  };
  const auto add_chain = [&](CLI::App* cmd) {
    cmd->add_option("--iterations", f.iterations, "MCMC iterations");
    cmd->add_option("--burnin", f.burnin, "burn-in iterations");
  };

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  add_common(sim);

  auto* fit = app.add_subcommand("fit", "fit the regional (or local) model");
  add_common(fit);
  add_data(fit);
  add_chain(fit);
  fit->add_flag("--preselect", f.preselect,
                "stepwise-AIC covariate pre-selection");
  fit->add_flag("--local", f.local, "single-station model");
  fit->add_option("--station", f.station, "station id for --local");
  fit->add_option("--resume", f.resume, "resume from a checkpoint");

  auto* pred = app.add_subcommand("predict", "return levels from a fit");
  add_common(pred);
  pred->add_option("--fit", f.fit_path, "checkpoint.bin from a fit")
      ->required();
  pred->add_option("--station", f.station, "fitted station id");
  pred->add_option("--covariates", f.site_covariates,
                   "raw covariate values for an ungauged site");
  pred->add_option("--return-periods", f.return_periods,
                   "comma-separated return periods");

  auto* cv = app.add_subcommand("cv", "leave-one-out cross-validation");
  add_common(cv);
  add_data(cv);
  add_chain(cv);
  cv->add_option("--folds", f.folds, "comma-separated station ids");
  cv->add_option("--return-periods", f.return_periods,
                 "comma-separated return periods");

  auto* val = app.add_subcommand("validate", "in-sample reliability checks");
  add_common(val);
  add_data(val);
  val->add_option("--fit", f.fit_path, "checkpoint.bin from a fit")
      ->required();
  val->add_option("--return-periods", f.return_periods,
                  "comma-separated return periods");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(f);
    if (fit->parsed()) return cmd_fit(f);
    if (pred->parsed()) return cmd_predict(f);
    if (cv->parsed()) return cmd_cv(f);
    if (val->parsed()) return cmd_validate(f);
  } catch (const std::exception& e) {
    die(FFA_ERR_INTERNAL, e.what());
  }
  return 0;
}
