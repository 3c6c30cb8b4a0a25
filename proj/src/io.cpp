#include "ffa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ffa/error.hpp"
#include "ffa/gev.hpp"

namespace ffa {

namespace fs = std::filesystem;

// ---- small helpers ----------------------------------------------------------

std::string format_double(double v) {
  // Shortest representation that round-trips exactly.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) {
    throw DataError("cannot create directory '" + path + "': " + ec.message());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw DataError("write to '" + path + "' failed");
}

namespace {

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& file,
                    std::size_t line_no, const std::string& what) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    throw DataError(file + ":" + std::to_string(line_no) + ": non-numeric " +
                    what + " '" + s + "'");
  }
  return v;
}

long parse_year(const std::string& s, const std::string& file,
                std::size_t line_no) {
  long v = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError(file + ":" + std::to_string(line_no) +
                    ": non-numeric year '" + s + "'");
  }
  return v;
}

// Reads non-empty, non-comment lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_csv_lines(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty() || line[0] == '#') continue;
    out.emplace_back(no, line);
  }
  if (out.empty()) throw DataError("'" + path + "' has no data");
  return out;
}

void write_manifest(const std::string& dir, const std::string& kind,
                    const std::vector<std::string>& files) {
  Json j{{"schema", "ffa.run_manifest"},
         {"schema_version", 1},
         {"kind", kind},
         {"files", files}};
  write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace

// ---- dataset loading ----------------------------------------------------------

LoadResult load_dataset(const std::string& maxima_path,
                        const std::string& covariates_path,
                        std::size_t min_years) {
  // Covariates: station_id plus one column per covariate.
  const auto cov_lines = read_csv_lines(covariates_path);
  const auto cov_header = split_csv_line(cov_lines.front().second);
  if (cov_header.size() < 2 || cov_header[0] != "station_id") {
    throw DataError(covariates_path +
                    ": header must be 'station_id,<covariate>,...'");
  }
  std::vector<std::string> names(cov_header.begin() + 1, cov_header.end());
  std::map<std::string, std::vector<double>> covariates;
  std::map<std::string, std::size_t> cov_line_of;
  for (std::size_t k = 1; k < cov_lines.size(); ++k) {
    const auto& [no, line] = cov_lines[k];
    const auto fields = split_csv_line(line);
    if (fields.size() != cov_header.size()) {
      throw DataError(covariates_path + ":" + std::to_string(no) + ": has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(cov_header.size()));
    }
    const std::string& id = fields[0];
    if (covariates.count(id)) {
      throw DataError(covariates_path + ":" + std::to_string(no) +
                      ": duplicate station id '" + id + "'");
    }
    std::vector<double> x(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      x[j - 1] = parse_double(fields[j], covariates_path, no,
                              "covariate '" + cov_header[j] + "'");
    }
    covariates.emplace(id, std::move(x));
    cov_line_of.emplace(id, no);
  }

  // Maxima: station_id,year,value.
  const auto max_lines = read_csv_lines(maxima_path);
  const auto max_header = split_csv_line(max_lines.front().second);
  if (max_header.size() != 3 || max_header[0] != "station_id" ||
      max_header[1] != "year" || max_header[2] != "value") {
    throw DataError(maxima_path + ": header must be 'station_id,year,value'");
  }
  std::map<std::string, std::map<long, double>> maxima;
  std::map<std::string, std::size_t> max_line_of;
  for (std::size_t k = 1; k < max_lines.size(); ++k) {
    const auto& [no, line] = max_lines[k];
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) {
      throw DataError(maxima_path + ":" + std::to_string(no) +
                      ": expected 3 fields, got " +
                      std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    const long year = parse_year(fields[1], maxima_path, no);
    const double value = parse_double(fields[2], maxima_path, no, "value");
    const auto [it, inserted] = maxima[id].emplace(year, value);
    (void)it;
    if (!inserted) {
      throw DataError(maxima_path + ":" + std::to_string(no) +
                      ": duplicate year " + std::to_string(year) +
                      " for station '" + id + "'");
    }
    max_line_of.emplace(id, no);
  }

  // Join: flood records without covariates cannot be modeled.
  std::vector<std::string> missing;
  for (const auto& [id, _] : maxima) {
    if (!covariates.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      list += (i ? ", " : "") + missing[i];
    }
    if (missing.size() > 10) list += ", ...";
    throw DataError(maxima_path + ": " + std::to_string(missing.size()) +
                    " station id(s) have no covariates (first seen at line " +
                    std::to_string(max_line_of[missing.front()]) + "): " +
                    list);
  }

  LoadResult result;
  std::vector<Station> stations;
  for (const auto& [id, x] : covariates) {
    const auto it = maxima.find(id);
    if (it == maxima.end()) {
      result.warnings.push_back("station '" + id +
                                "' has covariates but no flood records; "
                                "dropped");
      continue;
    }
    if (it->second.size() < min_years) {
      result.warnings.push_back(
          "station '" + id + "' has only " +
          std::to_string(it->second.size()) + " years (< " +
          std::to_string(min_years) + "); dropped");
      continue;
    }
    Station st;
    st.id = id;
    st.raw_covariates.reserve(x.size() + 1);
    st.raw_covariates.push_back(1.0);
    st.raw_covariates.insert(st.raw_covariates.end(), x.begin(), x.end());
    st.annual_maxima.reserve(it->second.size());
    for (const auto& [year, value] : it->second) {
      (void)year;
      st.annual_maxima.push_back(value);
    }
    stations.push_back(std::move(st));
  }
  if (stations.empty()) {
    throw DataError("no stations left after the minimum-record filter");
  }

  std::vector<std::string> full_names;
  full_names.reserve(names.size() + 1);
  full_names.push_back("constant");
  full_names.insert(full_names.end(), names.begin(), names.end());
  result.data = Dataset::from_raw(std::move(stations), std::move(full_names));
  return result;
}

void write_dataset_csv(const Dataset& data, const std::string& out_dir) {
  ensure_directory(out_dir);
  std::ostringstream mx;
  mx << "station_id,year,value\n";
  for (const auto& st : data.stations()) {
    for (std::size_t t = 0; t < st.n_years(); ++t) {
      mx << st.id << ',' << (t + 1) << ',' << format_double(st.annual_maxima[t])
         << '\n';
    }
  }
  write_text_file(out_dir + "/maxima.csv", mx.str());

  std::ostringstream cv;
  cv << "station_id";
  for (std::size_t j = 1; j < data.n_covariates(); ++j) {
    cv << ',' << data.covariate_names()[j];
  }
  cv << '\n';
  for (const auto& st : data.stations()) {
    cv << st.id;
    for (std::size_t j = 1; j < data.n_covariates(); ++j) {
      cv << ',' << format_double(st.raw_covariates[j]);
    }
    cv << '\n';
  }
  write_text_file(out_dir + "/covariates.csv", cv.str());
}

void write_truth_json(const SimulatedDataset& sim, const std::string& out_dir) {
  ensure_directory(out_dir);
  Json theta = Json::object();
  Json tau = Json::object();
  Json alpha = Json::object();
  for (const Block b : kBlocks) {
    const auto& blk = sim.truth.block(b);
    theta[block_name(b)] = blk.theta;
    tau[block_name(b)] = blk.tau;
    alpha[block_name(b)] = blk.alpha;
  }
  std::vector<std::string> ids;
  for (const auto& st : sim.data.stations()) ids.push_back(st.id);
  const Json j{{"schema", "ffa.truth"},
               {"schema_version", 1},
               {"note", "coefficients apply to standardized covariates"},
               {"spec", to_json(sim.spec)},
               {"covariate_names", sim.data.covariate_names()},
               {"station_ids", ids},
               {"theta", theta},
               {"tau", tau},
               {"alpha", alpha}};
  write_text_file(out_dir + "/truth.json", j.dump(2) + "\n");
}

// ---- run configuration ----------------------------------------------------------

void RunConfig::resolve_seeds() {
  chain.seed = derive_seed(seed, "run.chain");
  predict.seed = derive_seed(seed, "run.predict");
  score.seed = derive_seed(seed, "run.score");
  sim.seed = derive_seed(seed, "run.simulate");
}

void RunConfig::validate_common() const {
  if (output_dir.empty()) throw ConfigError("output dir must not be empty");
  if (model != "regional" && model != "local") {
    throw ConfigError("model must be 'regional' or 'local'");
  }
  for (const double T : return_periods) {
    if (!(T > 1.0)) {
      throw ConfigError("return periods must exceed 1 year, got " +
                        format_double(T));
    }
  }
  if (min_years < 1) throw ConfigError("min_years must be >= 1");
}

RunConfig run_config_from_json(const Json& j, RunConfig d) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
      "seed",        "data",          "output",      "model",
      "station",     "chain",         "priors",      "local_priors",
      "prediction",  "score",         "simulate",    "return_periods",
      "folds",       "n_random_folds", "preselect",
      "preselect_log_response",       "min_years",   "resume"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  if (j.contains("seed")) j.at("seed").get_to(d.seed);
  if (j.contains("data")) {
    const auto& data = j.at("data");
    if (data.contains("maxima")) data.at("maxima").get_to(d.maxima_path);
    if (data.contains("covariates")) {
      data.at("covariates").get_to(d.covariates_path);
    }
  }
  if (j.contains("output")) j.at("output").get_to(d.output_dir);
  if (j.contains("model")) j.at("model").get_to(d.model);
  if (j.contains("station")) j.at("station").get_to(d.station);
  if (j.contains("chain")) d.chain = chain_config_from_json(j.at("chain"), d.chain);
  if (j.contains("priors")) d.priors = priors_from_json(j.at("priors"), d.priors);
  if (j.contains("local_priors")) {
    d.local_priors = local_priors_from_json(j.at("local_priors"),
                                            d.local_priors);
  }
  if (j.contains("prediction")) {
    d.predict = predict_options_from_json(j.at("prediction"), d.predict);
  }
  if (j.contains("score")) {
    d.score = score_options_from_json(j.at("score"), d.score);
  }
  if (j.contains("simulate")) {
    d.sim = simulation_spec_from_json(j.at("simulate"), d.sim);
  }
  if (j.contains("return_periods")) {
    j.at("return_periods").get_to(d.return_periods);
  }
  if (j.contains("folds")) j.at("folds").get_to(d.folds);
  if (j.contains("n_random_folds")) {
    j.at("n_random_folds").get_to(d.n_random_folds);
  }
  if (j.contains("preselect")) j.at("preselect").get_to(d.preselect);
  if (j.contains("preselect_log_response")) {
    j.at("preselect_log_response").get_to(d.preselect_log_response);
  }
  if (j.contains("min_years")) j.at("min_years").get_to(d.min_years);
  if (j.contains("resume")) j.at("resume").get_to(d.resume_path);
  d.resolve_seeds();
  return d;
}

Json to_json(const RunConfig& c) {
  return Json{{"seed", c.seed},
              {"data", Json{{"maxima", c.maxima_path},
                            {"covariates", c.covariates_path}}},
              {"output", c.output_dir},
              {"model", c.model},
              {"station", c.station},
              {"chain", to_json(c.chain)},
              {"priors", to_json(c.priors)},
              {"local_priors", to_json(c.local_priors)},
              {"prediction", to_json(c.predict)},
              {"score", to_json(c.score)},
              {"simulate", to_json(c.sim)},
              {"return_periods", c.return_periods},
              {"folds", c.folds},
              {"n_random_folds", c.n_random_folds},
              {"preselect", c.preselect},
              {"preselect_log_response", c.preselect_log_response},
              {"min_years", c.min_years},
              {"resume", c.resume_path}};
}

RunConfig load_run_config_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

// ---- artifact writers ----------------------------------------------------------

namespace {

struct Summary {
  double mean, sd, q05, median, q95;
};

Summary summarize(std::vector<double> v) {
  Summary s{};
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  std::sort(v.begin(), v.end());
  s.mean = mean;
  s.sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.q05 = empirical_quantile(v, 0.05);
  s.median = empirical_quantile(v, 0.5);
  s.q95 = empirical_quantile(v, 0.95);
  return s;
}

std::string pit_csv(const std::vector<PitRecord>& pits) {
  std::ostringstream ss;
  ss << "station_id,year_index,pit\n";
  for (const auto& p : pits) {
    ss << p.station_id << ',' << p.year_index << ',' << format_double(p.pit)
       << '\n';
  }
  return ss.str();
}

std::string scores_csv(const std::vector<ScoreReport>& reports) {
  std::ostringstream ss;
  ss << "model,return_period,mean_score,ci_lo,ci_hi,n_obs\n";
  for (const auto& r : reports) {
    ss << r.model_name << ',' << format_double(r.return_period) << ','
       << format_double(r.mean_score) << ',' << format_double(r.ci_lo) << ','
       << format_double(r.ci_hi) << ',' << r.n_obs << '\n';
  }
  return ss.str();
}

std::string pp_csv(const PpData& pp) {
  std::ostringstream ss;
  ss << "empirical,theoretical\n";
  for (std::size_t i = 0; i < pp.empirical.size(); ++i) {
    ss << format_double(pp.empirical[i]) << ','
       << format_double(pp.theoretical[i]) << '\n';
  }
  return ss.str();
}

}  // namespace

void write_fit_artifacts(const PosteriorSamples& samples,
                         const std::string& out_dir) {
  if (samples.draws.empty()) throw NumericError("fit produced no draws");
  ensure_directory(out_dir);
  save_samples(out_dir + "/checkpoint.bin", samples);

  const std::size_t D = samples.covariate_names.size();
  const std::size_t R = samples.draws.size();

  {
    std::ostringstream ss;
    ss << "covariate,mu,kappa,xi\n";
    for (std::size_t j = 0; j < D; ++j) {
      ss << samples.covariate_names[j];
      for (const Block b : kBlocks) {
        double incl = 0.0;
        for (const auto& d : samples.draws) {
          incl += d.block(b).inclusion[j] ? 1.0 : 0.0;
        }
        ss << ',' << format_double(100.0 * incl / static_cast<double>(R));
      }
      ss << '\n';
    }
    write_text_file(out_dir + "/inclusion_probabilities.csv", ss.str());
  }

  {
    std::ostringstream ss;
    ss << "block,covariate,mean,sd,q05,median,q95,inclusion_prob\n";
    for (const Block b : kBlocks) {
      for (std::size_t j = 0; j < D; ++j) {
        std::vector<double> v;
        v.reserve(R);
        double incl = 0.0;
        for (const auto& d : samples.draws) {
          v.push_back(d.block(b).theta[j]);
          incl += d.block(b).inclusion[j] ? 1.0 : 0.0;
        }
        const Summary s = summarize(std::move(v));
        ss << block_name(b) << ',' << samples.covariate_names[j] << ','
           << format_double(s.mean) << ',' << format_double(s.sd) << ','
           << format_double(s.q05) << ',' << format_double(s.median) << ','
           << format_double(s.q95) << ','
           << format_double(incl / static_cast<double>(R)) << '\n';
      }
    }
    write_text_file(out_dir + "/theta_summary.csv", ss.str());
  }

  {
    std::ostringstream ss;
    ss << "block,mean,sd,q05,median,q95\n";
    for (const Block b : kBlocks) {
      std::vector<double> v;
      v.reserve(R);
      for (const auto& d : samples.draws) v.push_back(d.block(b).alpha);
      const Summary s = summarize(std::move(v));
      ss << block_name(b) << ',' << format_double(s.mean) << ','
         << format_double(s.sd) << ',' << format_double(s.q05) << ','
         << format_double(s.median) << ',' << format_double(s.q95) << '\n';
    }
    write_text_file(out_dir + "/alpha_summary.csv", ss.str());
  }

  {
    std::ostringstream ss;
    ss << "station_id,mu_mean,mu_median,kappa_mean,kappa_median,xi_mean,"
          "xi_median,tau_mu_mean,tau_kappa_mean,tau_xi_mean\n";
    for (std::size_t s = 0; s < samples.n_stations(); ++s) {
      const auto params = station_draw_params(samples, s);
      std::vector<double> mu, kappa, xi;
      mu.reserve(R);
      kappa.reserve(R);
      xi.reserve(R);
      for (const auto& p : params) {
        mu.push_back(p.mu);
        kappa.push_back(p.kappa);
        xi.push_back(p.xi);
      }
      double tmu = 0.0, tkappa = 0.0, txi = 0.0;
      for (const auto& d : samples.draws) {
        tmu += d.block(Block::Mu).tau[s];
        tkappa += d.block(Block::Kappa).tau[s];
        txi += d.block(Block::Xi).tau[s];
      }
      const double rn = static_cast<double>(R);
      const Summary smu = summarize(std::move(mu));
      const Summary skappa = summarize(std::move(kappa));
      const Summary sxi = summarize(std::move(xi));
      ss << samples.station_ids[s] << ',' << format_double(smu.mean) << ','
         << format_double(smu.median) << ',' << format_double(skappa.mean)
         << ',' << format_double(skappa.median) << ','
         << format_double(sxi.mean) << ',' << format_double(sxi.median) << ','
         << format_double(tmu / rn) << ',' << format_double(tkappa / rn) << ','
         << format_double(txi / rn) << '\n';
    }
    write_text_file(out_dir + "/station_parameters.csv", ss.str());
  }

  {
    std::ostringstream ss;
    ss << "update,rate\n";
    for (const auto& [key, rate] : samples.acceptance_rates()) {
      ss << key << ',' << format_double(rate) << '\n';
    }
    write_text_file(out_dir + "/acceptance_rates.csv", ss.str());
  }

  write_manifest(out_dir, "fit",
                 {"checkpoint.bin", "inclusion_probabilities.csv",
                  "theta_summary.csv", "alpha_summary.csv",
                  "station_parameters.csv", "acceptance_rates.csv"});
}

std::string return_levels_to_csv(const std::vector<LabeledReturnLevel>& rows) {
  std::ostringstream ss;
  ss << "site,prob,return_period,posterior_mean,posterior_median,credible_lo,"
        "credible_hi,predictive_quantile\n";
  for (const auto& [site, r] : rows) {
    ss << site << ',' << format_double(r.prob) << ','
       << format_double(r.return_period) << ','
       << format_double(r.posterior_mean) << ','
       << format_double(r.posterior_median) << ','
       << format_double(r.credible_lo) << ',' << format_double(r.credible_hi)
       << ',' << format_double(r.predictive_quantile) << '\n';
  }
  return ss.str();
}

void write_return_levels_csv(const std::vector<LabeledReturnLevel>& rows,
                             const std::string& path) {
  write_text_file(path, return_levels_to_csv(rows));
}

void write_cv_artifacts(const LooResult& result, const std::string& out_dir) {
  ensure_directory(out_dir);
  std::vector<std::string> files;

  std::vector<PitRecord> pits_out;
  for (const auto& fold : result.folds) {
    pits_out.insert(pits_out.end(), fold.pits.begin(), fold.pits.end());
  }
  write_text_file(out_dir + "/pit_out_of_sample.csv", pit_csv(pits_out));
  write_text_file(out_dir + "/pit_in_sample.csv",
                  pit_csv(result.in_sample_pits));
  files.insert(files.end(), {"pit_out_of_sample.csv", "pit_in_sample.csv"});

  std::vector<double> p_out, p_in;
  for (const auto& p : pits_out) p_out.push_back(p.pit);
  for (const auto& p : result.in_sample_pits) p_in.push_back(p.pit);
  const PpData pp_out = pp_plot_data(p_out);
  const PpData pp_in = pp_plot_data(p_in);
  write_text_file(out_dir + "/pp_out_of_sample.csv", pp_csv(pp_out));
  write_text_file(out_dir + "/pp_in_sample.csv", pp_csv(pp_in));
  files.insert(files.end(), {"pp_out_of_sample.csv", "pp_in_sample.csv"});

  const Json stats{
      {"schema", "ffa.cv_pit_stats"},
      {"schema_version", 1},
      {"out_of_sample", Json{{"n", p_out.size()},
                             {"ks_statistic", ks_statistic_uniform(p_out)},
                             {"max_gap", pp_out.max_gap}}},
      {"in_sample", Json{{"n", p_in.size()},
                         {"ks_statistic", ks_statistic_uniform(p_in)},
                         {"max_gap", pp_in.max_gap}}}};
  write_text_file(out_dir + "/pit_stats.json", stats.dump(2) + "\n");
  files.push_back("pit_stats.json");

  std::vector<ScoreReport> pooled = result.out_of_sample_scores;
  pooled.insert(pooled.end(), result.in_sample_scores.begin(),
                result.in_sample_scores.end());
  write_text_file(out_dir + "/scores.csv", scores_csv(pooled));
  files.push_back("scores.csv");

  if (result.folds.size() >= 2) {
    std::vector<PosteriorSamples> fold_samples;
    fold_samples.reserve(result.folds.size());
    for (const auto& f : result.folds) fold_samples.push_back(f.samples);
    std::ostringstream ss;
    ss << "block,covariate,min,q1,median,q3,max\n";
    const auto& names = result.full_fit.covariate_names;
    for (const Block b : kBlocks) {
      for (std::size_t j = 0; j < names.size(); ++j) {
        const StabilitySummary st = stability_stats(fold_samples, j, b);
        ss << block_name(b) << ',' << names[j] << ',' << format_double(st.min)
           << ',' << format_double(st.q1) << ',' << format_double(st.median)
           << ',' << format_double(st.q3) << ',' << format_double(st.max)
           << '\n';
      }
    }
    write_text_file(out_dir + "/stability.csv", ss.str());
    files.push_back("stability.csv");
  }

  for (const auto& fold : result.folds) {
    const std::string fdir = out_dir + "/folds/" + fold.held_out_id;
    ensure_directory(fdir);
    std::vector<LabeledReturnLevel> rows;
    for (const auto& s : fold.predictions) {
      rows.push_back({fold.held_out_id, s});
    }
    write_return_levels_csv(rows, fdir + "/return_levels.csv");
    write_text_file(fdir + "/pit.csv", pit_csv(fold.pits));
    write_text_file(fdir + "/scores.csv", scores_csv(fold.scores));
  }

  write_manifest(out_dir, "cv", files);
}

void write_validation_artifacts(const PosteriorSamples& samples,
                                const Dataset& data, const RunConfig& cfg,
                                const std::string& out_dir) {
  ensure_directory(out_dir);
  const auto pits = in_sample_pits(samples, data);
  write_text_file(out_dir + "/pit.csv", pit_csv(pits));

  std::vector<double> pvals;
  pvals.reserve(pits.size());
  for (const auto& p : pits) pvals.push_back(p.pit);
  const PpData pp = pp_plot_data(pvals);
  write_text_file(out_dir + "/pp.csv", pp_csv(pp));

  const Json ks{{"schema", "ffa.pit_stats"},
                {"schema_version", 1},
                {"n", pvals.size()},
                {"ks_statistic", ks_statistic_uniform(pvals)},
                {"max_gap", pp.max_gap}};
  write_text_file(out_dir + "/ks.json", ks.dump(2) + "\n");

  // In-sample predictive quantile scores at the configured return periods.
  std::vector<ScoreReport> reports;
  std::vector<double> probs;
  for (const double T : cfg.return_periods) {
    probs.push_back(gev::prob_of_return_period(T));
  }
  std::vector<std::vector<double>> qs(cfg.return_periods.size());
  std::vector<std::vector<double>> ys(cfg.return_periods.size());
  std::vector<std::vector<std::size_t>> st_of(cfg.return_periods.size());
  for (std::size_t s = 0; s < data.n_stations(); ++s) {
    const std::size_t idx = samples.station_index(data.station(s).id);
    const auto rls = return_levels_station(samples, idx, probs, cfg.predict);
    for (std::size_t k = 0; k < rls.size(); ++k) {
      for (const double y : data.station(s).annual_maxima) {
        qs[k].push_back(rls[k].predictive_quantile);
        ys[k].push_back(y);
        st_of[k].push_back(s);
      }
    }
  }
  for (std::size_t k = 0; k < cfg.return_periods.size(); ++k) {
    reports.push_back(mean_quantile_score(
        samples.model_type + ".in_sample", qs[k], ys[k], st_of[k],
        cfg.return_periods[k], cfg.score));
  }
  write_text_file(out_dir + "/scores.csv", scores_csv(reports));

  write_manifest(out_dir, "validate",
                 {"pit.csv", "pp.csv", "ks.json", "scores.csv"});
}

}  // namespace ffa
