// Acceptance suite. Each criterion runs standalone (invoke with its number),
// prints one PASS/FAIL line, and exits 0 on pass, 1 on fail, 77 when a
// criterion's external precondition is not met (reported as skipped).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "ffa/gev.hpp"
#include "ffa/io.hpp"
#include "ffa/local.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/prediction.hpp"
#include "ffa/stepwise.hpp"
#include "ffa/validation.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using ffa::Block;
using ffa::ChainConfig;
using ffa::Dataset;
using ffa::HierState;
using ffa::PosteriorSamples;
using ffa::Priors;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Check {
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    std::cout << "  " << (cond ? "ok   " : "FAIL ") << what << "\n";
    ok = ok && cond;
  }
};

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- criterion 1: distribution correctness --------------------------------

int criterion_1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  double worst_mass = 0.0;
  for (const double xi : {-0.4, -0.1, 0.0, 0.1, 0.4}) {
    for (const double kappa : {0.5, 1.0, 5.0}) {
      for (const double mu : {0.0, 100.0}) {
        const double mass = oracle::gev_density_mass(mu, kappa, xi);
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      }
    }
  }
  c.expect(worst_mass < 1e-6, "density normalization within 1e-6 (worst " +
                                  std::to_string(worst_mass) + ")");

  double worst_rt = 0.0;
  const double probs[] = {1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9,
                          0.99, 0.999, 1.0 - 1e-4};
  for (const double xi : {-0.4, -0.1, 0.0, 0.1, 0.4}) {
    for (const double kappa : {0.5, 1.0, 5.0}) {
      for (const double mu : {0.0, 100.0}) {
        for (const double p : probs) {
          const ffa::gev::GevParams gp{mu, kappa, xi};
          const double err =
              std::abs(ffa::gev::cdf(ffa::gev::quantile(p, gp), gp) - p);
          worst_rt = std::max(worst_rt, err);
        }
      }
    }
  }
  c.expect(worst_rt < 1e-10, "quantile/cdf roundtrip within 1e-10 (worst " +
                                 std::to_string(worst_rt) + ")");

  double worst_bridge = 0.0;
  for (const double p : {0.5, 0.9, 0.99}) {
    const double g = ffa::gev::quantile(p, {0.0, 1.0, 0.0});
    for (const double xi : {1e-9, -1e-9, 2e-8, -2e-8}) {
      const double z = ffa::gev::quantile(p, {0.0, 1.0, xi});
      worst_bridge = std::max(worst_bridge, std::abs(z - g) / std::abs(g));
    }
  }
  c.expect(worst_bridge < 1e-5, "xi->0 bridge within 1e-5 relative (worst " +
                                    std::to_string(worst_bridge) + ")");

  const double secs = elapsed_s(t0);
  c.expect(secs < 10.0, "runtime under 10 s (" + std::to_string(secs) + ")");
  return c.ok ? 0 : 1;
}

// ---- criterion 2: kappa-block derivative verification -------------------------

int criterion_2() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  // The 1e-6 relative tolerance outruns double-precision differencing, so
  // the oracle differentiates an extended-precision evaluation instead.
  ffa::Rng rng(20240209);
  int checked = 0;
  double worst = 0.0;
  while (checked < 200) {
    const double mu = rng.normal(0.0, 10.0);
    const double xi = checked % 2 == 0 ? rng.uniform(-0.45, 0.45) : 0.0;
    const double eta_hat = rng.uniform(-2.0, 1.0);
    const double tau = rng.uniform(-0.6, 0.6);
    const double kappa = std::exp(eta_hat + tau);
    const double y = mu + rng.uniform(-0.8, 3.0) / kappa;
    if (xi != 0.0 && 1.0 + xi * kappa * (y - mu) <= 0.3) continue;

    const auto target = [&](long double t) {
      return oracle::gev_log_density_ld(
          static_cast<long double>(y), static_cast<long double>(mu),
          std::exp(static_cast<long double>(eta_hat) + t),
          static_cast<long double>(xi));
    };
    const auto d = ffa::dloglik_dtau_kappa(y, mu, xi, eta_hat, tau);
    const double fd1 = static_cast<double>(
        oracle::fd_first_ld(target, static_cast<long double>(tau), 1e-4L));
    const double fd2 = static_cast<double>(
        oracle::fd_second_ld(target, static_cast<long double>(tau), 1e-4L));
    worst = std::max(worst,
                     std::abs(d.first - fd1) / std::max(std::abs(fd1), 1e-8));
    worst = std::max(worst,
                     std::abs(d.second - fd2) / std::max(std::abs(fd2), 1e-8));
    ++checked;
  }
  c.expect(worst < 1e-6,
           "finite-difference match at 200 in-support points, both branches "
           "(worst relative " +
               std::to_string(worst) + ")");

  const auto spot = ffa::dloglik_dtau_kappa(10.0, 10.0, 0.2, -1.0, 0.3);
  c.expect(spot.first == 1.0, "spot value at h=1: first derivative == 1");

  const double expected_second = -(0.2 + 1.0) / 0.2;  // -6
  const bool spot2 = spot.second == expected_second;
  c.expect(spot2,
           "spot value at h=1: second derivative == -(xi+1)/xi (= -6)");
  if (!spot2) {
    std::cout
        << "  note: at h = 1 the likelihood is linear in tau (eps = 0 makes "
           "h constant),\n"
           "  so its true curvature is exactly 0, which both the analytic "
           "form and the\n"
           "  finite-difference oracle above return; the -(xi+1)/xi "
           "expectation drops the\n"
           "  d h/d tau = h - 1 factor from the log-h term and contradicts "
           "the other checks\n"
           "  in this criterion. The implementation keeps the "
           "finite-difference-verified value.\n";
  }

  const double secs = elapsed_s(t0);
  c.expect(secs < 5.0, "runtime under 5 s (" + std::to_string(secs) + ")");
  return c.ok ? 0 : 1;
}

// ---- criterion 3: sampler correctness at toy scale ---------------------------

int criterion_3() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  // One station, one free parameter: tau_kappa with everything else pinned.
  ffa::Rng data_rng(360);
  const double true_mu = 30.0, true_kappa = 0.25, true_xi = 0.12;
  std::vector<double> ys;
  for (int t = 0; t < 50; ++t) {
    ys.push_back(ffa::gev::quantile(data_rng.uniform(),
                                    {true_mu, true_kappa, true_xi}));
  }
  const double eta_hat = std::log(0.4);
  const double alpha = 2.0;

  const auto target = [&](double tau) {
    double f = -0.5 * alpha * tau * tau;
    const double kappa = std::exp(eta_hat + tau);
    for (const double y : ys) {
      const double l = oracle::gev_log_density(y, true_mu, kappa, true_xi);
      if (l == -kInf) return -kInf;
      f += l;
    }
    return f;
  };

  // Reference: 1e6-step random-walk chain on an independently written target.
  std::vector<double> ref;
  ref.reserve(1000000);
  {
    ffa::Rng rng(361);
    double tau = 0.0;
    double f = target(tau);
    for (int i = 0; i < 1000000; ++i) {
      const double prop = tau + 0.2 * rng.normal();
      const double fp = target(prop);
      if (std::log(rng.uniform()) < fp - f) {
        tau = prop;
        f = fp;
      }
      ref.push_back(tau);
    }
  }

  // Under test: the Gaussian-approximation chain.
  std::vector<double> ours;
  ours.reserve(200000);
  {
    ffa::Station st;
    st.id = "toy";
    st.annual_maxima = ys;
    st.covariates = {1.0};
    ffa::Standardization stdz;
    stdz.mean = {0.0};
    stdz.sd = {1.0};
    const Dataset d = Dataset::from_standardized({st}, {"constant"}, stdz);
    Priors priors;
    ChainConfig cfg;
    cfg.seed = 362;
    cfg.n_iterations = 10;
    cfg.n_burnin = 1;
    ffa::Sampler sampler(d, priors, cfg);
    HierState state = HierState::zeros(1, 1);
    state.block(Block::Mu).theta[0] = true_mu;
    state.block(Block::Kappa).theta[0] = eta_hat;
    state.block(Block::Xi).theta[0] = true_xi;
    state.block(Block::Kappa).alpha = alpha;
    ffa::Rng rng(363);
    for (int i = 0; i < 200000; ++i) {
      sampler.update_tau(Block::Kappa, state, rng);
      ours.push_back(state.block(Block::Kappa).tau[0]);
    }
  }

  const auto mr = oracle::chain_moments(ref);
  const auto mo = oracle::chain_moments(ours);
  const double se_mean =
      std::sqrt(mr.se_mean * mr.se_mean + mo.se_mean * mo.se_mean);
  const double dmean = std::abs(mr.mean - mo.mean);
  c.expect(dmean < 3.0 * se_mean,
           "posterior mean within 3 MC standard errors (|diff| " +
               std::to_string(dmean) + " vs 3se " +
               std::to_string(3.0 * se_mean) + ")");
  const double se_m2 = std::sqrt(mr.se_m2 * mr.se_m2 + mo.se_m2 * mo.se_m2);
  const double dvar = std::abs(mr.variance - mo.variance);
  c.expect(dvar < 3.0 * se_m2,
           "posterior variance within 3 MC standard errors (|diff| " +
               std::to_string(dvar) + " vs 3se " + std::to_string(3.0 * se_m2) +
               ")");

  const double secs = elapsed_s(t0);
  c.expect(secs < 120.0, "runtime under 2 min (" + std::to_string(secs) + ")");
  return c.ok ? 0 : 1;
}

// ---- criterion 4: synthetic recovery -----------------------------------------

ffa::SimulationSpec recovery_spec() {
  ffa::SimulationSpec spec;
  spec.n_stations = 50;
  spec.n_years_min = 60;
  spec.n_years_max = 60;
  // 13 covariates; 5 carry nonzero standardized coefficients
  // (three in the mu block, two in the kappa block).
  spec.theta_mu = {5.0, 1.2, -1.0, 0.8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  spec.theta_kappa = {0.0, 0, 0, 0, 0.6, -0.5, 0, 0, 0, 0, 0, 0, 0, 0};
  spec.theta_xi = {0.08, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  spec.alpha_mu = 25.0;
  spec.alpha_kappa = 100.0;
  spec.alpha_xi = 2500.0;
  spec.seed = 424242;
  return spec;
}

std::string cache_path(const std::string& name) {
  fs::create_directories(FFA_ACCEPTANCE_CACHE);
  return std::string(FFA_ACCEPTANCE_CACHE) + "/" + name;
}

PosteriorSamples recovery_fit(bool* from_cache = nullptr) {
  const std::string path = cache_path("recovery_fit.bin");
  if (fs::exists(path)) {
    if (from_cache) *from_cache = true;
    return ffa::load_samples(path);
  }
  if (from_cache) *from_cache = false;
  const auto sim = ffa::simulate_dataset(recovery_spec());
  ChainConfig cfg;
  cfg.n_iterations = 30000;
  cfg.n_burnin = 5000;
  cfg.thin = 5;
  cfg.seed = 52025;
  return ffa::run_chain(sim.data, Priors{}, cfg, path);
}

int criterion_4() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  const auto spec = recovery_spec();
  fs::remove(cache_path("recovery_fit.bin"));
  const auto samples = recovery_fit();
  const double R = static_cast<double>(samples.draws.size());
  std::cout << "  fit: " << samples.draws.size() << " retained draws in "
            << elapsed_s(t0) << " s\n";

  // (a) every truly-nonzero coefficient has posterior inclusion > 0.8.
  struct Active {
    Block b;
    std::size_t j;
    double truth;
  };
  const std::vector<Active> active{{Block::Mu, 1, 1.2},
                                   {Block::Mu, 2, -1.0},
                                   {Block::Mu, 3, 0.8},
                                   {Block::Kappa, 4, 0.6},
                                   {Block::Kappa, 5, -0.5}};
  std::size_t detected = 0;
  for (const auto& a : active) {
    double incl = 0.0;
    for (const auto& d : samples.draws) {
      incl += d.block(a.b).inclusion[a.j] ? 1.0 : 0.0;
    }
    incl /= R;
    std::cout << "  inclusion " << ffa::block_name(a.b) << "[" << a.j
              << "] = " << incl << "\n";
    if (incl > 0.8) ++detected;
  }
  c.expect(detected >= static_cast<std::size_t>(
                           std::ceil(0.9 * static_cast<double>(active.size()))),
           "(a) >= 90% of truly-nonzero coefficients have inclusion > 0.8 (" +
               std::to_string(detected) + "/5)");

  // (b) zero-effect covariates have median inclusion < 0.5.
  std::vector<double> null_inclusions;
  for (const Block b : ffa::kBlocks) {
    for (std::size_t j = 1; j < spec.dim(); ++j) {
      const bool is_active = [&] {
        for (const auto& a : active) {
          if (a.b == b && a.j == j) return true;
        }
        return false;
      }();
      if (is_active) continue;
      double incl = 0.0;
      for (const auto& d : samples.draws) {
        incl += d.block(b).inclusion[j] ? 1.0 : 0.0;
      }
      null_inclusions.push_back(incl / R);
    }
  }
  std::sort(null_inclusions.begin(), null_inclusions.end());
  const double median_null =
      null_inclusions[null_inclusions.size() / 2];
  c.expect(median_null < 0.5,
           "(b) zero-effect covariates have median inclusion < 0.5 (" +
               std::to_string(median_null) + ")");

  // (c) 90% credible intervals cover >= 10 of the 13 true theta_mu values.
  std::size_t covered = 0;
  for (std::size_t j = 1; j < spec.dim(); ++j) {
    std::vector<double> v;
    v.reserve(samples.draws.size());
    for (const auto& d : samples.draws) {
      v.push_back(d.block(Block::Mu).theta[j]);
    }
    std::sort(v.begin(), v.end());
    const double lo = ffa::empirical_quantile(v, 0.05);
    const double hi = ffa::empirical_quantile(v, 0.95);
    const double truth = spec.theta_mu[j];
    if (lo <= truth && truth <= hi) ++covered;
  }
  c.expect(covered >= 10, "(c) 90% intervals cover >= 10/13 true theta_mu (" +
                              std::to_string(covered) + "/13)");

  const double secs = elapsed_s(t0);
  c.expect(secs < 1800.0,
           "runtime under 30 min (" + std::to_string(secs) + " s)");
  return c.ok ? 0 : 1;
}

// ---- criterion 5: calibration self-consistency -----------------------------

int criterion_5() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  ffa::SimulationSpec spec;
  spec.n_stations = 25;
  spec.n_years_min = 200;
  spec.n_years_max = 200;  // 5000 station-years
  spec.theta_mu = {5.0, 1.0, 0, 0, 0};
  spec.theta_kappa = {0.0, 0, 0.5, 0, 0};
  spec.theta_xi = {0.05, 0, 0, 0, 0};
  spec.alpha_mu = 25.0;
  spec.alpha_kappa = 100.0;
  spec.alpha_xi = 2500.0;
  spec.seed = 515151;
  const auto sim = ffa::simulate_dataset(spec);

  ChainConfig cfg;
  cfg.n_iterations = 8000;
  cfg.n_burnin = 2000;
  cfg.thin = 5;
  cfg.seed = 525252;
  const auto samples = ffa::run_chain(sim.data, Priors{}, cfg);
  std::cout << "  fit: " << samples.draws.size() << " retained draws in "
            << elapsed_s(t0) << " s\n";

  const auto pits = ffa::in_sample_pits(samples, sim.data);
  std::vector<double> p;
  p.reserve(pits.size());
  for (const auto& r : pits) p.push_back(r.pit);
  c.expect(p.size() >= 5000, "n >= 5000 station-years (" +
                                 std::to_string(p.size()) + ")");

  const double d = ffa::ks_statistic_uniform(p);
  // Level-0.01 KS critical value with the Stephens small-sample correction.
  const double n = static_cast<double>(p.size());
  const double crit =
      1.62762 / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  c.expect(d < crit, "PIT KS uniformity at level 0.01 (D = " +
                         std::to_string(d) + ", critical " +
                         std::to_string(crit) + ")");

  std::cout << "  runtime " << elapsed_s(t0) << " s\n";
  return c.ok ? 0 : 1;
}

// ---- criterion 6: score properness and ordering ------------------------------

int criterion_6() {
  Check c;

  // Fresh holdout from the criterion-4 generator (new seed, same law).
  auto spec = recovery_spec();
  spec.seed = 616161;
  const auto holdout = ffa::simulate_dataset(spec);

  // Intercept reduction of the generator: fixed-effect intercepts only.
  const ffa::gev::GevParams intercept_params{
      spec.theta_mu[0], std::exp(spec.theta_kappa[0]), spec.theta_xi[0]};

  for (const double T : {10.0, 50.0, 100.0}) {
    const double tau = ffa::gev::prob_of_return_period(T);
    std::vector<double> q_true, q_flat, ys;
    std::vector<std::size_t> st_of;
    for (std::size_t s = 0; s < holdout.data.n_stations(); ++s) {
      const auto p = ffa::site_params(holdout.truth, holdout.data, s);
      const double qt = ffa::gev::quantile(tau, p);
      const double qf = ffa::gev::quantile(tau, intercept_params);
      for (const double y : holdout.data.station(s).annual_maxima) {
        q_true.push_back(qt);
        q_flat.push_back(qf);
        ys.push_back(y);
        st_of.push_back(s);
      }
    }
    ffa::ScoreOptions opts;
    opts.n_bootstrap = 1000;
    opts.seed = 626262;
    const auto rep_true =
        ffa::mean_quantile_score("generator", q_true, ys, st_of, T, opts);
    const auto rep_flat =
        ffa::mean_quantile_score("intercept_only", q_flat, ys, st_of, T, opts);
    const double gap = rep_flat.mean_score - rep_true.mean_score;
    const double width = std::max(rep_true.ci_hi - rep_true.ci_lo,
                                  rep_flat.ci_hi - rep_flat.ci_lo);
    std::cout << "  T=" << T << ": generator " << rep_true.mean_score
              << " [" << rep_true.ci_lo << ", " << rep_true.ci_hi
              << "], intercept-only " << rep_flat.mean_score << " ["
              << rep_flat.ci_lo << ", " << rep_flat.ci_hi << "]\n";
    c.expect(rep_true.mean_score <= rep_flat.mean_score,
             "T=" + std::to_string(static_cast<int>(T)) +
                 ": generator score <= intercept-only score");
    c.expect(gap > width,
             "T=" + std::to_string(static_cast<int>(T)) +
                 ": gap exceeds the bootstrap 90% interval width (" +
                 std::to_string(gap) + " > " + std::to_string(width) + ")");
  }
  return c.ok ? 0 : 1;
}

// ---- criterion 7: out-of-sample widening -------------------------------------

int criterion_7() {
  Check c;
  bool from_cache = false;
  const auto samples = recovery_fit(&from_cache);
  std::cout << "  recovery fit " << (from_cache ? "reused from cache"
                                                : "recomputed")
            << " (" << samples.draws.size() << " draws)\n";

  ffa::PredictOptions opts;
  opts.credible_level = 0.8;
  opts.sims_per_component = 10;
  const double prob = ffa::gev::prob_of_return_period(100.0);

  std::size_t wider = 0;
  const std::size_t S = samples.n_stations();
  for (std::size_t s = 0; s < S; ++s) {
    opts.seed = 700 + s;
    const auto in_sample = ffa::return_level_posterior(samples, s, prob, opts);
    const auto out =
        ffa::predict_new_site(samples, samples.station_covariates[s], prob,
                              opts);
    const double w_in = in_sample.credible_hi - in_sample.credible_lo;
    const double w_out = out.credible_hi - out.credible_lo;
    if (w_out >= w_in) ++wider;
  }
  const double frac = static_cast<double>(wider) / static_cast<double>(S);
  c.expect(frac >= 0.9,
           "new-site 80% interval at least as wide as in-sample for >= 90% "
           "of stations (" +
               std::to_string(wider) + "/" + std::to_string(S) + ")");
  return c.ok ? 0 : 1;
}

// ---- criterion 8: determinism ------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FFA_CLI_PATH) + " " + args;
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  const std::string sa((std::istreambuf_iterator<char>(fa)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(fb)),
                       std::istreambuf_iterator<char>());
  return sa == sb;
}

int criterion_8() {
  Check c;
  const fs::path root = cache_path("determinism");
  fs::remove_all(root);
  fs::create_directories(root);

  const std::string cfg_path = (root / "config.json").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
      "seed": 888,
      "simulate": {
        "n_stations": 10, "n_years_min": 35, "n_years_max": 45,
        "theta_mu": [5.0, 1.0, 0.0], "theta_kappa": [0.0, 0.0, 0.4],
        "theta_xi": [0.05, 0.0, 0.0],
        "alpha_mu": 25.0, "alpha_kappa": 150.0, "alpha_xi": 5000.0
      },
      "chain": {"iterations": 800, "burnin": 200},
      "prediction": {"sims_per_component": 20},
      "score": {"n_bootstrap": 100},
      "return_periods": [10, 100]
    })";
  }

  const std::string data_dir = (root / "data").string();
  if (run_cli("simulate --config " + cfg_path + " --output " + data_dir +
              " >/dev/null") != 0) {
    std::cout << "  FAIL simulate step\n";
    return 1;
  }
  const std::string data_flags = " --maxima " + data_dir +
                                 "/maxima.csv --covariates " + data_dir +
                                 "/covariates.csv";

  // Identical command lines, run from two different working directories, so
  // every artifact (including the config echoes) must agree byte for byte.
  for (const char* run : {"run1", "run2"}) {
    const fs::path cwd = root / run;
    fs::create_directories(cwd);
    const std::string prefix = "cd " + cwd.string() + " && ";
    if (std::system((prefix + FFA_CLI_PATH + " fit --config " + cfg_path +
                     data_flags + " --output out >/dev/null")
                        .c_str()) != 0) {
      std::cout << "  FAIL fit step (" << run << ")\n";
      return 1;
    }
    if (std::system((prefix + FFA_CLI_PATH + " validate --config " + cfg_path +
                     data_flags +
                     " --fit out/checkpoint.bin --output out/validate "
                     ">/dev/null")
                        .c_str()) != 0) {
      std::cout << "  FAIL validate step (" << run << ")\n";
      return 1;
    }
    if (std::system((prefix + FFA_CLI_PATH +
                     " predict --fit out/checkpoint.bin --station S001 "
                     "--return-periods 10,100 > out/predict.txt")
                        .c_str()) != 0) {
      std::cout << "  FAIL predict step (" << run << ")\n";
      return 1;
    }
  }

  // Every produced file must match byte for byte.
  std::size_t compared = 0;
  bool all_same = true;
  for (const auto& entry :
       fs::recursive_directory_iterator(root / "run1" / "out")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "run1" / "out");
    const fs::path other = root / "run2" / "out" / rel;
    const bool same = same_bytes(entry.path(), other);
    if (!same) std::cout << "  differs: " << rel << "\n";
    all_same = all_same && same;
    ++compared;
  }
  c.expect(compared >= 10, "artifact set is nontrivial (" +
                               std::to_string(compared) + " files)");
  c.expect(all_same, "identical config + seed give byte-identical artifacts");
  fs::remove_all(root);
  return c.ok ? 0 : 1;
}

// ---- criterion 9: conditional, needs the external station dataset ------------

int criterion_9() {
  const char* maxima = std::getenv("FFA_SUPPLEMENTARY_MAXIMA");
  const char* covariates = std::getenv("FFA_SUPPLEMENTARY_COVARIATES");
  if (maxima == nullptr || covariates == nullptr) {
    std::cout << "criterion 9: SKIP (set FFA_SUPPLEMENTARY_MAXIMA and "
                 "FFA_SUPPLEMENTARY_COVARIATES to run the external-data "
                 "comparison)\n";
    return 77;
  }
  Check c;
  const auto loaded = ffa::load_dataset(maxima, covariates, 20);
  for (const auto& w : loaded.warnings) std::cout << "  note: " << w << "\n";
  const Dataset& data = loaded.data;

  std::size_t n_folds = 27;
  if (const char* env = std::getenv("FFA_ACCEPT9_FOLDS")) {
    n_folds = std::strtoull(env, nullptr, 10);
  }
  n_folds = std::min(n_folds, data.n_stations() - 1);
  std::size_t iters = 20000;
  if (const char* env = std::getenv("FFA_ACCEPT9_ITERS")) {
    iters = std::strtoull(env, nullptr, 10);
  }

  // Seeded random fold choice (the published expert list is not part of the
  // artifact inputs).
  std::vector<std::size_t> idx(data.n_stations());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  ffa::Rng rng(ffa::derive_seed(999, "accept9.folds"));
  for (std::size_t i = 0; i < n_folds; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(
                                  rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n_folds);
  std::sort(idx.begin(), idx.end());
  std::vector<std::string> folds;
  for (const std::size_t i : idx) folds.push_back(data.station(i).id);

  ChainConfig chain;
  chain.n_iterations = iters;
  chain.n_burnin = iters / 5;
  chain.thin = std::max<std::size_t>(1, iters / 5000);
  chain.seed = 991;

  ffa::LooOptions opts;
  opts.return_periods = {10.0, 50.0, 100.0};
  opts.seed = 992;
  const auto regional = ffa::loo_cross_validate(data, folds, Priors{}, chain,
                                                opts);

  // Intercept-only regional baseline on the same folds.
  const Dataset flat = data.select_covariates({0});
  ChainConfig flat_chain = chain;
  flat_chain.seed = 993;
  const auto baseline =
      ffa::loo_cross_validate(flat, folds, Priors{}, flat_chain, opts);

  // Local model at each fold station, scored on that station's record.
  std::vector<std::vector<double>> q_local(3), y_local(3);
  std::vector<std::vector<std::size_t>> st_local(3);
  ChainConfig local_chain = chain;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& st = data.station(data.index_of(folds[f]));
    local_chain.seed = ffa::derive_seed(994, "accept9.local", f);
    const auto fit = ffa::fit_local(st, local_chain);
    ffa::PredictOptions popts;
    popts.seed = ffa::derive_seed(995, "accept9.local.predict", f);
    for (std::size_t k = 0; k < 3; ++k) {
      const double tau =
          ffa::gev::prob_of_return_period(opts.return_periods[k]);
      const auto rl = ffa::return_level_posterior(fit, 0, tau, popts);
      for (const double y : st.annual_maxima) {
        q_local[k].push_back(rl.predictive_quantile);
        y_local[k].push_back(y);
        st_local[k].push_back(f);
      }
    }
  }

  for (std::size_t k = 0; k < 3; ++k) {
    const double T = opts.return_periods[k];
    ffa::ScoreOptions sopts;
    sopts.seed = 996;
    const auto local_rep = ffa::mean_quantile_score(
        "local", q_local[k], y_local[k], st_local[k], T, sopts);
    const double reg = regional.out_of_sample_scores[k].mean_score;
    const double flat_s = baseline.out_of_sample_scores[k].mean_score;
    std::cout << "  T=" << T << ": local " << local_rep.mean_score
              << ", regional " << reg << ", intercept-only " << flat_s << "\n";
    c.expect(reg < flat_s, "T=" + std::to_string(static_cast<int>(T)) +
                               ": regional beats the intercept-only baseline");
    c.expect(local_rep.mean_score < reg,
             "T=" + std::to_string(static_cast<int>(T)) +
                 ": local model beats the regional model out of sample");
  }
  return c.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ffa_acceptance <criterion 1..9>\n";
    return 2;
  }
  const int n = std::atoi(argv[1]);
  int rc = 2;
  try {
    switch (n) {
      case 1: rc = criterion_1(); break;
      case 2: rc = criterion_2(); break;
      case 3: rc = criterion_3(); break;
      case 4: rc = criterion_4(); break;
      case 5: rc = criterion_5(); break;
      case 6: rc = criterion_6(); break;
      case 7: rc = criterion_7(); break;
      case 8: rc = criterion_8(); break;
      case 9: rc = criterion_9(); break;
      default:
        std::cerr << "unknown criterion " << n << "\n";
        return 2;
    }
  } catch (const std::exception& e) {
    std::cout << "criterion " << n << ": FAIL (exception: " << e.what()
              << ")\n";
    return 1;
  }
  if (rc == 77) return 77;
  std::cout << "criterion " << n << ": " << (rc == 0 ? "PASS" : "FAIL")
            << "\n";
  return rc;
}
