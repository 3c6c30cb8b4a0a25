#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ffa/data.hpp"
#include "ffa/error.hpp"
#include "ffa/model.hpp"
#include "ffa/rng.hpp"
#include "oracles.hpp"

using ffa::Block;
using ffa::Dataset;
using ffa::HierState;
using ffa::Priors;
using ffa::Station;

namespace {

Station make_station(std::string id, std::vector<double> maxima,
                     std::vector<double> raw_covs) {
  Station st;
  st.id = std::move(id);
  st.annual_maxima = std::move(maxima);
  st.raw_covariates.push_back(1.0);
  st.raw_covariates.insert(st.raw_covariates.end(), raw_covs.begin(),
                           raw_covs.end());
  return st;
}

Dataset toy_dataset() {
  std::vector<Station> st;
  st.push_back(make_station("A", {10.0, 12.0, 9.0}, {3.0, -1.0}));
  st.push_back(make_station("B", {20.0, 25.0, 22.0, 21.0}, {5.0, 0.5}));
  st.push_back(make_station("C", {15.0, 14.0}, {4.0, 2.0}));
  return Dataset::from_raw(std::move(st), {"constant", "area", "rain"});
}

}  // namespace

TEST_CASE("dataset standardization and invariants") {
  const Dataset d = toy_dataset();
  CHECK(d.n_stations() == 3);
  CHECK(d.n_covariates() == 3);
  CHECK(d.total_observations() == 9);

  // Column 0 is the untouched constant.
  for (const auto& st : d.stations()) CHECK(st.covariates[0] == 1.0);

  // Non-constant columns are z-scores: mean 0, sample sd 1.
  for (std::size_t j = 1; j < d.n_covariates(); ++j) {
    double mean = 0.0, ss = 0.0;
    for (const auto& st : d.stations()) mean += st.covariates[j];
    mean /= 3.0;
    for (const auto& st : d.stations()) {
      ss += (st.covariates[j] - mean) * (st.covariates[j] - mean);
    }
    CHECK(std::abs(mean) < 1e-14);
    CHECK(std::sqrt(ss / 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Standardizing an already-standardized vector is the identity: the
  // subset with identical stats reproduces the same values.
  const auto z = d.standardization().apply(d.station(1).raw_covariates);
  for (std::size_t j = 0; j < z.size(); ++j) {
    CHECK(z[j] == doctest::Approx(d.station(1).covariates[j]).epsilon(1e-12));
  }

  CHECK(d.index_of("B") == 1);
  CHECK_THROWS_AS(d.index_of("nope"), ffa::DataError);
}

TEST_CASE("dataset rejects malformed inputs") {
  // Constant covariate column.
  std::vector<Station> st;
  st.push_back(make_station("A", {1.0}, {2.0}));
  st.push_back(make_station("B", {1.0}, {2.0}));
  CHECK_THROWS_AS(Dataset::from_raw(st, {"constant", "flat"}),
                  ffa::DataError);

  // Leading covariate not 1.
  Station bad = make_station("C", {1.0}, {2.0});
  bad.raw_covariates[0] = 3.0;
  CHECK_THROWS_AS(Dataset::from_raw({bad}, {"constant", "x"}),
                  ffa::DataError);

  // Non-finite maxima.
  Station nan_station = make_station("D", {std::nan("")}, {2.0});
  Station other = make_station("E", {1.0}, {3.0});
  CHECK_THROWS_AS(Dataset::from_raw({nan_station, other}, {"constant", "x"}),
                  ffa::DataError);
}

TEST_CASE("dataset subset re-standardizes from raw covariates") {
  const Dataset d = toy_dataset();
  const Dataset sub = d.without({"C"});
  CHECK(sub.n_stations() == 2);
  CHECK_FALSE(sub.has_station("C"));
  // Re-standardized: mean of the remaining raw values maps to 0.
  const double mean_area = (3.0 + 5.0) / 2.0;
  const double sd_area = std::sqrt((std::pow(3.0 - mean_area, 2) +
                                    std::pow(5.0 - mean_area, 2)) /
                                   1.0);
  CHECK(sub.station(0).covariates[1] ==
        doctest::Approx((3.0 - mean_area) / sd_area).epsilon(1e-12));
  CHECK_THROWS_AS(d.without({"nope"}), ffa::DataError);
}

TEST_CASE("site_params composes the three links") {
  const Dataset d = toy_dataset();
  HierState s = HierState::zeros(3, 3);
  s.block(Block::Mu).theta[0] = 4.0;
  s.block(Block::Kappa).theta[0] = -1.0;
  s.block(Block::Xi).theta[0] = 0.07;

  // Intercept-only: every site gets (a, exp(b), c).
  for (std::size_t i = 0; i < 3; ++i) {
    const auto p = ffa::site_params(s, d, i);
    CHECK(p.mu == doctest::Approx(4.0));
    CHECK(p.kappa == doctest::Approx(std::exp(-1.0)));
    CHECK(p.xi == doctest::Approx(0.07));
  }

  // A kappa random effect multiplies kappa by exp(t).
  s.block(Block::Kappa).tau[1] = 0.3;
  CHECK(ffa::site_params(s, d, 1).kappa ==
        doctest::Approx(std::exp(-1.0) * std::exp(0.3)).epsilon(1e-14));

  // Random coefficients match a hand-rolled dot product.
  s.block(Block::Mu).inclusion = {1, 1, 1};
  s.block(Block::Mu).theta = {4.0, 1.5, -2.0};
  s.block(Block::Mu).tau = {0.1, -0.2, 0.05};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& x = d.station(i).covariates;
    const double expected =
        4.0 * x[0] + 1.5 * x[1] - 2.0 * x[2] + s.block(Block::Mu).tau[i];
    CHECK(ffa::site_params(s, d, i).mu ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("station log likelihood") {
  // One observation exactly at mu: log kappa - 1 for xi != 0.
  std::vector<Station> st;
  st.push_back(make_station("A", {7.0}, {1.0}));
  st.push_back(make_station("B", {9.0}, {2.0}));
  const Dataset d = Dataset::from_raw(std::move(st), {"constant", "x"});
  HierState s = HierState::zeros(2, 2);
  s.block(Block::Mu).theta[0] = 7.0;
  s.block(Block::Kappa).theta[0] = std::log(2.5);
  s.block(Block::Xi).theta[0] = 0.3;
  CHECK(ffa::station_log_likelihood(s, d, 0) ==
        doctest::Approx(std::log(2.5) - 1.0).epsilon(1e-12));

  // Support violation: Frechet lower bound above an observation.
  s.block(Block::Mu).theta[0] = 20.0;
  s.block(Block::Kappa).theta[0] = std::log(1.0);
  s.block(Block::Xi).theta[0] = 0.5;  // support y > 18
  CHECK(ffa::station_log_likelihood(s, d, 0) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("station log likelihood matches per-point oracle") {
  std::vector<Station> st;
  st.push_back(make_station("A", {10.0, 13.5, 9.2, 11.0, 15.3}, {1.0}));
  st.push_back(make_station("B", {8.0, 9.0}, {-1.0}));
  const Dataset d = Dataset::from_raw(std::move(st), {"constant", "x"});
  HierState s = HierState::zeros(2, 2);
  s.block(Block::Mu).theta = {9.0, 1.2};
  s.block(Block::Mu).inclusion = {1, 1};
  s.block(Block::Kappa).theta[0] = std::log(0.4);
  s.block(Block::Xi).theta[0] = 0.15;
  s.block(Block::Mu).tau = {0.4, -0.3};

  const auto p = ffa::site_params(s, d, 0);
  double expected = 0.0;
  for (const double y : d.station(0).annual_maxima) {
    expected += oracle::gev_log_density(y, p.mu, p.kappa, p.xi);
  }
  CHECK(ffa::station_log_likelihood(s, d, 0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log posterior assembles likelihood and priors") {
  std::vector<Station> st;
  st.push_back(make_station("A", {10.0, 12.0, 11.0}, {0.4}));
  st.push_back(make_station("B", {9.0, 8.5}, {-0.6}));
  const Dataset d = Dataset::from_raw(std::move(st), {"constant", "x"});

  HierState s = HierState::zeros(2, 2);
  s.block(Block::Mu).theta = {10.0, 0.8};
  s.block(Block::Mu).inclusion = {1, 1};
  s.block(Block::Mu).tau = {0.2, -0.1};
  s.block(Block::Mu).alpha = 2.0;
  s.block(Block::Kappa).theta[0] = std::log(0.7);
  s.block(Block::Kappa).alpha = 3.0;
  s.block(Block::Xi).theta[0] = 0.05;
  s.block(Block::Xi).alpha = 4.0;

  Priors priors;
  priors.theta_sd = 1.5;
  priors.alpha_shape = 0.2;
  priors.alpha_rate = 0.3;

  // Term-by-term oracle, written out independently.
  const auto log_norm = [](double x, double var) {
    return -0.5 * std::log(2.0 * std::numbers::pi * var) -
           x * x / (2.0 * var);
  };
  const auto log_gamma_pdf = [](double x, double a, double b) {
    return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) - b * x;
  };
  double expected = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto p = ffa::site_params(s, d, i);
    for (const double y : d.station(i).annual_maxima) {
      expected += oracle::gev_log_density(y, p.mu, p.kappa, p.xi);
    }
  }
  const double tv = 1.5 * 1.5;
  expected += log_norm(10.0, tv) + log_norm(0.8, tv);   // mu thetas
  expected += log_norm(std::log(0.7), tv);              // kappa intercept
  expected += log_norm(0.05, tv);                       // xi intercept
  for (const double t : {0.2, -0.1}) expected += log_norm(t, 1.0 / 2.0);
  expected += 2.0 * log_norm(0.0, 1.0 / 3.0);
  expected += 2.0 * log_norm(0.0, 1.0 / 4.0);
  expected += log_gamma_pdf(2.0, 0.2, 0.3) + log_gamma_pdf(3.0, 0.2, 0.3) +
              log_gamma_pdf(4.0, 0.2, 0.3);

  CHECK(ffa::log_posterior(s, d, priors) ==
        doctest::Approx(expected).epsilon(1e-12));

  // Doubling theta_sd changes exactly the theta prior terms.
  Priors wide = priors;
  wide.theta_sd = 3.0;
  const double delta =
      ffa::log_posterior(s, d, wide) - ffa::log_posterior(s, d, priors);
  double expected_delta = 0.0;
  for (const double th : {10.0, 0.8, std::log(0.7), 0.05}) {
    expected_delta += log_norm(th, 9.0) - log_norm(th, tv);
  }
  CHECK(delta == doctest::Approx(expected_delta).epsilon(1e-10));

  // Toggling an inclusion off (and zeroing the coefficient) removes exactly
  // that theta prior term plus the likelihood change.
  HierState excluded = s;
  excluded.block(Block::Mu).inclusion[1] = 0;
  excluded.block(Block::Mu).theta[1] = 0.0;
  const double lhs = ffa::log_posterior(excluded, d, priors) -
                     ffa::log_posterior(s, d, priors);
  const double lik_change = ffa::total_log_likelihood(excluded, d) -
                            ffa::total_log_likelihood(s, d);
  CHECK(lhs == doctest::Approx(lik_change - log_norm(0.8, tv)).epsilon(1e-10));
}

TEST_CASE("log posterior decomposes by station") {
  const Dataset d = toy_dataset();
  HierState s = HierState::zeros(3, 3);
  s.block(Block::Mu).theta[0] = 15.0;
  s.block(Block::Kappa).theta[0] = -1.5;
  s.block(Block::Xi).theta[0] = 0.1;
  const Priors priors;

  // Perturb one station's data: the log posterior changes by exactly that
  // station's likelihood change.
  std::vector<Station> st(d.stations().begin(), d.stations().end());
  st[1].annual_maxima[0] += 2.5;
  for (auto& x : st) x.covariates.clear();
  const Dataset d2 = Dataset::from_raw(std::move(st),
                                       std::vector<std::string>(
                                           d.covariate_names()));
  const double delta_lp =
      ffa::log_posterior(s, d2, priors) - ffa::log_posterior(s, d, priors);
  const double delta_ll = ffa::station_log_likelihood(s, d2, 1) -
                          ffa::station_log_likelihood(s, d, 1);
  CHECK(delta_lp == doctest::Approx(delta_ll).epsilon(1e-12));
  CHECK(ffa::station_log_likelihood(s, d2, 0) ==
        ffa::station_log_likelihood(s, d, 0));
}

TEST_CASE("hier state invariants are enforced") {
  HierState s = HierState::zeros(2, 1);
  s.block(Block::Mu).theta[1] = 0.5;  // excluded but nonzero
  CHECK_THROWS_AS(s.check(2, 1), ffa::NumericError);
  s.block(Block::Mu).theta[1] = 0.0;
  s.block(Block::Xi).alpha = -1.0;
  CHECK_THROWS_AS(s.check(2, 1), ffa::NumericError);
  s.block(Block::Xi).alpha = 1.0;
  CHECK_NOTHROW(s.check(2, 1));
  CHECK_THROWS_AS(s.check(3, 1), ffa::NumericError);

  Priors p;
  p.inclusion_prob = 0.0;
  CHECK_THROWS_AS(p.validate(), ffa::ConfigError);
  p.inclusion_prob = 1.0;  // degenerate but allowed
  CHECK_NOTHROW(p.validate());
}
