#include "ffa/stepwise.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "ffa/error.hpp"

namespace ffa {

namespace {

// RSS of the OLS fit restricted to the flagged columns.
double rss_for(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               const std::vector<std::uint8_t>& flags) {
  std::vector<int> cols;
  for (std::size_t j = 0; j < flags.size(); ++j) {
    if (flags[j]) cols.push_back(static_cast<int>(j));
  }
  Eigen::MatrixXd Xs(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) Xs.col(c) = X.col(cols[c]);
  const Eigen::VectorXd beta = Xs.colPivHouseholderQr().solve(y);
  return (y - Xs * beta).squaredNorm();
}

double aic_of(double rss, std::size_t n, std::size_t k) {
  // Guard a perfect fit; log(0) would dominate every comparison anyway.
  const double per_n = std::max(rss / static_cast<double>(n), 1e-300);
  return static_cast<double>(n) * std::log(per_n) + 2.0 * static_cast<double>(k);
}

}  // namespace

std::vector<std::uint8_t> stepwise_aic_selection(
    const Dataset& data, const std::vector<double>& response) {
  const std::size_t S = data.n_stations();
  const std::size_t D = data.n_covariates();
  if (response.size() != S) {
    throw ConfigError("stepwise response length must equal station count");
  }
  if (S < (D - 1) + 2) {
    throw ConfigError("stepwise selection needs at least candidates + 2 "
                      "stations (" +
                      std::to_string(D - 1) + " candidates, " +
                      std::to_string(S) + " stations)");
  }

  Eigen::MatrixXd X(S, D);
  Eigen::VectorXd y(S);
  for (std::size_t s = 0; s < S; ++s) {
    const auto& x = data.station(s).covariates;
    for (std::size_t j = 0; j < D; ++j) X(s, j) = x[j];
    y(s) = response[s];
  }

  std::vector<std::uint8_t> flags(D, 0);
  flags[0] = 1;
  std::size_t k = 1;
  double best = aic_of(rss_for(X, y, flags), S, k);

  for (;;) {
    double step_best = best;
    std::size_t step_j = 0;
    bool step_add = false;
    bool found = false;
    for (std::size_t j = 1; j < D; ++j) {
      auto trial = flags;
      trial[j] = !trial[j];
      const std::size_t tk = trial[j] ? k + 1 : k - 1;
      const double a = aic_of(rss_for(X, y, trial), S, tk);
      if (a < step_best - 1e-12) {
        step_best = a;
        step_j = j;
        step_add = trial[j];
        found = true;
      }
    }
    if (!found) break;
    flags[step_j] = step_add ? 1 : 0;
    if (step_add) {
      ++k;
    } else {
      --k;
    }
    best = step_best;
  }
  return flags;
}

std::vector<std::uint8_t> stepwise_aic_selection(const Dataset& data,
                                                 bool log_response) {
  std::vector<double> resp = data.station_mean_maxima();
  if (log_response) {
    for (double& r : resp) {
      if (!(r > 0.0)) {
        throw DataError("log response requires positive station means");
      }
      r = std::log(r);
    }
  }
  return stepwise_aic_selection(data, resp);
}

}  // namespace ffa
