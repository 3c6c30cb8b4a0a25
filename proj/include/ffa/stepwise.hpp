#pragma once

#include <cstdint>
#include <vector>

#include "ffa/data.hpp"

namespace ffa {

// Bidirectional stepwise OLS search over the standardized covariates,
// minimizing AIC = n*log(RSS/n) + 2k with k the number of fitted
// coefficients. The intercept is always kept. Returns one inclusion flag per
// covariate (flag[0] == 1). Deterministic given the data.
//
// Requires n_stations >= (number of non-constant candidates) + 2.
std::vector<std::uint8_t> stepwise_aic_selection(
    const Dataset& data, const std::vector<double>& response);

// Convenience overload using the index flood (per-station mean annual
// maximum) as the response; set log_response to regress on its log.
std::vector<std::uint8_t> stepwise_aic_selection(const Dataset& data,
                                                 bool log_response = false);

}  // namespace ffa
