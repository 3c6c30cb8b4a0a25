#pragma once

#include <cstddef>
#include <vector>

#include "ffa/rng.hpp"

namespace ffa::gev {

// Shape magnitudes below this use the Gumbel (xi = 0) formulas; the general
// expressions lose all precision as xi -> 0.
inline constexpr double kXiEps = 1e-8;

// GEV parameters in the inverse-scale parametrization: the density is
//   kappa * h^{-(xi+1)/xi} * exp(-h^{-1/xi}),  h = 1 + xi*kappa*(y - mu)
// for xi != 0, and the Gumbel form
//   kappa * h * exp(-h),  h = exp(-kappa*(y - mu))
// for xi = 0. kappa is 1/scale, so larger kappa means a tighter distribution.
struct GevParams {
  double mu = 0.0;
  double kappa = 1.0;
  double xi = 0.0;
};

// Throws NumericError unless kappa > 0 and all fields are finite.
void validate(const GevParams& p);

bool in_support(double y, const GevParams& p);

// Finite lower/upper endpoint of the support, or -inf/+inf when unbounded.
double lower_endpoint(const GevParams& p);
double upper_endpoint(const GevParams& p);

// Log density. Out-of-support y gives -inf (not an error) so likelihood code
// can reject parameter proposals whose support excludes an observation.
// Non-finite y or invalid parameters throw NumericError.
double log_density(double y, const GevParams& p);

// P(Y <= y); 0 below a finite lower endpoint, 1 above a finite upper one.
double cdf(double y, const GevParams& p);

// Quantile function: z with cdf(z) = prob. Requires 0 < prob < 1.
double quantile(double prob, const GevParams& p);

// n inverse-transform draws from the given stream.
std::vector<double> sample(const GevParams& p, std::size_t n, Rng& rng);
double sample_one(const GevParams& p, Rng& rng);

// Return period of the p-quantile, T = 1/(1-p), and its inverse p = 1 - 1/T.
double return_period_of(double prob);
double prob_of_return_period(double period);

}  // namespace ffa::gev
