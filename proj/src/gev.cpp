#include "ffa/gev.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ffa/error.hpp"

namespace ffa::gev {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double y) {
  if (!std::isfinite(y)) {
    throw NumericError("gev: observation must be finite, got " +
                       std::to_string(y));
  }
}
}  // namespace

void validate(const GevParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.kappa) || !std::isfinite(p.xi) ||
      p.kappa <= 0.0) {
    throw NumericError("gev: parameters must be finite with kappa > 0");
  }
}

bool in_support(double y, const GevParams& p) {
  if (std::abs(p.xi) < kXiEps) return true;
  return 1.0 + p.xi * p.kappa * (y - p.mu) > 0.0;
}

double lower_endpoint(const GevParams& p) {
  if (p.xi >= kXiEps) return p.mu - 1.0 / (p.kappa * p.xi);
  return -kInf;
}

double upper_endpoint(const GevParams& p) {
  if (p.xi <= -kXiEps) return p.mu - 1.0 / (p.kappa * p.xi);
  return kInf;
}

double log_density(double y, const GevParams& p) {
  validate(p);
  require_finite(y);
  if (std::abs(p.xi) < kXiEps) {
    // log h = -kappa*(y - mu); density kappa * h * exp(-h).
    const double logh = -p.kappa * (y - p.mu);
    return std::log(p.kappa) + logh - std::exp(logh);
  }
  const double t = p.xi * p.kappa * (y - p.mu);
  if (t <= -1.0) return -kInf;
  const double logh = std::log1p(t);
  return std::log(p.kappa) - (p.xi + 1.0) / p.xi * logh -
         std::exp(-logh / p.xi);
}

double cdf(double y, const GevParams& p) {
  validate(p);
  require_finite(y);
  if (std::abs(p.xi) < kXiEps) {
    return std::exp(-std::exp(-p.kappa * (y - p.mu)));
  }
  const double t = p.xi * p.kappa * (y - p.mu);
  if (t <= -1.0) return p.xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(t) / p.xi));
}

double quantile(double prob, const GevParams& p) {
  validate(p);
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw NumericError("gev: quantile requires prob in (0,1), got " +
                       std::to_string(prob));
  }
  // w = log(-log(prob)); [-log(prob)]^{-xi} = exp(-xi*w).
  const double w = std::log(-std::log(prob));
  if (std::abs(p.xi) < kXiEps) return p.mu - w / p.kappa;
  return p.mu + std::expm1(-p.xi * w) / (p.kappa * p.xi);
}

double sample_one(const GevParams& p, Rng& rng) {
  return quantile(rng.uniform(), p);
}

std::vector<double> sample(const GevParams& p, std::size_t n, Rng& rng) {
  validate(p);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(rng.uniform(), p));
  return out;
}

double return_period_of(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0)) {
    throw NumericError("return period requires prob in (0,1)");
  }
  return 1.0 / (1.0 - prob);
}

double prob_of_return_period(double period) {
  if (!(period > 1.0)) {
    throw NumericError("return period must exceed 1 year");
  }
  return 1.0 - 1.0 / period;
}

}  // namespace ffa::gev
