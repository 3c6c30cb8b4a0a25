#include "ffa/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffa/error.hpp"

namespace ffa {

double Station::mean_annual_maximum() const {
  if (annual_maxima.empty()) return 0.0;
  return std::accumulate(annual_maxima.begin(), annual_maxima.end(), 0.0) /
         static_cast<double>(annual_maxima.size());
}

std::vector<double> Standardization::apply(
    const std::vector<double>& raw) const {
  if (raw.size() != mean.size()) {
    throw ConfigError("covariate vector has dimension " +
                      std::to_string(raw.size()) + ", expected " +
                      std::to_string(mean.size()));
  }
  if (raw.empty() || raw[0] != 1.0) {
    throw ConfigError("covariate vector must start with the constant 1");
  }
  std::vector<double> out(raw.size());
  out[0] = 1.0;
  for (std::size_t j = 1; j < raw.size(); ++j) {
    out[j] = (raw[j] - mean[j]) / sd[j];
  }
  return out;
}

Dataset Dataset::from_raw(std::vector<Station> stations,
                          std::vector<std::string> covariate_names) {
  if (stations.empty()) throw DataError("dataset has no stations");
  const std::size_t dim = covariate_names.size();
  if (dim == 0) throw DataError("dataset has no covariates");

  for (const auto& st : stations) {
    if (st.raw_covariates.size() != dim) {
      throw DataError("station " + st.id + " has " +
                      std::to_string(st.raw_covariates.size()) +
                      " covariates, expected " + std::to_string(dim));
    }
    if (st.raw_covariates[0] != 1.0) {
      throw DataError("station " + st.id +
                      ": first covariate must be the constant 1");
    }
    if (st.annual_maxima.empty()) {
      throw DataError("station " + st.id + " has no annual maxima");
    }
    for (const double y : st.annual_maxima) {
      if (!std::isfinite(y)) {
        throw DataError("station " + st.id + " has a non-finite maximum");
      }
    }
  }

  const auto n = static_cast<double>(stations.size());
  Standardization std_;
  std_.mean.assign(dim, 0.0);
  std_.sd.assign(dim, 1.0);
  for (std::size_t j = 1; j < dim; ++j) {
    double m = 0.0;
    for (const auto& st : stations) m += st.raw_covariates[j];
    m /= n;
    double ss = 0.0;
    for (const auto& st : stations) {
      const double d = st.raw_covariates[j] - m;
      ss += d * d;
    }
    // Sample sd; a single station cannot be standardized.
    const double sd = stations.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (!(sd > 0.0)) {
      throw DataError("covariate '" + covariate_names[j] +
                      "' is constant across stations (sd = 0); drop it or "
                      "merge it into the intercept");
    }
    std_.mean[j] = m;
    std_.sd[j] = sd;
  }

  for (auto& st : stations) st.covariates = std_.apply(st.raw_covariates);

  Dataset d;
  d.stations_ = std::move(stations);
  d.names_ = std::move(covariate_names);
  d.standardization_ = std::move(std_);
  return d;
}

Dataset Dataset::from_standardized(std::vector<Station> stations,
                                   std::vector<std::string> covariate_names,
                                   Standardization standardization) {
  if (stations.empty()) throw DataError("dataset has no stations");
  const std::size_t dim = covariate_names.size();
  if (standardization.mean.size() != dim || standardization.sd.size() != dim) {
    throw DataError("standardization dimension mismatch");
  }
  for (auto& st : stations) {
    if (st.covariates.size() != dim) {
      throw DataError("station " + st.id + " has " +
                      std::to_string(st.covariates.size()) +
                      " covariates, expected " + std::to_string(dim));
    }
    if (st.covariates[0] != 1.0) {
      throw DataError("station " + st.id +
                      ": first covariate must be the constant 1");
    }
    if (st.raw_covariates.empty()) st.raw_covariates = st.covariates;
    if (st.annual_maxima.empty()) {
      throw DataError("station " + st.id + " has no annual maxima");
    }
  }
  Dataset d;
  d.stations_ = std::move(stations);
  d.names_ = std::move(covariate_names);
  d.standardization_ = std::move(standardization);
  return d;
}

std::size_t Dataset::total_observations() const {
  std::size_t n = 0;
  for (const auto& st : stations_) n += st.n_years();
  return n;
}

std::size_t Dataset::index_of(const std::string& id) const {
  for (std::size_t s = 0; s < stations_.size(); ++s) {
    if (stations_[s].id == id) return s;
  }
  throw DataError("unknown station id '" + id + "'");
}

bool Dataset::has_station(const std::string& id) const {
  return std::any_of(stations_.begin(), stations_.end(),
                     [&](const Station& st) { return st.id == id; });
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  std::vector<Station> picked;
  picked.reserve(indices.size());
  for (const std::size_t s : indices) picked.push_back(station(s));
  return from_raw(std::move(picked), names_);
}

Dataset Dataset::without(const std::vector<std::string>& ids) const {
  std::vector<std::size_t> keep;
  for (std::size_t s = 0; s < stations_.size(); ++s) {
    if (std::find(ids.begin(), ids.end(), stations_[s].id) == ids.end()) {
      keep.push_back(s);
    }
  }
  if (keep.size() == stations_.size()) {
    for (const auto& id : ids) {
      if (!has_station(id)) throw DataError("unknown station id '" + id + "'");
    }
  }
  return subset(keep);
}

Dataset Dataset::select_covariates(
    const std::vector<std::size_t>& columns) const {
  if (columns.empty() || columns[0] != 0) {
    throw ConfigError("covariate selection must keep column 0 (the constant)");
  }
  std::vector<Station> picked = stations_;
  std::vector<std::string> names;
  for (const std::size_t j : columns) {
    if (j >= names_.size()) {
      throw ConfigError("covariate column " + std::to_string(j) +
                        " out of range");
    }
    names.push_back(names_[j]);
  }
  for (auto& st : picked) {
    std::vector<double> raw;
    raw.reserve(columns.size());
    for (const std::size_t j : columns) raw.push_back(st.raw_covariates[j]);
    st.raw_covariates = std::move(raw);
    st.covariates.clear();
  }
  return from_raw(std::move(picked), std::move(names));
}

std::vector<double> Dataset::station_mean_maxima() const {
  std::vector<double> out;
  out.reserve(stations_.size());
  for (const auto& st : stations_) out.push_back(st.mean_annual_maximum());
  return out;
}

}  // namespace ffa
