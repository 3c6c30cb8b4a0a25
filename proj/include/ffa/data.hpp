#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ffa {

// One gauging station: its annual maximum series and covariate vector.
// covariates[0] is always the constant 1; the remaining entries are stored
// standardized (z-scored with the dataset's Standardization). raw_covariates
// keeps the original values so subsets can re-standardize.
struct Station {
  std::string id;
  std::vector<double> annual_maxima;
  std::vector<double> covariates;      // standardized, [0] == 1
  std::vector<double> raw_covariates;  // unstandardized, [0] == 1

  std::size_t n_years() const { return annual_maxima.size(); }
  double mean_annual_maximum() const;
};

// Per-covariate (mean, sd) pairs; the constant column carries (0, 1).
struct Standardization {
  std::vector<double> mean;
  std::vector<double> sd;

  std::size_t dim() const { return mean.size(); }
  // z-scores a raw vector (leading 1 included). Throws on dimension mismatch
  // or a leading entry != 1.
  std::vector<double> apply(const std::vector<double>& raw) const;
};

class Dataset {
 public:
  Dataset() = default;

  // Builds a dataset from raw per-station covariates (leading 1 included),
  // computing and applying the standardization. Enforces: consistent
  // dimensions, >= 1 year per station, finite maxima, sd > 0 for every
  // non-constant covariate.
  static Dataset from_raw(std::vector<Station> stations,
                          std::vector<std::string> covariate_names);

  // Reassembles a dataset whose covariates are already on the model scale
  // (stations must carry `covariates`; raw values are taken as-is if present,
  // otherwise mirrored). Skips the constancy check; used when restoring
  // persisted artifacts and in degenerate-covariate setups.
  static Dataset from_standardized(std::vector<Station> stations,
                                   std::vector<std::string> covariate_names,
                                   Standardization standardization);

  const std::vector<Station>& stations() const { return stations_; }
  const std::vector<std::string>& covariate_names() const { return names_; }
  const Standardization& standardization() const { return standardization_; }

  std::size_t n_stations() const { return stations_.size(); }
  std::size_t n_covariates() const { return names_.size(); }
  std::size_t total_observations() const;

  const Station& station(std::size_t s) const { return stations_.at(s); }
  // Index of a station id; throws DataError if unknown.
  std::size_t index_of(const std::string& id) const;
  bool has_station(const std::string& id) const;

  // New dataset containing the selected stations, re-standardized from the
  // raw covariates of that subset.
  Dataset subset(const std::vector<std::size_t>& indices) const;
  // Complement subset: every station except the listed ids.
  Dataset without(const std::vector<std::string>& ids) const;
  // New dataset keeping only the selected covariate columns (must include
  // column 0, the constant).
  Dataset select_covariates(const std::vector<std::size_t>& columns) const;

  std::vector<double> station_mean_maxima() const;

 private:
  std::vector<Station> stations_;
  std::vector<std::string> names_;
  Standardization standardization_;
};

}  // namespace ffa
