#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ffa {

// Deterministic random stream. The engine is std::mt19937_64, but all
// distributions are implemented here rather than with std::*_distribution,
// whose output is implementation-defined. Two builds fed the same seed
// produce the same draws, and the full stream state round-trips through
// serialize()/restore() so chains can be checkpointed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1, so
  // log(u) and log(-log(u)) are always finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. The paired value is discarded so the
  // stream position is a pure function of the call count.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, rate) with mean shape/rate (Marsaglia-Tsang).
  double gamma(double shape, double rate);

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  std::string serialize() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

// Stable seed derivation: children of a master seed are labeled by a short
// string plus an index, so independent components (chains, folds, prediction
// streams) never share a stream. The master seed is always recoverable from
// the run config.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

}  // namespace ffa
