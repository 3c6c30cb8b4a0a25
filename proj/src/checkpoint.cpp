#include <cstring>
#include <fstream>
#include <vector>

#include "ffa/error.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/serialize.hpp"

// Checkpoint layout: an 8-byte magic, a length-prefixed JSON header carrying
// everything human-readable (config, priors, names, rng state, counters),
// then a flat little-endian double/byte payload: the standardized station
// covariates, the last sampler state, and each retained draw. States pack as
// theta | inclusion | tau | alpha per block.

namespace ffa {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'A', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kSchemaVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot open '" + path + "' for writing");
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void f64s(const std::vector<double>& v) {
    if (!v.empty()) bytes(v.data(), v.size() * sizeof(double));
  }
  void u8s(const std::vector<std::uint8_t>& v) {
    if (!v.empty()) bytes(v.data(), v.size());
  }
  void close(const std::string& path) {
    out_.flush();
    if (!out_) throw DataError("write to '" + path + "' failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path)
      : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw DataError("cannot open checkpoint '" + path + "'");
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) {
      throw DataError("checkpoint '" + path_ + "' is truncated");
    }
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, sizeof v);
    return v;
  }
  void f64s(std::vector<double>& v, std::size_t n) {
    v.resize(n);
    if (n > 0) bytes(v.data(), n * sizeof(double));
  }
  void u8s(std::vector<std::uint8_t>& v, std::size_t n) {
    v.resize(n);
    if (n > 0) bytes(v.data(), n);
  }

 private:
  std::ifstream in_;
  std::string path_;
};

void pack_state(Writer& w, const HierState& state) {
  for (const auto& blk : state.blocks) {
    w.f64s(blk.theta);
    w.u8s(blk.inclusion);
    w.f64s(blk.tau);
    w.f64(blk.alpha);
  }
}

HierState unpack_state(Reader& r, std::size_t D, std::size_t S) {
  HierState state;
  for (auto& blk : state.blocks) {
    r.f64s(blk.theta, D);
    r.u8s(blk.inclusion, D);
    r.f64s(blk.tau, S);
    blk.alpha = r.f64();
  }
  return state;
}

}  // namespace

void save_samples(const std::string& path, const PosteriorSamples& samples) {
  Json counts = Json::object();
  for (const auto& [key, c] : samples.accept_counts) {
    counts[key] = Json::array({c.accepted, c.attempted});
  }
  const Json header{{"schema", "ffa.samples"},
                    {"schema_version", kSchemaVersion},
                    {"model_type", samples.model_type},
                    {"config", to_json(samples.config)},
                    {"priors", to_json(samples.priors)},
                    {"covariate_names", samples.covariate_names},
                    {"station_ids", samples.station_ids},
                    {"standardization",
                     Json{{"mean", samples.standardization.mean},
                          {"sd", samples.standardization.sd}}},
                    {"completed_iterations", samples.completed_iterations},
                    {"rng_state", samples.rng_state},
                    {"n_draws", samples.draws.size()},
                    {"accept_counts", counts}};
  const std::string header_str = header.dump();

  Writer w(path);
  w.bytes(kMagic, sizeof kMagic);
  w.u64(header_str.size());
  w.bytes(header_str.data(), header_str.size());
  for (const auto& x : samples.station_covariates) w.f64s(x);
  pack_state(w, samples.last_state);
  for (const auto& d : samples.draws) pack_state(w, d);
  w.close(path);
}

PosteriorSamples load_samples(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError("'" + path + "' is not a checkpoint file");
  }
  const std::uint64_t header_len = r.u64();
  if (header_len > (1ULL << 30)) {
    throw DataError("checkpoint '" + path + "' has an implausible header");
  }
  std::string header_str(header_len, '\0');
  r.bytes(header_str.data(), header_len);

  Json header;
  try {
    header = Json::parse(header_str);
  } catch (const Json::exception& e) {
    throw DataError("checkpoint '" + path + "' has a corrupt header: " +
                    e.what());
  }
  if (header.value("schema", "") != "ffa.samples") {
    throw DataError("checkpoint '" + path + "' has an unexpected schema");
  }
  if (header.value("schema_version", 0u) != kSchemaVersion) {
    throw DataError("checkpoint '" + path + "' uses schema version " +
                    std::to_string(header.value("schema_version", 0u)) +
                    "; this build reads version " +
                    std::to_string(kSchemaVersion));
  }

  PosteriorSamples s;
  s.model_type = header.at("model_type").get<std::string>();
  s.config = chain_config_from_json(header.at("config"));
  s.priors = priors_from_json(header.at("priors"));
  header.at("covariate_names").get_to(s.covariate_names);
  header.at("station_ids").get_to(s.station_ids);
  header.at("standardization").at("mean").get_to(s.standardization.mean);
  header.at("standardization").at("sd").get_to(s.standardization.sd);
  s.completed_iterations = header.at("completed_iterations").get<std::size_t>();
  s.rng_state = header.at("rng_state").get<std::string>();
  for (const auto& [key, v] : header.at("accept_counts").items()) {
    s.accept_counts[key] = {v.at(0).get<std::uint64_t>(),
                            v.at(1).get<std::uint64_t>()};
  }

  const std::size_t D = s.covariate_names.size();
  const std::size_t S = s.station_ids.size();
  const std::size_t n_draws = header.at("n_draws").get<std::size_t>();
  if (D == 0 || S == 0) throw DataError("checkpoint has empty dimensions");

  s.station_covariates.resize(S);
  for (auto& x : s.station_covariates) r.f64s(x, D);
  s.last_state = unpack_state(r, D, S);
  s.draws.reserve(n_draws);
  for (std::size_t i = 0; i < n_draws; ++i) {
    s.draws.push_back(unpack_state(r, D, S));
  }
  return s;
}

}  // namespace ffa
