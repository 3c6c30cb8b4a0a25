#pragma once

// JSON (de)serialization for the configuration types. Parsing is lenient:
// missing fields keep the supplied defaults, unknown fields are rejected so
// typos do not silently change a run.

#include <json.hpp>

#include "ffa/local.hpp"
#include "ffa/mcmc.hpp"
#include "ffa/prediction.hpp"
#include "ffa/validation.hpp"

namespace ffa {

using Json = nlohmann::json;

Json to_json(const ChainConfig& c);
ChainConfig chain_config_from_json(const Json& j, ChainConfig defaults = {});

Json to_json(const Priors& p);
Priors priors_from_json(const Json& j, Priors defaults = {});

Json to_json(const PredictOptions& p);
PredictOptions predict_options_from_json(const Json& j,
                                         PredictOptions defaults = {});

Json to_json(const ScoreOptions& s);
ScoreOptions score_options_from_json(const Json& j, ScoreOptions defaults = {});

Json to_json(const SimulationSpec& s);
SimulationSpec simulation_spec_from_json(const Json& j,
                                         SimulationSpec defaults = {});

Json to_json(const LocalPriors& p);
LocalPriors local_priors_from_json(const Json& j, LocalPriors defaults = {});

}  // namespace ffa
