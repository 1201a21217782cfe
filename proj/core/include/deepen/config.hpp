#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepen/cohort_synth.hpp"
#include "deepen/featurize.hpp"
#include "deepen/ope.hpp"
#include "deepen/policies.hpp"
#include "deepen/reward.hpp"
#include "deepen/training.hpp"

namespace deepen {

// Fully resolved run configuration. Unknown keys anywhere in the document are
// rejected; every run echoes the resolved config for reproducibility.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  SynthConfig synth;
  FeaturizeOptions featurize;
  RewardConfig reward;
  TrainConfig train;
  std::vector<PolicySpec> policies;  // defaults to all five
  OpeOptions ope;
};

RunConfig default_run_config();

// Parse a config document; absent sections keep defaults, unknown keys throw
// ConfigError naming the key path. Seeds of the sub-configs follow the global
// seed unless given explicitly.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical serialization of the resolved config.
std::string dump_run_config(const RunConfig& cfg);

// FNV-1a hash (hex) of the canonical serialization; embedded in artifacts.
std::string config_hash(const RunConfig& cfg);

void write_resolved_config(const std::string& path, const RunConfig& cfg);

}  // namespace deepen
