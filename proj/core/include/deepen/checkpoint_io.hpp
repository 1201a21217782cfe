#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deepen/net.hpp"

namespace deepen {

// Versioned checkpoint: config echo, flat parameters in the declared layout,
// optimizer state and step count. Decimal text encoding; round-trips
// bit-exactly.
struct Checkpoint {
  std::string kind;  // "dueling_q" or "bc_softmax"
  NetConfig net_config;
  std::vector<double> params;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::int64_t adam_t = 0;
  std::int64_t step = 0;
  double selection_metric = 0.0;
  bool has_selection_metric = false;
  std::string config_hash;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const DuelingQNet& net, const AdamState& opt, std::int64_t step);
Checkpoint make_checkpoint(const BcNet& net, const AdamState& opt, std::int64_t step);

// Validate kind and shapes, then reconstruct the network.
DuelingQNet dueling_from_checkpoint(const Checkpoint& ckpt);
BcNet bc_from_checkpoint(const Checkpoint& ckpt);

}  // namespace deepen
