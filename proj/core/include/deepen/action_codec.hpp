#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "deepen/types.hpp"

namespace deepen {

// Discretized dose: each component level in 1..4. Of the 64 level triples only
// 51 occur in practice; those carry a canonical id in 0..50. The remaining 13
// triples are representable but flagged unobserved (id absent) and are not part
// of the policy action set.
struct ActionCode {
  int cal_level = 0;
  int pro_level = 0;
  int water_level = 0;
  std::optional<int> id;

  bool observed() const { return id.has_value(); }
};

struct ActionTableEntry {
  int id;
  int cal_level;
  int pro_level;
  int water_level;
  std::int64_t count;  // observed frequency, used as default sampling weights
};

// Canonical table, ordered by id (descending observed count).
const std::array<ActionTableEntry, kNumActions>& action_table();

// Level triple for a canonical id in [0, 50].
ActionCode decode_action(int id);

// Canonical id for a level triple, or an unobserved-flagged code.
ActionCode encode_levels(int cal_level, int pro_level, int water_level);

// Bin a single component. Levels are left-open/right-closed: level 1 covers
// (0, t1], level 2 (t1, t2], level 3 (t2, t3], level 4 (t3, inf).
// Throws DataError for non-positive input.
int dose_component_level(double value, const std::array<double, 3>& cuts);

// Discretize a full dose triple. Throws DataError for non-positive components.
ActionCode discretize_dose(double calories, double protein, double water,
                           const QuantileThresholds& thresholds);
ActionCode discretize_dose(const DoseTriple& dose, const QuantileThresholds& thresholds);

// Closest observed action to an arbitrary level triple: minimal L1 distance on
// levels, ties broken by lowest id. Identity on observed triples.
int nearest_observed_action(int cal_level, int pro_level, int water_level);

}  // namespace deepen
