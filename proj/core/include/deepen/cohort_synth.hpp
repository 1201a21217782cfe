#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "deepen/types.hpp"

namespace deepen {

// Calibration targets default to the reference cohort statistics; the
// generator mechanics are a documented parametric simulator.
struct SynthConfig {
  std::int64_t n_patients = 1000;
  std::uint64_t seed = 0;
  double mortality_rate_target = 0.2246;
  double mean_stay_hours = 241.0;
  double female_fraction = 0.4163;
  double mean_age = 64.92;
  // Action id -> sampling weight; empty means the canonical observed counts.
  std::map<int, double> action_frequency_table;
  // Scales how strongly dosing quality drives biomarker drift, SOFA/lactate
  // drift and the mortality hazard. 0 decouples outcomes from actions.
  double effect_strength = 1.0;
  // Per-(window, variable) probability of a masked measurement among the
  // continuous vitals and labs.
  double missingness_rate = 0.05;
};

// Deterministic under seed: per-patient substreams plus a global mortality
// calibration pass, so output is independent of evaluation order.
std::vector<PatientRecord> generate_cohort(const SynthConfig& cfg);

}  // namespace deepen
