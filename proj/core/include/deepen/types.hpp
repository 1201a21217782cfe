#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deepen/variables.hpp"

namespace deepen {

// One enteral dose, weight-adjusted per 4-hour window. All components are
// strictly positive in valid data.
struct DoseTriple {
  double calories = 0.0;  // kcal/kg
  double protein = 0.0;   // g/kg
  double water = 0.0;     // ml/kg
};

// One 4-hour window of a patient trajectory. Missing measurements are NaN and
// are imputed by the featurization pass; doses must always be present.
struct TimeWindow {
  int t_index = 0;  // 4-hour steps since ICU admission
  std::array<double, kNumWindowVars> values{};
  DoseTriple dose;
};

struct PatientRecord {
  std::string patient_id;
  double age = 0.0;
  int gender = 0;  // 1 = female
  double weight_kg = 0.0;
  double height_cm = 0.0;  // metadata only, not part of the state vector
  int icu_readmission = 0;
  int burns = 0;
  int ckd = 0;
  int diabetes = 0;
  int sepsis = 0;
  int trauma = 0;
  int elixhauser_score = 0;
  int mortality = 0;  // ICU death, applies to the final window
  std::vector<TimeWindow> windows;
};

// The unit of RL training.
struct Transition {
  std::vector<double> state;  // normalized, kNumFeatures long
  int action = 0;             // canonical action id in [0, 50]
  double reward = 0.0;
  std::optional<std::vector<double>> next_state;  // absent iff terminal
  bool terminal = false;
  int mortality = 0;  // meaningful only when terminal
};

// Quantile cut-points used to discretize the three dose components.
struct QuantileThresholds {
  std::array<double, 3> calories{1.91, 3.05, 4.13};
  std::array<double, 3> protein{0.08, 0.14, 0.19};
  std::array<double, 3> water{3.61, 5.40, 8.15};
};

struct SplitCounts {
  std::int64_t train_patients = 0;
  std::int64_t test_patients = 0;
  std::int64_t train_transitions = 0;
  std::int64_t test_transitions = 0;
};

struct DatasetManifest {
  std::vector<std::string> feature_names;  // exactly kNumFeatures entries
  // Normalization statistics over the training split; empty until featurized.
  std::vector<double> feature_means;
  std::vector<double> feature_stds;
  QuantileThresholds action_thresholds;
  std::uint64_t split_seed = 0;
  SplitCounts counts;
  std::string config_hash;

  bool has_stats() const { return !feature_means.empty(); }
};

inline DatasetManifest make_default_manifest() {
  DatasetManifest m;
  m.feature_names = feature_names();
  return m;
}

}  // namespace deepen
