#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepen/reward.hpp"
#include "deepen/types.hpp"

namespace deepen {

// Patient-level context kept alongside featurized trajectories. The guideline
// policy and the report module need these raw fields.
struct TrajectoryMeta {
  std::string patient_id;
  double weight_kg = 0.0;
  double height_cm = 0.0;
  int gender = 0;
  int burns = 0;
  int ckd = 0;
  int mortality = 0;
  bool is_train = false;
};

// Per-step context that is not part of the state vector.
struct StepAux {
  int icu_day = 1;      // 1-based, from the window's t_index
  int feeding_day = 1;  // 1-based, from time since EN initiation
  int crrt = 0;
  // Raw next-window biomarkers for the deviation analyses; NaN on the
  // terminal step.
  double glucose_next = 0.0;
  double phosphate_next = 0.0;
};

// One patient's transitions. States are stored once per window; the next
// state of step t is the state of step t+1, and the final step is terminal.
struct FeaturizedTrajectory {
  TrajectoryMeta meta;
  std::vector<double> states;  // row-major, size() * kNumFeatures
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<StepAux> aux;

  std::size_t size() const { return actions.size(); }

  std::span<const double> state(std::size_t t) const {
    return {states.data() + t * kNumFeatures, kNumFeatures};
  }
  // Empty span on the terminal step.
  std::span<const double> next_state(std::size_t t) const {
    if (t + 1 >= size()) return {};
    return state(t + 1);
  }
  bool terminal(std::size_t t) const { return t + 1 == size(); }
};

struct TransitionDataset {
  std::vector<FeaturizedTrajectory> trajectories;
  DatasetManifest manifest;

  std::vector<std::size_t> split_indices(bool train) const;
  std::size_t transition_count(bool train) const;
};

struct FeaturizeOptions {
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  QuantileThresholds thresholds;
  // Re-fit the cut-points from training-split dose quartiles instead of the
  // defaults above.
  bool refit_thresholds = false;
};

struct ExcludedRecord {
  std::string patient_id;
  std::string reason;
};

struct FeaturizeLog {
  std::vector<ExcludedRecord> excluded;
  std::int64_t unobserved_actions_remapped = 0;
};

// Average rate of change over the trailing window of up to 4 samples:
// (x_t - x_{t-k}) / k with k = min(3, available steps). Fewer than 2 samples
// returns 0 (cold-start convention).
double rate_of_change(std::span<const double> series);

// In-place per-variable imputation: linear interpolation for interior gaps,
// nearest observed value at the edges. An all-missing series becomes 0.
void interpolate_series(std::span<double> values);

// Full featurization pass: impute, split by patient, discretize actions,
// compute rate-of-change features, z-normalize with training-split statistics,
// and attach rewards. Records must pass validate_record.
TransitionDataset build_transitions(const std::vector<PatientRecord>& records,
                                    const FeaturizeOptions& options,
                                    const RewardConfig& reward_cfg,
                                    FeaturizeLog* log = nullptr);

// Materializes the spec-level transition for tests and spot checks.
Transition make_transition(const FeaturizedTrajectory& traj, std::size_t t);

}  // namespace deepen
