#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "deepen/featurize.hpp"
#include "deepen/policies.hpp"

namespace deepen {

struct OpeOptions {
  double gamma = 0.99;
  int calibration_bins = 10;
  int bootstrap_resamples = 1000;
  double behavior_floor = 1e-3;   // BC behavior probabilities floor
  double smoothing_kappa = 0.01;  // uniform mixture for deterministic policies
  std::uint64_t seed = 0;
  std::array<double, 2> glucose_range{140.0, 180.0};
  std::array<double, 2> phosphate_range{2.5, 4.5};
};

// Per-trajectory cumulative log importance ratios and rewards; the cached
// input of the CWPDIS estimator, cheap to re-aggregate under bootstrap.
struct WeightedTrajectory {
  std::vector<double> log_rho;
  std::vector<double> rewards;
};

std::vector<WeightedTrajectory> weight_trajectories(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& eval_policy,
    const Policy& behavior_policy);

// Consistent weighted per-decision importance sampling over a selection of
// the cached trajectories. Finished trajectories keep their final weight in
// the per-step normalizer with zero reward; steps with zero total weight
// contribute 0. Aggregation uses pairwise summation.
double cwpdis_from_weighted(const std::vector<WeightedTrajectory>& weighted,
                            const std::vector<std::size_t>& selection, double gamma);

// Convenience entry point matching the estimator definition. Throws DataError
// on an empty trajectory set.
double cwpdis(const std::vector<const FeaturizedTrajectory*>& trajectories,
              const Policy& eval_policy, const Policy& behavior_policy, double gamma);

// Plain discounted return of one trajectory.
double discounted_return(const FeaturizedTrajectory& traj, double gamma);

struct CurveBin {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double x_mean = 0.0;
  double y = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t count = 0;
};

struct BinnedCurve {
  std::vector<CurveBin> bins;
  double spearman_rho = 0.0;
  double spearman_z = 0.0;
};

// Equal-count bins over per-trajectory return estimates; per-bin mortality
// with Wilson intervals and a Spearman monotone-trend statistic.
// Throws DataError when n_bins exceeds the number of trajectories.
BinnedCurve return_mortality_curve(const std::vector<double>& returns,
                                   const std::vector<int>& mortality, int n_bins);

struct MortalityEstimate {
  double mortality = 0.0;
  bool clamped = false;  // return fell outside the calibration range
};

// Piecewise-linear interpolation of the binned return-to-mortality curve at
// the policy's expected return; out-of-range returns clamp to the boundary
// bin and are flagged.
MortalityEstimate estimate_policy_mortality(double policy_return, const BinnedCurve& calibration);

// Dosage-difference analyses: policy level minus clinician level in {-3..3}.
struct DeviationBin {
  int diff = 0;
  double y = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t count = 0;
};

struct DeviationCurve {
  std::string component;  // "calories" | "protein" | "water"
  std::vector<DeviationBin> bins;
};

// Policy actions are drawn from the policy distribution with a fixed seed, so
// stochastic baselines spread across difference bins deterministically.
std::vector<DeviationCurve> dosage_deviation_curves(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& policy,
    std::uint64_t sample_seed);

// Calorie difference vs next-state glucose deviation, protein difference vs
// next-state phosphate deviation (terminal steps carry no next state).
std::vector<DeviationCurve> biomarker_deviation_curves(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& policy,
    std::uint64_t sample_seed, const std::array<double, 2>& glucose_range,
    const std::array<double, 2>& phosphate_range);

struct PolicyEvaluation {
  std::string policy;
  double cwpdis_value = 0.0;
  double cwpdis_se = 0.0;
  double cwpdis_ci_lo = 0.0;
  double cwpdis_ci_hi = 0.0;
  double est_mortality = 0.0;
  double est_mortality_se = 0.0;
  double est_mortality_ci_lo = 0.0;
  double est_mortality_ci_hi = 0.0;
  bool mortality_from_empirical = false;  // clinician row uses the dataset rate
  bool return_clamped = false;
  std::vector<DeviationCurve> dosage_curves;
  std::vector<DeviationCurve> biomarker_curves;
  // Per component (calories, protein, water), frequency of levels 1..4.
  std::array<std::array<double, 4>, 3> action_level_freq{};
};

struct OpeReport {
  OpeOptions options;
  std::string config_hash;
  std::int64_t n_trajectories = 0;
  double behavior_mean_return = 0.0;  // empirical mean discounted return
  double empirical_mortality = 0.0;
  BinnedCurve calibration;
  std::vector<PolicyEvaluation> policies;
};

// Full evaluation of a set of policies on the given trajectories (normally the
// test split). Deterministic given (dataset, checkpoints, options.seed).
OpeReport build_ope_report(const std::vector<const FeaturizedTrajectory*>& trajectories,
                           const std::vector<const Policy*>& policies, const BcPolicy& behavior,
                           const OpeOptions& options);

void write_ope_report(const std::string& path, const OpeReport& report);
OpeReport read_ope_report(const std::string& path);

}  // namespace deepen
