#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "deepen/featurize.hpp"
#include "deepen/net.hpp"
#include "deepen/types.hpp"

namespace deepen {

// Expert nutrition targets. Daily targets are converted to the 4-hourly action
// grid by dividing across the windows of a day.
struct GuidelineParams {
  double cal_bmi_lt30 = 25.0;    // kcal/kg/day
  double cal_bmi_30to50 = 22.0;
  double cal_bmi_gt50 = 11.0;
  double early_feeding_factor = 0.70;  // first 3 feeding days
  int early_feeding_days = 3;
  double protein_icu_day12 = 0.8;  // g/kg/day, early acute phase
  double protein_icu_day34 = 1.0;
  double protein_stable_bmi_lt30 = 1.2;    // g/kg/day
  double protein_stable_bmi_30to40 = 2.0;  // g/kg ideal body weight/day
  double protein_stable_bmi_gt40 = 2.5;    // g/kg ideal body weight/day
  double protein_burns = 2.0;  // g/kg/day, stable phase override
  double protein_crrt = 2.5;   // g/kg/day, stable phase override
  double water_ml_per_kcal = 1.5;
  int windows_per_day = kWindowsPerDay;
};

// Devine formula.
double ideal_body_weight_kg(double height_cm, int gender);

// Deterministic guideline action for one decision point. Throws DataError when
// height is unavailable (BMI cannot be computed). Triples that fall outside
// the observed action set map to the nearest observed action.
int guideline_action(const GuidelineParams& params, double weight_kg, double height_cm,
                     int gender, int burns, int crrt, int feeding_day, int icu_day,
                     const QuantileThresholds& thresholds);

// A policy maps every step of a trajectory to a probability distribution over
// the 51 valid actions (rows of `out`, trajectory.size() x kNumActions).
// Implementations are immutable after construction.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const = 0;
};

class RandomPolicy final : public Policy {
 public:
  std::string_view name() const override { return "random"; }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;
};

// Replays the logged action with probability 1.
class ClinicianPolicy final : public Policy {
 public:
  std::string_view name() const override { return "clinician"; }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;
};

class GuidelinePolicy final : public Policy {
 public:
  GuidelinePolicy(GuidelineParams params, QuantileThresholds thresholds)
      : params_(params), thresholds_(thresholds) {}
  std::string_view name() const override { return "guideline"; }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;

 private:
  GuidelineParams params_;
  QuantileThresholds thresholds_;
};

// Behavior-cloning policy: softmax outputs floored at `floor` and
// renormalized, so every action keeps strictly positive probability.
class BcPolicy final : public Policy {
 public:
  BcPolicy(BcNet net, double floor = 1e-3) : net_(std::move(net)), floor_(floor) {}
  std::string_view name() const override { return "bc"; }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;
  const BcNet& net() const { return net_; }

 private:
  BcNet net_;
  double floor_;
};

// Greedy policy over the learned Q-function; ties break to the lowest id.
class GreedyPolicy final : public Policy {
 public:
  explicit GreedyPolicy(DuelingQNet net, std::string name = "deepen")
      : net_(std::move(net)), name_(std::move(name)) {}
  std::string_view name() const override { return name_; }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;
  const DuelingQNet& net() const { return net_; }

 private:
  DuelingQNet net_;
  std::string name_;
};

// Mixture with the uniform distribution: (1 - kappa) * inner + kappa / 51.
// Keeps per-decision importance weights strictly positive for deterministic
// policies during off-policy evaluation.
class SmoothedPolicy final : public Policy {
 public:
  SmoothedPolicy(const Policy& inner, double kappa) : inner_(inner), kappa_(kappa) {}
  std::string_view name() const override { return inner_.name(); }
  void action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const override;

 private:
  const Policy& inner_;
  double kappa_;
};

enum class PolicyKind { kRandom, kClinician, kBc, kGuideline, kDeepen };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kRandom;
  std::string checkpoint_path;  // bc and deepen
  GuidelineParams guideline;
};

std::string_view policy_kind_name(PolicyKind kind);
PolicyKind policy_kind_from_name(std::string_view name);

// Instantiates a policy, loading checkpoints where required.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const QuantileThresholds& thresholds,
                                    double bc_floor = 1e-3);

}  // namespace deepen
