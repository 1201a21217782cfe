#include "deepen/policies.hpp"

#include <algorithm>
#include <cmath>

#include "deepen/action_codec.hpp"
#include "deepen/checkpoint_io.hpp"
#include "deepen/errors.hpp"

namespace deepen {

double ideal_body_weight_kg(double height_cm, int gender) {
  const double height_in = height_cm / 2.54;
  const double base = gender ? 45.5 : 50.0;  // female : male
  return base + 2.3 * (height_in - 60.0);
}

int guideline_action(const GuidelineParams& params, double weight_kg, double height_cm,
                     int gender, int burns, int crrt, int feeding_day, int icu_day,
                     const QuantileThresholds& thresholds) {
  if (!(height_cm > 0.0))
    throw DataError("guideline policy requires height to compute BMI");
  if (!(weight_kg > 0.0)) throw DataError("guideline policy requires a positive weight");
  const double h_m = height_cm / 100.0;
  const double bmi = weight_kg / (h_m * h_m);

  double kcal_per_kg_day;
  if (bmi < 30.0)
    kcal_per_kg_day = params.cal_bmi_lt30;
  else if (bmi <= 50.0)
    kcal_per_kg_day = params.cal_bmi_30to50;
  else
    kcal_per_kg_day = params.cal_bmi_gt50;
  if (feeding_day <= params.early_feeding_days) kcal_per_kg_day *= params.early_feeding_factor;

  // Protein schedule by ICU day; burns/CRRT overrides belong to the stable
  // phase rule set.
  double protein_per_kg_day;
  if (icu_day <= 2) {
    protein_per_kg_day = params.protein_icu_day12;
  } else if (icu_day <= 4) {
    protein_per_kg_day = params.protein_icu_day34;
  } else if (crrt) {
    protein_per_kg_day = params.protein_crrt;
  } else if (burns) {
    protein_per_kg_day = params.protein_burns;
  } else if (bmi < 30.0) {
    protein_per_kg_day = params.protein_stable_bmi_lt30;
  } else {
    const double ibw = ideal_body_weight_kg(height_cm, gender);
    const double per_ibw = bmi <= 40.0 ? params.protein_stable_bmi_30to40 : params.protein_stable_bmi_gt40;
    protein_per_kg_day = per_ibw * ibw / weight_kg;
  }

  const double water_per_kg_day = params.water_ml_per_kcal * kcal_per_kg_day;

  const double windows = static_cast<double>(params.windows_per_day);
  const ActionCode code = discretize_dose(kcal_per_kg_day / windows, protein_per_kg_day / windows,
                                          water_per_kg_day / windows, thresholds);
  if (code.observed()) return *code.id;
  return nearest_observed_action(code.cal_level, code.pro_level, code.water_level);
}

namespace {

void fill_uniform(std::span<double> out) {
  const double p = 1.0 / static_cast<double>(kNumActions);
  std::fill(out.begin(), out.end(), p);
}

}  // namespace

void RandomPolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  fill_uniform(out.first(traj.size() * kNumActions));
}

void ClinicianPolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < traj.size(); ++t)
    out[t * kNumActions + static_cast<std::size_t>(traj.actions[t])] = 1.0;
}

void GuidelinePolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const StepAux& aux = traj.aux[t];
    const int action =
        guideline_action(params_, traj.meta.weight_kg, traj.meta.height_cm, traj.meta.gender,
                         traj.meta.burns, aux.crrt, aux.feeding_day, aux.icu_day, thresholds_);
    out[t * kNumActions + static_cast<std::size_t>(action)] = 1.0;
  }
}

void BcPolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  const int n = static_cast<int>(traj.size());
  net_.forward_probs(traj.states, n, out.first(traj.size() * kNumActions));
  for (std::size_t t = 0; t < traj.size(); ++t) {
    double* row = out.data() + t * kNumActions;
    double sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      row[a] = std::max(row[a], floor_);
      sum += row[a];
    }
    for (int a = 0; a < kNumActions; ++a) row[a] /= sum;
  }
}

void GreedyPolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  const int n = static_cast<int>(traj.size());
  std::vector<double> q(traj.size() * kNumActions);
  net_.forward(traj.states, n, q);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const int a = net_.argmax_action({q.data() + t * kNumActions, kNumActions});
    out[t * kNumActions + static_cast<std::size_t>(a)] = 1.0;
  }
}

void SmoothedPolicy::action_probs(const FeaturizedTrajectory& traj, std::span<double> out) const {
  inner_.action_probs(traj, out);
  const double u = kappa_ / static_cast<double>(kNumActions);
  for (std::size_t i = 0; i < traj.size() * kNumActions; ++i) out[i] = (1.0 - kappa_) * out[i] + u;
}

std::string_view policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kClinician: return "clinician";
    case PolicyKind::kBc: return "bc";
    case PolicyKind::kGuideline: return "guideline";
    case PolicyKind::kDeepen: return "deepen";
  }
  return "unknown";
}

PolicyKind policy_kind_from_name(std::string_view name) {
  if (name == "random") return PolicyKind::kRandom;
  if (name == "clinician") return PolicyKind::kClinician;
  if (name == "bc") return PolicyKind::kBc;
  if (name == "guideline") return PolicyKind::kGuideline;
  if (name == "deepen") return PolicyKind::kDeepen;
  throw ConfigError("unknown policy kind: " + std::string(name));
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const QuantileThresholds& thresholds,
                                    double bc_floor) {
  switch (spec.kind) {
    case PolicyKind::kRandom:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::kClinician:
      return std::make_unique<ClinicianPolicy>();
    case PolicyKind::kGuideline:
      return std::make_unique<GuidelinePolicy>(spec.guideline, thresholds);
    case PolicyKind::kBc:
      return std::make_unique<BcPolicy>(bc_from_checkpoint(load_checkpoint(spec.checkpoint_path)),
                                        bc_floor);
    case PolicyKind::kDeepen:
      return std::make_unique<GreedyPolicy>(
          dueling_from_checkpoint(load_checkpoint(spec.checkpoint_path)));
  }
  throw ConfigError("unhandled policy kind");
}

}  // namespace deepen
