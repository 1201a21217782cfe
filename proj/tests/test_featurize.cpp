#include <doctest.h>

#include <cmath>

#include "deepen/cohort_synth.hpp"
#include "deepen/errors.hpp"
#include "deepen/featurize.hpp"
#include "deepen/reward.hpp"
#include "deepen/stats.hpp"
#include "support/test_helpers.hpp"

using namespace deepen;
using namespace deepen::testing;

TEST_CASE("rate of change over the trailing window") {
  const std::vector<double> flat{10, 10, 10, 10};
  CHECK(rate_of_change(flat) == 0.0);
  const std::vector<double> ramp{1, 2, 3, 4};
  CHECK(rate_of_change(ramp) == doctest::Approx(1.0));
  const std::vector<double> single{5};
  CHECK(rate_of_change(single) == 0.0);
  const std::vector<double> pair{4, 8};
  CHECK(rate_of_change(pair) == doctest::Approx(4.0));
  const std::vector<double> three{1, 2, 4};
  CHECK(rate_of_change(three) == doctest::Approx(1.5));
}

TEST_CASE("interpolation: interior linear, edges nearest, all-missing zero") {
  std::vector<double> v{4, std::nan(""), 8};
  interpolate_series(v);
  CHECK(v[1] == doctest::Approx(6.0));

  std::vector<double> edges{std::nan(""), 3, std::nan(""), std::nan("")};
  interpolate_series(edges);
  CHECK(edges[0] == 3.0);
  CHECK(edges[2] == 3.0);
  CHECK(edges[3] == 3.0);

  std::vector<double> gap{0, std::nan(""), std::nan(""), 9};
  interpolate_series(gap);
  CHECK(gap[1] == doctest::Approx(3.0));
  CHECK(gap[2] == doctest::Approx(6.0));

  std::vector<double> none{std::nan(""), std::nan("")};
  interpolate_series(none);
  CHECK(none[0] == 0.0);
  CHECK(none[1] == 0.0);
}

namespace {

std::vector<PatientRecord> small_cohort(std::int64_t n, double missingness = 0.0,
                                        std::uint64_t seed = 11) {
  SynthConfig cfg;
  cfg.n_patients = n;
  cfg.seed = seed;
  cfg.missingness_rate = missingness;
  return generate_cohort(cfg);
}

}  // namespace

TEST_CASE("transition counts, terminal structure and state dimension") {
  const auto records = small_cohort(20);
  FeaturizeOptions opts;
  opts.split_seed = 1;
  const TransitionDataset ds = build_transitions(records, opts, RewardConfig{});
  REQUIRE(ds.trajectories.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& traj = ds.trajectories[i];
    CHECK(traj.size() == records[i].windows.size());
    CHECK(traj.states.size() == traj.size() * kNumFeatures);
    CHECK(traj.terminal(traj.size() - 1));
    CHECK(traj.next_state(traj.size() - 1).empty());
    for (std::size_t t = 0; t + 1 < traj.size(); ++t) CHECK_FALSE(traj.terminal(t));
    // Terminal reward is +/-15; aux raw biomarkers absent on the last step.
    CHECK(std::abs(traj.rewards.back()) == 15.0);
    CHECK(std::isnan(traj.aux.back().glucose_next));
  }
  const auto& c = ds.manifest.counts;
  CHECK(c.train_patients + c.test_patients == static_cast<std::int64_t>(records.size()));
  CHECK(c.train_patients == 16);  // 80% of 20
}

TEST_CASE("training-split features are z-normalized to mean 0, std 1") {
  const auto records = small_cohort(40, 0.05);
  FeaturizeOptions opts;
  opts.split_seed = 7;
  const TransitionDataset ds = build_transitions(records, opts, RewardConfig{});

  for (int f = 0; f < kNumFeatures; ++f) {
    std::vector<double> values;
    for (const auto& traj : ds.trajectories) {
      if (!traj.meta.is_train) continue;
      for (std::size_t t = 0; t < traj.size(); ++t) values.push_back(traj.state(t)[f]);
    }
    const double m = mean(values);
    const double sd = std::sqrt(variance(values));
    CHECK(std::abs(m) < 1e-9);
    // Degenerate features keep their forced unit std and collapse to 0.
    if (sd > 1e-12) CHECK(std::abs(sd - 1.0) < 1e-9);
  }
}

TEST_CASE("state components round-trip to the source window values") {
  const auto records = small_cohort(12, 0.0);
  FeaturizeOptions opts;
  opts.split_seed = 2;
  const TransitionDataset ds = build_transitions(records, opts, RewardConfig{});
  const int f = kNumPatientFeatures + wvar::kGlucose;
  const double mu = ds.manifest.feature_means[f];
  const double sd = ds.manifest.feature_stds[f];
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t t = 0; t < records[i].windows.size(); ++t) {
      const double denorm = ds.trajectories[i].state(t)[f] * sd + mu;
      CHECK(denorm == doctest::Approx(records[i].windows[t].values[wvar::kGlucose]).epsilon(1e-9));
    }
  }
}

TEST_CASE("interior gap imputes to the linear midpoint") {
  PatientRecord r = make_record(3);
  r.windows[0].values[wvar::kGlucose] = 4.0;
  r.windows[1].values[wvar::kGlucose] = std::nan("");
  r.windows[2].values[wvar::kGlucose] = 8.0;
  const TransitionDataset ds = build_transitions({r}, FeaturizeOptions{}, RewardConfig{});
  const int f = kNumPatientFeatures + wvar::kGlucose;
  const double denorm = ds.trajectories[0].state(1)[f] * ds.manifest.feature_stds[f] +
                        ds.manifest.feature_means[f];
  CHECK(denorm == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("records shorter than 2 windows are excluded with a reason") {
  auto records = small_cohort(5);
  records.push_back(make_record(1, "short-1"));
  FeaturizeLog log;
  const TransitionDataset ds = build_transitions(records, FeaturizeOptions{}, RewardConfig{}, &log);
  CHECK(ds.trajectories.size() == 5);
  REQUIRE(log.excluded.size() == 1);
  CHECK(log.excluded[0].patient_id == "short-1");
  CHECK(log.excluded[0].reason.find("fewer than 2") != std::string::npos);
}

TEST_CASE("normalization statistics ignore the test split entirely") {
  auto records = small_cohort(25, 0.0, 33);
  FeaturizeOptions opts;
  opts.split_seed = 9;
  const TransitionDataset base = build_transitions(records, opts, RewardConfig{});

  // Perturb only test-split patients' labs; the split depends on count and
  // seed alone, so assignments are unchanged.
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (base.trajectories[i].meta.is_train) continue;
    for (auto& w : records[i].windows) w.values[wvar::kSodium] += 25.0;
  }
  const TransitionDataset perturbed = build_transitions(records, opts, RewardConfig{});
  CHECK(perturbed.manifest.feature_means == base.manifest.feature_means);
  CHECK(perturbed.manifest.feature_stds == base.manifest.feature_stds);
}

TEST_CASE("refit thresholds produces increasing cut points and changes the manifest") {
  const auto records = small_cohort(30);
  FeaturizeOptions opts;
  opts.refit_thresholds = true;
  const TransitionDataset ds = build_transitions(records, opts, RewardConfig{});
  const auto& t = ds.manifest.action_thresholds;
  CHECK(t.calories[0] < t.calories[1]);
  CHECK(t.calories[1] < t.calories[2]);
  CHECK(t.protein[0] < t.protein[1]);
  CHECK(t.water[1] < t.water[2]);
  CHECK(t.calories[0] != doctest::Approx(1.91));
}

TEST_CASE("rewards match the reward module on raw imputed values") {
  PatientRecord r = make_record(3);
  r.windows[0].values[wvar::kSofa] = 6.0;
  r.windows[1].values[wvar::kSofa] = 4.0;
  r.windows[0].values[wvar::kLactate] = 3.0;
  r.windows[1].values[wvar::kLactate] = 2.0;
  r.windows[0].values[wvar::kGlucose] = 200.0;
  r.windows[1].values[wvar::kGlucose] = 180.0;
  r.windows[0].values[wvar::kPhosphate] = 3.5;
  r.windows[1].values[wvar::kPhosphate] = 3.5;
  const TransitionDataset ds = build_transitions({r}, FeaturizeOptions{}, RewardConfig{});
  RewardInputs in;
  in.sofa_t = 6;
  in.sofa_t1 = 4;
  in.lactate_t = 3;
  in.lactate_t1 = 2;
  in.glucose_t = 200;
  in.glucose_t1 = 180;
  in.phosphate_t = 3.5;
  in.phosphate_t1 = 3.5;
  CHECK(ds.trajectories[0].rewards[0] == doctest::Approx(total_reward(in, RewardConfig{})));
}

TEST_CASE("make_transition materializes the documented shape") {
  const auto records = small_cohort(3);
  const TransitionDataset ds = build_transitions(records, FeaturizeOptions{}, RewardConfig{});
  const auto& traj = ds.trajectories[0];
  const Transition mid = make_transition(traj, 0);
  CHECK(mid.state.size() == 102);
  CHECK_FALSE(mid.terminal);
  REQUIRE(mid.next_state.has_value());
  CHECK(mid.next_state->size() == 102);
  const Transition last = make_transition(traj, traj.size() - 1);
  CHECK(last.terminal);
  CHECK_FALSE(last.next_state.has_value());
  CHECK(last.mortality == traj.meta.mortality);
}

TEST_CASE("invalid records are rejected by the featurizer") {
  PatientRecord bad = make_record();
  bad.windows[0].values[wvar::kSofa] = 30.0;
  CHECK_THROWS_AS(build_transitions({bad}, FeaturizeOptions{}, RewardConfig{}), DataError);
}
