#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "deepen/action_codec.hpp"
#include "deepen/cohort_synth.hpp"
#include "deepen/dataset_io.hpp"
#include "deepen/errors.hpp"
#include "deepen/reward.hpp"
#include "deepen/stats.hpp"
#include "deepen/validation.hpp"
#include "support/test_helpers.hpp"

using namespace deepen;
using namespace deepen::testing;

namespace {

std::map<int, std::int64_t> action_counts(const std::vector<PatientRecord>& records) {
  const QuantileThresholds t;
  std::map<int, std::int64_t> counts;
  for (const auto& r : records)
    for (const auto& w : r.windows) {
      const ActionCode code = discretize_dose(w.dose, t);
      REQUIRE(code.observed());
      counts[*code.id] += 1;
    }
  return counts;
}

}  // namespace

TEST_CASE("same seed produces byte-identical cohorts") {
  SynthConfig cfg;
  cfg.n_patients = 25;
  cfg.seed = 99;
  const auto a = generate_cohort(cfg);
  const auto b = generate_cohort(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "deepen_cohort_test";
  std::filesystem::create_directories(dir);
  write_cohort((dir / "a.jsonl").string(), a);
  write_cohort((dir / "b.jsonl").string(), b);
  std::ifstream fa(dir / "a.jsonl"), fb(dir / "b.jsonl");
  const std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
}

TEST_CASE("zero patients is an empty cohort, not an error") {
  SynthConfig cfg;
  cfg.n_patients = 0;
  CHECK(generate_cohort(cfg).empty());
}

TEST_CASE("invalid configs are rejected") {
  SynthConfig cfg;
  cfg.n_patients = -1;
  CHECK_THROWS_AS(generate_cohort(cfg), ConfigError);
  cfg = {};
  cfg.mortality_rate_target = 1.5;
  CHECK_THROWS_AS(generate_cohort(cfg), ConfigError);
  cfg = {};
  cfg.effect_strength = -0.1;
  CHECK_THROWS_AS(generate_cohort(cfg), ConfigError);
  cfg = {};
  cfg.action_frequency_table[3] = -1.0;
  CHECK_THROWS_AS(generate_cohort(cfg), ConfigError);
}

TEST_CASE("every generated record passes validation") {
  SynthConfig cfg;
  cfg.n_patients = 200;
  cfg.seed = 4;
  cfg.missingness_rate = 0.08;
  for (const auto& r : generate_cohort(cfg)) {
    const auto v = validate_record(r);
    if (!v.empty()) FAIL(r.patient_id, ": ", v.front().message());
    CHECK(r.windows.size() >= 3);
  }
}

TEST_CASE("doses are strictly positive and span all four levels per component") {
  SynthConfig cfg;
  cfg.n_patients = 300;
  cfg.seed = 12;
  const auto records = generate_cohort(cfg);
  const QuantileThresholds t;
  std::array<std::set<int>, 3> seen;
  for (const auto& r : records)
    for (const auto& w : r.windows) {
      CHECK(w.dose.calories > 0.0);
      CHECK(w.dose.protein > 0.0);
      CHECK(w.dose.water > 0.0);
      const ActionCode code = discretize_dose(w.dose, t);
      seen[0].insert(code.cal_level);
      seen[1].insert(code.pro_level);
      seen[2].insert(code.water_level);
    }
  for (const auto& s : seen) CHECK(s.size() == 4);
}

TEST_CASE("empirical mortality tracks the configured target") {
  SynthConfig cfg;
  cfg.n_patients = 2000;
  cfg.seed = 21;
  const auto records = generate_cohort(cfg);
  double deaths = 0;
  for (const auto& r : records) deaths += r.mortality;
  const double rate = deaths / static_cast<double>(records.size());
  CHECK(std::abs(rate - cfg.mortality_rate_target) < 0.02);
}

TEST_CASE("action frequencies rank-correlate with the configured table") {
  SynthConfig cfg;
  cfg.n_patients = 1000;
  cfg.seed = 8;
  const auto counts = action_counts(generate_cohort(cfg));
  std::vector<double> observed(kNumActions, 0.0), expected(kNumActions, 0.0);
  for (const auto& e : action_table()) expected[static_cast<std::size_t>(e.id)] = static_cast<double>(e.count);
  for (const auto& [id, n] : counts) observed[static_cast<std::size_t>(id)] = static_cast<double>(n);
  CHECK(spearman(observed, expected) > 0.9);
}

TEST_CASE("zero effect strength decouples mortality from dosing") {
  SynthConfig cfg;
  cfg.n_patients = 5000;
  cfg.seed = 31;
  cfg.effect_strength = 0.0;
  const auto records = generate_cohort(cfg);

  // Quartiles of mean calorie dose vs mortality: chi-square with 3 df must be
  // non-significant at alpha = 0.01.
  std::vector<double> mean_cal(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    double sum = 0.0;
    for (const auto& w : records[i].windows) sum += w.dose.calories;
    mean_cal[i] = sum / static_cast<double>(records[i].windows.size());
  }
  std::vector<double> sorted = mean_cal;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sorted[sorted.size() / 4];
  const double q2 = sorted[sorted.size() / 2];
  const double q3 = sorted[3 * sorted.size() / 4];
  std::vector<std::array<double, 2>> table(4, {0.0, 0.0});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const int bucket = mean_cal[i] <= q1 ? 0 : mean_cal[i] <= q2 ? 1 : mean_cal[i] <= q3 ? 2 : 3;
    table[static_cast<std::size_t>(bucket)][records[i].mortality ? 1u : 0u] += 1.0;
  }
  CHECK(chi_square_2col(table) < kChi2Crit3df);
}

TEST_CASE("mortality hazard rises with sustained biomarker deviation") {
  SynthConfig cfg;
  cfg.n_patients = 3000;
  cfg.seed = 17;
  cfg.effect_strength = 1.0;
  const auto records = generate_cohort(cfg);
  const RewardConfig rc;

  std::vector<std::pair<double, int>> dev_mort(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    double dev = 0.0;
    for (const auto& w : records[i].windows)
      dev += deviation(w.values[wvar::kGlucose], rc.glucose_range) +
             deviation(w.values[wvar::kPhosphate], rc.phosphate_range);
    dev_mort[i] = {dev / static_cast<double>(records[i].windows.size()), records[i].mortality};
  }
  std::sort(dev_mort.begin(), dev_mort.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t q = dev_mort.size() / 4;
  double low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < q; ++i) low += dev_mort[i].second;
  for (std::size_t i = dev_mort.size() - q; i < dev_mort.size(); ++i) high += dev_mort[i].second;
  CHECK(high / static_cast<double>(q) > low / static_cast<double>(q) + 0.05);
}

TEST_CASE("biomarker deviations are masked when configured") {
  SynthConfig cfg;
  cfg.n_patients = 50;
  cfg.seed = 3;
  cfg.missingness_rate = 0.1;
  const auto records = generate_cohort(cfg);
  std::size_t missing = 0, total = 0;
  for (const auto& r : records)
    for (const auto& w : r.windows)
      for (int wv = 0; wv < kNumWindowVars; ++wv) {
        if (!window_var_maskable(wv)) {
          CHECK_FALSE(std::isnan(w.values[wv]));
          continue;
        }
        ++total;
        if (std::isnan(w.values[wv])) ++missing;
      }
  const double rate = static_cast<double>(missing) / static_cast<double>(total);
  CHECK(rate > 0.07);
  CHECK(rate < 0.13);
}
