#include "deepen/cohort_synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "deepen/action_codec.hpp"
#include "deepen/errors.hpp"
#include "deepen/rng.hpp"

namespace deepen {

namespace {

// --- Generator mechanics -----------------------------------------------
//
// Each patient carries a latent "need" action drawn from the configured
// action-frequency table and resampled occasionally. The clinician doses the
// need with probability kFollowLo..kFollowHi (per-patient), otherwise an
// independent table draw. Dose-minus-need level mismatches drive glucose
// (calories), phosphate (protein) and urine output (water), and feed SOFA and
// lactate drift, all scaled by effect_strength. The mortality hazard is a
// logistic function of mean SOFA, latent severity and sustained biomarker
// deviation; its intercept is calibrated by bisection against the target rate.

constexpr double kFollowLo = 0.45, kFollowHi = 0.85;
constexpr double kNeedResampleProb = 0.08;

constexpr double kGlucoseTargetLo = 140.0, kGlucoseTargetHi = 180.0;
constexpr double kPhosphateTargetLo = 2.5, kPhosphateTargetHi = 4.5;

constexpr double kGlucosePerLevel = 35.0;   // mg/dL per level of calorie mismatch
constexpr double kPhosphatePerLevel = 1.3;  // mg/dL per level of protein mismatch
constexpr double kUrinePerLevel = 55.0;     // ml/4h per level of water mismatch
constexpr double kInsulinGlucoseDrop = 8.0;

constexpr double kHazardSofa = 1.3;      // on mean SOFA / 6
constexpr double kHazardSeverity = 0.9;  // on mean latent severity
constexpr double kHazardDeviation = 1.2; // on sustained biomarker deviation

struct VarModel {
  int wv;
  double base;
  double sev_coef;
  double sd;
  double ar;  // pull toward the (severity-shifted) equilibrium per window
  double lo;
  double hi;
};

// Plausible stationary processes for the variables outside the causal core.
const VarModel kVarModels[] = {
    {wvar::kHr, 86.0, 14.0, 5.0, 0.4, 40.0, 180.0},
    {wvar::kSbp, 118.0, -10.0, 7.0, 0.4, 70.0, 200.0},
    {wvar::kMbp, 80.0, -7.0, 5.0, 0.4, 45.0, 140.0},
    {wvar::kDbp, 62.0, -5.0, 5.0, 0.4, 30.0, 110.0},
    {wvar::kRespRate, 18.0, 4.5, 2.2, 0.4, 8.0, 45.0},
    {wvar::kTemperature, 37.0, 0.5, 0.3, 0.4, 34.0, 41.0},
    {wvar::kPaco2, 40.0, 3.0, 3.5, 0.4, 20.0, 80.0},
    {wvar::kPao2, 96.0, -12.0, 9.0, 0.4, 50.0, 300.0},
    {wvar::kSpo2, 97.0, -2.5, 0.9, 0.4, 80.0, 100.0},
    {wvar::kAlbumin, 3.1, -0.5, 0.18, 0.25, 1.0, 5.5},
    {wvar::kPh, 7.38, -0.05, 0.02, 0.4, 7.0, 7.7},
    {wvar::kCalcium, 8.5, -0.3, 0.25, 0.3, 6.0, 12.0},
    {wvar::kHemoglobin, 10.5, -0.8, 0.35, 0.2, 5.0, 18.0},
    {wvar::kMagnesium, 2.0, 0.1, 0.12, 0.3, 1.0, 4.0},
    {wvar::kWbc, 11.0, 4.0, 1.5, 0.3, 1.0, 40.0},
    {wvar::kCreatinine, 1.2, 0.9, 0.15, 0.2, 0.3, 8.0},
    {wvar::kBicarbonate, 24.0, -2.5, 1.2, 0.3, 10.0, 40.0},
    {wvar::kSodium, 139.0, 1.0, 1.6, 0.3, 120.0, 160.0},
    {wvar::kChloride, 104.0, 1.0, 1.8, 0.3, 85.0, 125.0},
    {wvar::kPlatelets, 210.0, -55.0, 18.0, 0.2, 20.0, 700.0},
    {wvar::kPotassium, 4.1, 0.25, 0.22, 0.35, 2.5, 7.0},
    {wvar::kPtt, 34.0, 6.0, 3.0, 0.3, 20.0, 120.0},
    {wvar::kPt, 14.5, 2.5, 1.0, 0.3, 9.0, 50.0},
    {wvar::kAst, 48.0, 35.0, 9.0, 0.25, 8.0, 800.0},
    {wvar::kAlt, 42.0, 28.0, 8.0, 0.25, 5.0, 800.0},
    {wvar::kBun, 24.0, 12.0, 2.5, 0.2, 3.0, 150.0},
    {wvar::kInr, 1.3, 0.3, 0.08, 0.3, 0.8, 8.0},
    {wvar::kIonisedCalcium, 1.12, -0.05, 0.04, 0.35, 0.8, 1.6},
    {wvar::kTotalBilirubin, 1.1, 0.9, 0.2, 0.2, 0.1, 25.0},
    {wvar::kBaseExcess, 0.0, -2.5, 1.1, 0.35, -20.0, 20.0},
    {wvar::kIvFluids, 110.0, 60.0, 32.0, 0.5, 0.0, 600.0},
    {wvar::kPropofolDose, 18.0, 14.0, 9.0, 0.5, 0.0, 200.0},
};

std::vector<double> table_weights(const SynthConfig& cfg) {
  std::vector<double> w(kNumActions, 0.0);
  if (cfg.action_frequency_table.empty()) {
    for (const auto& e : action_table()) w[static_cast<std::size_t>(e.id)] = static_cast<double>(e.count);
  } else {
    for (const auto& [id, weight] : cfg.action_frequency_table) {
      if (id < 0 || id >= kNumActions)
        throw ConfigError("action_frequency_table id out of range: " + std::to_string(id));
      if (weight < 0.0) throw ConfigError("action_frequency_table weights must be >= 0");
      w[static_cast<std::size_t>(id)] = weight;
    }
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  if (!(sum > 0.0)) throw ConfigError("action_frequency_table weights must have positive sum");
  return w;
}

double dose_for_level(int level, const std::array<double, 3>& cuts, Rng& rng) {
  const double u = std::max(rng.uniform(), 1e-9);
  switch (level) {
    case 1: return cuts[0] * (0.3 + 0.7 * u);
    case 2: return cuts[0] + (cuts[1] - cuts[0]) * u;
    case 3: return cuts[1] + (cuts[2] - cuts[1]) * u;
    default: return cuts[2] * (1.0 + 0.6 * u);
  }
}

double normalized_deviation(double x, double lo, double hi) {
  return (std::max(0.0, x - hi) + std::max(0.0, lo - x)) / (hi - lo);
}

struct PatientDraft {
  PatientRecord record;
  double hazard_z = 0.0;
};

PatientDraft generate_patient(const SynthConfig& cfg, const std::vector<double>& weights,
                              std::int64_t index) {
  Rng rng(derive_seed(cfg.seed, "patient", static_cast<std::uint64_t>(index)));
  const QuantileThresholds cuts;  // canonical 4-hourly thresholds

  PatientDraft draft;
  PatientRecord& rec = draft.record;
  char id_buf[32];
  std::snprintf(id_buf, sizeof(id_buf), "synth-%06lld", static_cast<long long>(index));
  rec.patient_id = id_buf;

  rec.age = std::clamp(rng.normal(cfg.mean_age, 15.5), 18.0, 95.0);
  rec.gender = rng.bernoulli(cfg.female_fraction) ? 1 : 0;
  rec.height_cm = std::clamp(rec.gender ? rng.normal(161.5, 7.0) : rng.normal(175.0, 7.5), 140.0, 205.0);
  const double bmi = std::clamp(rng.normal(28.5, 6.5), 16.0, 62.0);
  rec.weight_kg = bmi * (rec.height_cm / 100.0) * (rec.height_cm / 100.0);
  rec.icu_readmission = rng.bernoulli(0.12) ? 1 : 0;
  rec.burns = rng.bernoulli(0.02) ? 1 : 0;
  rec.ckd = rng.bernoulli(0.17) ? 1 : 0;
  rec.diabetes = rng.bernoulli(0.28) ? 1 : 0;
  rec.sepsis = rng.bernoulli(0.38) ? 1 : 0;
  rec.trauma = rng.bernoulli(0.12) ? 1 : 0;
  rec.elixhauser_score = static_cast<int>(std::clamp(std::round(rng.normal(8.0, 6.0)), 0.0, 31.0));

  // Stay length (lognormal around the target mean) and grid placement; EN
  // starts within the first 48 hours.
  const double sigma = 0.55;
  const double mu = std::log(std::max(cfg.mean_stay_hours, 12.0)) - 0.5 * sigma * sigma;
  const double stay_hours = std::exp(rng.normal(mu, sigma));
  const int start_index = static_cast<int>(rng.uniform_index(13));
  const int max_windows = kMaxWindowIndex + 1 - start_index;
  const int n_windows =
      std::clamp(static_cast<int>(std::llround(stay_hours / kWindowHours)), 3, max_windows);

  const bool crrt = rng.bernoulli(rec.ckd ? 0.22 : 0.03);
  const bool mech_vent = rng.bernoulli(0.60);
  const double follow_prob = rng.uniform(kFollowLo, kFollowHi);
  const double effect = cfg.effect_strength;

  // Latent severity and its random walk.
  const double sev0 = std::clamp(std::abs(rng.normal(0.55, 0.30)), 0.05, 1.5);
  double sev = sev0;

  auto draw_need = [&] {
    return decode_action(static_cast<int>(rng.discrete(weights)));
  };
  ActionCode need = draw_need();

  // Causal-core state.
  double glucose = std::clamp(rng.normal(162.0, 16.0), 60.0, 400.0);
  double phosphate = std::clamp(rng.normal(3.4, 0.5), 0.8, 9.0);
  double lactate = std::clamp(rng.normal(1.2 + 1.7 * sev, 0.4), 0.3, 20.0);
  double urine = std::clamp(rng.normal(140.0, 30.0), 5.0, 600.0);
  double sofa = std::clamp(std::round(2.0 + 9.0 * sev0 + rng.normal(0.0, 1.5)), 0.0, 24.0);
  double gcs = std::clamp(std::round(14.0 - 4.0 * sev0 + rng.normal(0.0, 1.0)), 3.0, 15.0);

  std::array<double, kNumWindowVars> prev_values{};
  double prev_mc = 0.0, prev_mp = 0.0, prev_mw = 0.0;  // last window's mismatches
  DoseTriple prev_dose{};
  double cum_cal = 0.0, cum_pro = 0.0;
  std::vector<double> insulin_history;

  double sum_sofa = 0.0, sum_sev = 0.0, sum_dev = 0.0;

  rec.windows.reserve(static_cast<std::size_t>(n_windows));
  for (int w = 0; w < n_windows; ++w) {
    TimeWindow win;
    win.t_index = start_index + w;
    auto& v = win.values;

    sev = std::clamp(sev + 0.10 * (sev0 - sev) + rng.normal(0.0, 0.06), 0.02, 1.8);
    const double prev_mismatch_mag = (std::abs(prev_mc) + std::abs(prev_mp) + std::abs(prev_mw)) / 3.0;

    if (w > 0) {
      const double sofa_drift =
          0.5 * (sev - 0.55) + effect * 0.25 * prev_mismatch_mag - 0.08;
      sofa = std::clamp(sofa + std::round(rng.normal(sofa_drift, 0.8)), 0.0, 24.0);
      gcs = std::clamp(gcs + std::round(rng.normal(-0.25 * (sev - 0.55), 0.6)), 3.0, 15.0);

      const double glucose_eq = 160.0 + effect * kGlucosePerLevel * prev_mc +
                                5.0 * (sev - 0.55) -
                                kInsulinGlucoseDrop * prev_values[wvar::kInsulinDose];
      glucose = std::clamp(glucose + 0.55 * (glucose_eq - glucose) + rng.normal(0.0, 7.0), 40.0, 600.0);

      const double phosphate_eq = 3.5 + effect * kPhosphatePerLevel * prev_mp -
                                  0.35 * (crrt ? 1.0 : 0.0) + 0.25 * (sev - 0.55);
      phosphate =
          std::clamp(phosphate + 0.5 * (phosphate_eq - phosphate) + rng.normal(0.0, 0.22), 0.3, 12.0);

      const double lactate_eq = 1.2 + 1.7 * sev + effect * 0.45 * prev_mismatch_mag;
      lactate = std::clamp(lactate + 0.45 * (lactate_eq - lactate) + rng.normal(0.0, 0.15), 0.3, 20.0);

      const double urine_eq = 140.0 + effect * kUrinePerLevel * prev_mw - 45.0 * (sev - 0.55);
      urine = std::clamp(0.5 * urine + 0.5 * urine_eq + rng.normal(0.0, 20.0), 5.0, 600.0);
    }

    v[wvar::kSofa] = sofa;
    v[wvar::kGcs] = gcs;
    v[wvar::kGlucose] = glucose;
    v[wvar::kPhosphate] = phosphate;
    v[wvar::kLactate] = lactate;
    v[wvar::kUrineOutput4h] = urine;

    for (const auto& m : kVarModels) {
      const double eq = m.base + m.sev_coef * sev;
      const double prev = w == 0 ? eq : prev_values[m.wv];
      v[m.wv] = std::clamp(prev + m.ar * (eq - prev) + rng.normal(0.0, m.sd), m.lo, m.hi);
    }

    v[wvar::kFio2] = std::clamp(0.40 + 0.20 * sev + rng.normal(0.0, 0.04), 0.21, 1.0);
    v[wvar::kPfRatio] = v[wvar::kPao2] / v[wvar::kFio2];
    v[wvar::kShockIndex] = v[wvar::kHr] / v[wvar::kSbp];
    v[wvar::kMechVent] = mech_vent ? 1.0 : 0.0;
    v[wvar::kCrrt] = crrt ? 1.0 : 0.0;
    v[wvar::kVasopressorDose] =
        std::max(0.0, (sev - 0.5) * 0.25 + rng.normal(0.0, 0.05));
    v[wvar::kTotalOutput] = urine * 1.15 + std::abs(rng.normal(15.0, 10.0));

    const double insulin =
        std::max(0.0, (glucose - 185.0) / 30.0) * (rec.diabetes ? 1.3 : 1.0) +
        std::max(0.0, rng.normal(0.0, 0.2));
    v[wvar::kInsulinDose] = std::min(insulin, 20.0);
    insulin_history.push_back(v[wvar::kInsulinDose]);
    double insulin_24h = 0.0;
    const std::size_t lookback = std::min<std::size_t>(insulin_history.size(), kWindowsPerDay);
    for (std::size_t k = insulin_history.size() - lookback; k < insulin_history.size(); ++k)
      insulin_24h += insulin_history[k];
    v[wvar::kInsulin24h] = insulin_24h;

    v[wvar::kPrevCalories] = prev_dose.calories;
    v[wvar::kPrevProtein] = prev_dose.protein;
    v[wvar::kPrevWater] = prev_dose.water;
    v[wvar::kCumCalories] = cum_cal;
    v[wvar::kCumProtein] = cum_pro;
    v[wvar::kTimeSinceEnInit] = static_cast<double>(w * kWindowHours);

    // Clinician action: follow the current need or fall back to the marginal.
    if (w > 0 && rng.bernoulli(kNeedResampleProb)) need = draw_need();
    const ActionCode dosed = rng.bernoulli(follow_prob)
                                 ? need
                                 : decode_action(static_cast<int>(rng.discrete(weights)));
    win.dose.calories = dose_for_level(dosed.cal_level, cuts.calories, rng);
    win.dose.protein = dose_for_level(dosed.pro_level, cuts.protein, rng);
    win.dose.water = dose_for_level(dosed.water_level, cuts.water, rng);

    prev_mc = dosed.cal_level - need.cal_level;
    prev_mp = dosed.pro_level - need.pro_level;
    prev_mw = dosed.water_level - need.water_level;
    prev_dose = win.dose;
    cum_cal += win.dose.calories;
    cum_pro += win.dose.protein;

    sum_sofa += sofa;
    sum_sev += sev;
    sum_dev += normalized_deviation(glucose, kGlucoseTargetLo, kGlucoseTargetHi) +
               normalized_deviation(phosphate, kPhosphateTargetLo, kPhosphateTargetHi) +
               effect * 0.35 * std::abs(prev_mw);

    prev_values = v;

    // Mask a fraction of the continuous vitals and labs.
    if (cfg.missingness_rate > 0.0) {
      for (int wv = 0; wv < kNumWindowVars; ++wv)
        if (window_var_maskable(wv) && rng.bernoulli(cfg.missingness_rate))
          win.values[wv] = std::nan("");
    }

    rec.windows.push_back(win);
  }

  const double n = static_cast<double>(n_windows);
  draft.hazard_z = kHazardSofa * (sum_sofa / n) / 6.0 + kHazardSeverity * (sum_sev / n) +
                   kHazardDeviation * (sum_dev / n);
  return draft;
}

}  // namespace

std::vector<PatientRecord> generate_cohort(const SynthConfig& cfg) {
  if (cfg.n_patients < 0) throw ConfigError("n_patients must be >= 0");
  if (cfg.mortality_rate_target < 0.0 || cfg.mortality_rate_target > 1.0)
    throw ConfigError("mortality_rate_target must be in [0, 1]");
  if (cfg.female_fraction < 0.0 || cfg.female_fraction > 1.0)
    throw ConfigError("female_fraction must be in [0, 1]");
  if (cfg.effect_strength < 0.0) throw ConfigError("effect_strength must be >= 0");
  if (cfg.missingness_rate < 0.0 || cfg.missingness_rate >= 1.0)
    throw ConfigError("missingness_rate must be in [0, 1)");
  if (!(cfg.mean_stay_hours > 0.0)) throw ConfigError("mean_stay_hours must be > 0");

  const auto weights = table_weights(cfg);

  std::vector<PatientDraft> drafts;
  drafts.reserve(static_cast<std::size_t>(cfg.n_patients));
  for (std::int64_t i = 0; i < cfg.n_patients; ++i)
    drafts.push_back(generate_patient(cfg, weights, i));

  // Calibrate the hazard intercept so the mean death probability matches the
  // target, then draw outcomes from per-patient substreams.
  if (!drafts.empty() && cfg.mortality_rate_target > 0.0 && cfg.mortality_rate_target < 1.0) {
    double lo = -30.0, hi = 30.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double b0 = 0.5 * (lo + hi);
      double mean_p = 0.0;
      for (const auto& d : drafts) mean_p += 1.0 / (1.0 + std::exp(-(b0 + d.hazard_z)));
      mean_p /= static_cast<double>(drafts.size());
      (mean_p < cfg.mortality_rate_target ? lo : hi) = b0;
    }
    const double b0 = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      Rng mrng(derive_seed(cfg.seed, "mortality", static_cast<std::uint64_t>(i)));
      const double p = 1.0 / (1.0 + std::exp(-(b0 + drafts[i].hazard_z)));
      drafts[i].record.mortality = mrng.bernoulli(p) ? 1 : 0;
    }
  } else {
    for (auto& d : drafts) d.record.mortality = cfg.mortality_rate_target >= 1.0 ? 1 : 0;
  }

  std::vector<PatientRecord> out;
  out.reserve(drafts.size());
  for (auto& d : drafts) out.push_back(std::move(d.record));
  return out;
}

}  // namespace deepen
