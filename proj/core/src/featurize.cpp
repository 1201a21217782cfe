#include "deepen/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepen/action_codec.hpp"
#include "deepen/errors.hpp"
#include "deepen/rng.hpp"
#include "deepen/stats.hpp"
#include "deepen/validation.hpp"

namespace deepen {

std::vector<std::size_t> TransitionDataset::split_indices(bool train) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    if (trajectories[i].meta.is_train == train) out.push_back(i);
  return out;
}

std::size_t TransitionDataset::transition_count(bool train) const {
  std::size_t n = 0;
  for (const auto& t : trajectories)
    if (t.meta.is_train == train) n += t.size();
  return n;
}

double rate_of_change(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return 0.0;
  const std::size_t k = std::min<std::size_t>(3, n - 1);
  return (series[n - 1] - series[n - 1 - k]) / static_cast<double>(k);
}

void interpolate_series(std::span<double> values) {
  const std::size_t n = values.size();
  std::size_t first = n, last = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isnan(values[i])) {
      if (first == n) first = i;
      last = i;
    }
  }
  if (first == n) {
    std::fill(values.begin(), values.end(), 0.0);
    return;
  }
  for (std::size_t i = 0; i < first; ++i) values[i] = values[first];
  for (std::size_t i = last + 1; i < n; ++i) values[i] = values[last];
  std::size_t prev = first;
  for (std::size_t i = first + 1; i <= last; ++i) {
    if (std::isnan(values[i])) continue;
    if (i > prev + 1) {
      const double step = (values[i] - values[prev]) / static_cast<double>(i - prev);
      for (std::size_t j = prev + 1; j < i; ++j)
        values[j] = values[prev] + step * static_cast<double>(j - prev);
    }
    prev = i;
  }
}

namespace {

struct ImputedRecord {
  const PatientRecord* record;
  // column-major: per window variable, one series across windows
  std::vector<std::vector<double>> series;  // [kNumWindowVars][n_windows]
};

ImputedRecord impute(const PatientRecord& rec) {
  ImputedRecord out{&rec, {}};
  out.series.assign(kNumWindowVars, std::vector<double>(rec.windows.size()));
  for (int wv = 0; wv < kNumWindowVars; ++wv) {
    auto& s = out.series[static_cast<std::size_t>(wv)];
    for (std::size_t i = 0; i < rec.windows.size(); ++i) s[i] = rec.windows[i].values[wv];
    interpolate_series(s);
  }
  return out;
}

// Raw (unnormalized) feature row for one window, including rate-of-change
// features computed on the trailing samples of each designated variable.
void raw_feature_row(const ImputedRecord& imp, std::size_t w, std::span<double> out) {
  const PatientRecord& rec = *imp.record;
  out[pvar::kAge] = rec.age;
  out[pvar::kGender] = rec.gender;
  out[pvar::kWeight] = rec.weight_kg;
  out[pvar::kIcuReadmission] = rec.icu_readmission;
  out[pvar::kBurns] = rec.burns;
  out[pvar::kCkd] = rec.ckd;
  out[pvar::kDiabetes] = rec.diabetes;
  out[pvar::kSepsis] = rec.sepsis;
  out[pvar::kTrauma] = rec.trauma;
  out[pvar::kElixhauser] = rec.elixhauser_score;
  for (int wv = 0; wv < kNumWindowVars; ++wv)
    out[static_cast<std::size_t>(kNumPatientFeatures + wv)] = imp.series[static_cast<std::size_t>(wv)][w];

  const auto& roc_bases = roc_base_feature_indices();
  for (int r = 0; r < kNumRocFeatures; ++r) {
    const int base = roc_bases[static_cast<std::size_t>(r)];
    double roc;
    if (base < kNumPatientFeatures) {
      roc = 0.0;  // patient-level fields are constant within a stay
    } else {
      const auto& s = imp.series[static_cast<std::size_t>(base - kNumPatientFeatures)];
      const std::size_t lo = w >= 3 ? w - 3 : 0;
      roc = rate_of_change(std::span<const double>(s).subspan(lo, w - lo + 1));
    }
    out[static_cast<std::size_t>(kNumBaseFeatures + r)] = roc;
  }
}

QuantileThresholds refit_thresholds_from(const std::vector<ImputedRecord>& records,
                                         const std::vector<bool>& is_train) {
  std::vector<double> cal, pro, wat;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!is_train[i]) continue;
    for (const auto& w : records[i].record->windows) {
      cal.push_back(w.dose.calories);
      pro.push_back(w.dose.protein);
      wat.push_back(w.dose.water);
    }
  }
  if (cal.empty()) throw DataError("cannot refit thresholds: empty training split");
  QuantileThresholds t;
  for (int q = 0; q < 3; ++q) {
    const double p = 25.0 * (q + 1);
    t.calories[q] = percentile(cal, p);
    t.protein[q] = percentile(pro, p);
    t.water[q] = percentile(wat, p);
  }
  return t;
}

}  // namespace

TransitionDataset build_transitions(const std::vector<PatientRecord>& records,
                                    const FeaturizeOptions& options,
                                    const RewardConfig& reward_cfg,
                                    FeaturizeLog* log) {
  FeaturizeLog local_log;
  FeaturizeLog& flog = log ? *log : local_log;

  std::vector<ImputedRecord> usable;
  usable.reserve(records.size());
  for (const auto& rec : records) {
    auto violations = validate_record(rec);
    if (!violations.empty())
      throw DataError("record " + rec.patient_id + " fails validation: " + violations.front().message());
    if (rec.windows.size() < 2) {
      flog.excluded.push_back({rec.patient_id, "fewer than 2 windows after windowing"});
      continue;
    }
    usable.push_back(impute(rec));
  }

  // 80/20 split by patient under the recorded seed.
  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(derive_seed(options.split_seed, "patient-split"));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(split_rng.uniform_index(i))]);
  const auto n_train =
      static_cast<std::size_t>(std::llround(options.train_fraction * static_cast<double>(usable.size())));
  std::vector<bool> is_train(usable.size(), false);
  for (std::size_t i = 0; i < usable.size(); ++i) is_train[order[i]] = i < n_train;

  TransitionDataset ds;
  ds.manifest = make_default_manifest();
  ds.manifest.split_seed = options.split_seed;
  ds.manifest.action_thresholds =
      options.refit_thresholds ? refit_thresholds_from(usable, is_train) : options.thresholds;

  // Raw state rows, actions and rewards per trajectory.
  ds.trajectories.reserve(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    const ImputedRecord& imp = usable[i];
    const PatientRecord& rec = *imp.record;
    const std::size_t n = rec.windows.size();

    FeaturizedTrajectory traj;
    traj.meta = {rec.patient_id, rec.weight_kg, rec.height_cm, rec.gender,
                 rec.burns,      rec.ckd,       rec.mortality, is_train[i]};
    traj.states.resize(n * kNumFeatures);
    traj.actions.resize(n);
    traj.rewards.resize(n);
    traj.aux.resize(n);

    for (std::size_t w = 0; w < n; ++w) {
      raw_feature_row(imp, w, {traj.states.data() + w * kNumFeatures, kNumFeatures});

      ActionCode code = discretize_dose(rec.windows[w].dose, ds.manifest.action_thresholds);
      if (!code.observed()) {
        traj.actions[w] = nearest_observed_action(code.cal_level, code.pro_level, code.water_level);
        ++flog.unobserved_actions_remapped;
      } else {
        traj.actions[w] = *code.id;
      }

      const bool terminal = w + 1 == n;
      RewardInputs rin;
      rin.terminal = terminal;
      rin.mortality = rec.mortality;
      if (!terminal) {
        rin.sofa_t = imp.series[wvar::kSofa][w];
        rin.sofa_t1 = imp.series[wvar::kSofa][w + 1];
        rin.lactate_t = imp.series[wvar::kLactate][w];
        rin.lactate_t1 = imp.series[wvar::kLactate][w + 1];
        rin.glucose_t = imp.series[wvar::kGlucose][w];
        rin.glucose_t1 = imp.series[wvar::kGlucose][w + 1];
        rin.phosphate_t = imp.series[wvar::kPhosphate][w];
        rin.phosphate_t1 = imp.series[wvar::kPhosphate][w + 1];
      }
      traj.rewards[w] = total_reward(rin, reward_cfg);

      StepAux& aux = traj.aux[w];
      aux.icu_day = rec.windows[w].t_index / kWindowsPerDay + 1;
      aux.feeding_day = static_cast<int>(w) / kWindowsPerDay + 1;
      aux.crrt = imp.series[wvar::kCrrt][w] > 0.5 ? 1 : 0;
      aux.glucose_next = terminal ? std::nan("") : imp.series[wvar::kGlucose][w + 1];
      aux.phosphate_next = terminal ? std::nan("") : imp.series[wvar::kPhosphate][w + 1];
    }
    ds.trajectories.push_back(std::move(traj));
  }

  // Normalization statistics over training-split transitions only.
  std::vector<double> means(kNumFeatures, 0.0), stds(kNumFeatures, 0.0);
  std::size_t n_train_rows = 0;
  for (const auto& traj : ds.trajectories) {
    if (!traj.meta.is_train) continue;
    n_train_rows += traj.size();
  }
  if (n_train_rows > 0) {
    for (const auto& traj : ds.trajectories) {
      if (!traj.meta.is_train) continue;
      for (std::size_t w = 0; w < traj.size(); ++w) {
        const auto row = traj.state(w);
        for (int f = 0; f < kNumFeatures; ++f) means[f] += row[f];
      }
    }
    for (int f = 0; f < kNumFeatures; ++f) means[f] /= static_cast<double>(n_train_rows);
    for (const auto& traj : ds.trajectories) {
      if (!traj.meta.is_train) continue;
      for (std::size_t w = 0; w < traj.size(); ++w) {
        const auto row = traj.state(w);
        for (int f = 0; f < kNumFeatures; ++f) {
          const double d = row[f] - means[f];
          stds[f] += d * d;
        }
      }
    }
    for (int f = 0; f < kNumFeatures; ++f)
      stds[f] = std::sqrt(stds[f] / static_cast<double>(n_train_rows));
  }
  // Zero-variance features would divide by zero; force their std to 1.
  for (int f = 0; f < kNumFeatures; ++f)
    if (!(stds[f] > 0.0)) stds[f] = 1.0;
  ds.manifest.feature_means = means;
  ds.manifest.feature_stds = stds;

  for (auto& traj : ds.trajectories) {
    for (std::size_t w = 0; w < traj.size(); ++w) {
      double* row = traj.states.data() + w * kNumFeatures;
      for (int f = 0; f < kNumFeatures; ++f) row[f] = (row[f] - means[f]) / stds[f];
    }
    auto& c = ds.manifest.counts;
    (traj.meta.is_train ? c.train_patients : c.test_patients) += 1;
    (traj.meta.is_train ? c.train_transitions : c.test_transitions) +=
        static_cast<std::int64_t>(traj.size());
  }

  return ds;
}

Transition make_transition(const FeaturizedTrajectory& traj, std::size_t t) {
  Transition tr;
  const auto s = traj.state(t);
  tr.state.assign(s.begin(), s.end());
  tr.action = traj.actions[t];
  tr.reward = traj.rewards[t];
  tr.terminal = traj.terminal(t);
  tr.mortality = tr.terminal ? traj.meta.mortality : 0;
  if (!tr.terminal) {
    const auto ns = traj.next_state(t);
    tr.next_state = std::vector<double>(ns.begin(), ns.end());
  }
  return tr;
}

}  // namespace deepen
