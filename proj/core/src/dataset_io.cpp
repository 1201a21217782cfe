#include "deepen/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "deepen/errors.hpp"
#include "deepen/validation.hpp"

namespace deepen {

namespace {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

ordered_json dose_to_json(const DoseTriple& d) {
  return {{"calories", d.calories}, {"protein", d.protein}, {"water", d.water}};
}

DoseTriple dose_from_json(const json& j) {
  return {j.at("calories").get<double>(), j.at("protein").get<double>(),
          j.at("water").get<double>()};
}

// NaN marks a missing measurement and serializes as null.
ordered_json value_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double value_from_json(const json& j) {
  if (j.is_null()) return std::nan("");
  return j.get<double>();
}

ordered_json window_to_json(const TimeWindow& w) {
  ordered_json vars = ordered_json::object();
  const auto& names = window_var_names();
  for (int wv = 0; wv < kNumWindowVars; ++wv)
    vars[std::string(names[wv])] = value_or_null(w.values[wv]);
  return {{"t_index", w.t_index}, {"values", std::move(vars)},
          {"dose_administered", dose_to_json(w.dose)}};
}

TimeWindow window_from_json(const json& j) {
  TimeWindow w;
  w.t_index = j.at("t_index").get<int>();
  const auto& vars = j.at("values");
  const auto& names = window_var_names();
  for (int wv = 0; wv < kNumWindowVars; ++wv) {
    const std::string key(names[wv]);
    if (!vars.contains(key)) throw SchemaError("window missing variable '" + key + "'");
    w.values[wv] = value_from_json(vars.at(key));
  }
  w.dose = dose_from_json(j.at("dose_administered"));
  return w;
}

ordered_json record_to_json(const PatientRecord& r) {
  ordered_json j{{"patient_id", r.patient_id},
                 {"age", r.age},
                 {"gender", r.gender},
                 {"weight_kg", r.weight_kg},
                 {"height_cm", r.height_cm},
                 {"icu_readmission", r.icu_readmission},
                 {"burns", r.burns},
                 {"ckd", r.ckd},
                 {"diabetes", r.diabetes},
                 {"sepsis", r.sepsis},
                 {"trauma", r.trauma},
                 {"elixhauser_score", r.elixhauser_score},
                 {"mortality", r.mortality}};
  ordered_json windows = ordered_json::array();
  for (const auto& w : r.windows) windows.push_back(window_to_json(w));
  j["windows"] = std::move(windows);
  return j;
}

PatientRecord record_from_json(const json& j) {
  PatientRecord r;
  r.patient_id = j.at("patient_id").get<std::string>();
  r.age = j.at("age").get<double>();
  r.gender = j.at("gender").get<int>();
  r.weight_kg = j.at("weight_kg").get<double>();
  r.height_cm = j.at("height_cm").get<double>();
  r.icu_readmission = j.at("icu_readmission").get<int>();
  r.burns = j.at("burns").get<int>();
  r.ckd = j.at("ckd").get<int>();
  r.diabetes = j.at("diabetes").get<int>();
  r.sepsis = j.at("sepsis").get<int>();
  r.trauma = j.at("trauma").get<int>();
  r.elixhauser_score = j.at("elixhauser_score").get<int>();
  r.mortality = j.at("mortality").get<int>();
  for (const auto& w : j.at("windows")) r.windows.push_back(window_from_json(w));
  return r;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path);
  return in;
}

}  // namespace

void write_manifest(const std::string& path, const DatasetManifest& m) {
  ordered_json j;
  j["format"] = "deepen-manifest";
  j["version"] = 1;
  j["config_hash"] = m.config_hash;
  j["feature_names"] = m.feature_names;
  if (m.has_stats()) {
    j["feature_means"] = m.feature_means;
    j["feature_stds"] = m.feature_stds;
  } else {
    j["feature_means"] = nullptr;
    j["feature_stds"] = nullptr;
  }
  j["action_thresholds"] = {{"calories", m.action_thresholds.calories},
                            {"protein", m.action_thresholds.protein},
                            {"water", m.action_thresholds.water}};
  j["split_seed"] = m.split_seed;
  j["counts"] = {{"train_patients", m.counts.train_patients},
                 {"test_patients", m.counts.test_patients},
                 {"train_transitions", m.counts.train_transitions},
                 {"test_transitions", m.counts.test_transitions}};
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("manifest parse error in " + path + ": " + e.what());
  }
  DatasetManifest m;
  if (j.value("format", "") != "deepen-manifest")
    throw SchemaError("not a deepen manifest: " + path);
  m.config_hash = j.value("config_hash", "");
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  if (m.feature_names.size() != static_cast<std::size_t>(kNumFeatures))
    throw SchemaError("manifest declares " + std::to_string(m.feature_names.size()) +
                      " features, expected " + std::to_string(kNumFeatures));
  if (m.feature_names != feature_names())
    throw SchemaError("manifest feature names do not match the canonical order");
  if (!j.at("feature_means").is_null()) {
    m.feature_means = j.at("feature_means").get<std::vector<double>>();
    m.feature_stds = j.at("feature_stds").get<std::vector<double>>();
    if (m.feature_means.size() != static_cast<std::size_t>(kNumFeatures) ||
        m.feature_stds.size() != static_cast<std::size_t>(kNumFeatures))
      throw SchemaError("manifest stats length mismatch");
    for (double s : m.feature_stds)
      if (!(s > 0.0)) throw SchemaError("manifest stds must all be > 0");
  }
  const auto& t = j.at("action_thresholds");
  m.action_thresholds.calories = t.at("calories").get<std::array<double, 3>>();
  m.action_thresholds.protein = t.at("protein").get<std::array<double, 3>>();
  m.action_thresholds.water = t.at("water").get<std::array<double, 3>>();
  m.split_seed = j.at("split_seed").get<std::uint64_t>();
  const auto& c = j.at("counts");
  m.counts.train_patients = c.at("train_patients").get<std::int64_t>();
  m.counts.test_patients = c.at("test_patients").get<std::int64_t>();
  m.counts.train_transitions = c.at("train_transitions").get<std::int64_t>();
  m.counts.test_transitions = c.at("test_transitions").get<std::int64_t>();
  return m;
}

void write_cohort(const std::string& path, const std::vector<PatientRecord>& records) {
  auto out = open_out(path);
  for (const auto& r : records) out << record_to_json(r).dump() << "\n";
}

std::pair<std::vector<PatientRecord>, DatasetManifest> read_dataset(
    const std::string& dataset_path, const std::string& manifest_path) {
  DatasetManifest manifest = read_manifest(manifest_path);
  auto in = open_in(dataset_path);
  std::vector<PatientRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    PatientRecord rec;
    try {
      rec = record_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed record: ") + e.what(), line_no);
    }
    auto violations = validate_record(rec);
    if (!violations.empty())
      throw DataError("record '" + rec.patient_id + "' invalid: " + violations.front().message(),
                      line_no);
    records.push_back(std::move(rec));
  }
  return {std::move(records), std::move(manifest)};
}

void write_dataset(const std::string& dataset_path, const std::string& manifest_path,
                   const std::vector<PatientRecord>& records, const DatasetManifest& manifest) {
  write_cohort(dataset_path, records);
  write_manifest(manifest_path, manifest);
}

void write_transitions(const std::string& path, const TransitionDataset& dataset) {
  auto out = open_out(path);
  for (const auto& traj : dataset.trajectories) {
    ordered_json j{{"patient_id", traj.meta.patient_id},
                   {"is_train", traj.meta.is_train},
                   {"mortality", traj.meta.mortality},
                   {"weight_kg", traj.meta.weight_kg},
                   {"height_cm", traj.meta.height_cm},
                   {"gender", traj.meta.gender},
                   {"burns", traj.meta.burns},
                   {"ckd", traj.meta.ckd}};
    ordered_json steps = ordered_json::array();
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const auto s = traj.state(t);
      ordered_json step{{"action", traj.actions[t]},
                        {"reward", traj.rewards[t]},
                        {"icu_day", traj.aux[t].icu_day},
                        {"feeding_day", traj.aux[t].feeding_day},
                        {"crrt", traj.aux[t].crrt},
                        {"glucose_next", value_or_null(traj.aux[t].glucose_next)},
                        {"phosphate_next", value_or_null(traj.aux[t].phosphate_next)},
                        {"state", std::vector<double>(s.begin(), s.end())}};
      steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    out << j.dump() << "\n";
  }
}

TransitionDataset read_transitions(const std::string& path, const std::string& manifest_path) {
  TransitionDataset ds;
  ds.manifest = read_manifest(manifest_path);
  if (!ds.manifest.has_stats())
    throw SchemaError("transitions manifest has no normalization statistics: " + manifest_path);
  auto in = open_in(path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    FeaturizedTrajectory traj;
    try {
      const json j = json::parse(line);
      traj.meta.patient_id = j.at("patient_id").get<std::string>();
      traj.meta.is_train = j.at("is_train").get<bool>();
      traj.meta.mortality = j.at("mortality").get<int>();
      traj.meta.weight_kg = j.at("weight_kg").get<double>();
      traj.meta.height_cm = j.at("height_cm").get<double>();
      traj.meta.gender = j.at("gender").get<int>();
      traj.meta.burns = j.at("burns").get<int>();
      traj.meta.ckd = j.at("ckd").get<int>();
      const auto& steps = j.at("steps");
      traj.states.reserve(steps.size() * kNumFeatures);
      for (const auto& step : steps) {
        const auto state = step.at("state").get<std::vector<double>>();
        if (state.size() != static_cast<std::size_t>(kNumFeatures))
          throw SchemaError("state vector length " + std::to_string(state.size()) +
                            ", expected " + std::to_string(kNumFeatures));
        traj.states.insert(traj.states.end(), state.begin(), state.end());
        traj.actions.push_back(step.at("action").get<int>());
        traj.rewards.push_back(step.at("reward").get<double>());
        StepAux aux;
        aux.icu_day = step.at("icu_day").get<int>();
        aux.feeding_day = step.at("feeding_day").get<int>();
        aux.crrt = step.at("crrt").get<int>();
        aux.glucose_next = value_from_json(step.at("glucose_next"));
        aux.phosphate_next = value_from_json(step.at("phosphate_next"));
        traj.aux.push_back(aux);
      }
    } catch (const SchemaError&) {
      throw;
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed trajectory: ") + e.what(), line_no);
    }
    if (traj.actions.empty()) throw DataError("trajectory with no steps", line_no);
    for (int a : traj.actions)
      if (a < 0 || a >= kNumActions) throw DataError("action id out of range", line_no);
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

}  // namespace deepen
