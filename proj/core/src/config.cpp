#include "deepen/config.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>

#include "deepen/errors.hpp"
#include "deepen/rng.hpp"

namespace deepen {

namespace {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& section) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown config key: " + (section.empty() ? key : section + "." + key));
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).template get<T>();
}

void parse_synth(const json& j, SynthConfig& cfg) {
  reject_unknown_keys(j,
                      {"n_patients", "seed", "mortality_rate_target", "mean_stay_hours",
                       "female_fraction", "mean_age", "action_frequency_table", "effect_strength",
                       "missingness_rate"},
                      "synth");
  maybe(j, "n_patients", cfg.n_patients);
  maybe(j, "seed", cfg.seed);
  maybe(j, "mortality_rate_target", cfg.mortality_rate_target);
  maybe(j, "mean_stay_hours", cfg.mean_stay_hours);
  maybe(j, "female_fraction", cfg.female_fraction);
  maybe(j, "mean_age", cfg.mean_age);
  maybe(j, "effect_strength", cfg.effect_strength);
  maybe(j, "missingness_rate", cfg.missingness_rate);
  if (j.contains("action_frequency_table")) {
    for (const auto& [key, value] : j.at("action_frequency_table").items())
      cfg.action_frequency_table[std::stoi(key)] = value.get<double>();
  }
}

std::array<double, 3> parse_cuts(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError(std::string(what) + " must have exactly 3 cut-points");
  if (!(v[0] < v[1] && v[1] < v[2]))
    throw ConfigError(std::string(what) + " cut-points must be strictly increasing");
  return {v[0], v[1], v[2]};
}

void parse_featurize(const json& j, FeaturizeOptions& cfg) {
  reject_unknown_keys(j, {"train_fraction", "split_seed", "refit_thresholds", "thresholds"},
                      "featurize");
  maybe(j, "train_fraction", cfg.train_fraction);
  maybe(j, "split_seed", cfg.split_seed);
  maybe(j, "refit_thresholds", cfg.refit_thresholds);
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    reject_unknown_keys(t, {"calories", "protein", "water"}, "featurize.thresholds");
    if (t.contains("calories")) cfg.thresholds.calories = parse_cuts(t.at("calories"), "calories");
    if (t.contains("protein")) cfg.thresholds.protein = parse_cuts(t.at("protein"), "protein");
    if (t.contains("water")) cfg.thresholds.water = parse_cuts(t.at("water"), "water");
  }
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw ConfigError("featurize.train_fraction must be in (0, 1)");
}

std::array<double, 2> parse_range(const json& j, const char* what) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2 || !(v[0] < v[1]))
    throw ConfigError(std::string(what) + " must be [min, max] with min < max");
  return {v[0], v[1]};
}

void parse_reward(const json& j, RewardConfig& cfg) {
  reject_unknown_keys(j,
                      {"r_terminal", "c0", "c1", "c2", "epsilon", "lambda_glucose",
                       "lambda_phosphate", "glucose_range", "phosphate_range"},
                      "reward");
  maybe(j, "r_terminal", cfg.r_terminal);
  maybe(j, "c0", cfg.c0);
  maybe(j, "c1", cfg.c1);
  maybe(j, "c2", cfg.c2);
  maybe(j, "epsilon", cfg.epsilon);
  maybe(j, "lambda_glucose", cfg.lambda_glucose);
  maybe(j, "lambda_phosphate", cfg.lambda_phosphate);
  if (j.contains("glucose_range")) cfg.glucose_range = parse_range(j.at("glucose_range"), "reward.glucose_range");
  if (j.contains("phosphate_range"))
    cfg.phosphate_range = parse_range(j.at("phosphate_range"), "reward.phosphate_range");
  for (double w : {cfg.c0, cfg.c1, cfg.c2, cfg.epsilon, cfg.lambda_glucose, cfg.lambda_phosphate})
    if (w < 0.0) throw ConfigError("reward weights must be >= 0");
}

void parse_train(const json& j, TrainConfig& cfg) {
  reject_unknown_keys(j,
                      {"alpha", "gamma", "learning_rate", "batch_size", "total_steps",
                       "target_sync_period", "eval_period", "seed", "cql_form", "hidden",
                       "alpha_grid", "gamma_grid", "behavior_floor", "smoothing_kappa"},
                      "train");
  maybe(j, "alpha", cfg.alpha);
  maybe(j, "gamma", cfg.gamma);
  maybe(j, "learning_rate", cfg.learning_rate);
  maybe(j, "batch_size", cfg.batch_size);
  maybe(j, "total_steps", cfg.total_steps);
  maybe(j, "target_sync_period", cfg.target_sync_period);
  maybe(j, "eval_period", cfg.eval_period);
  maybe(j, "seed", cfg.seed);
  maybe(j, "hidden", cfg.hidden);
  maybe(j, "alpha_grid", cfg.alpha_grid);
  maybe(j, "gamma_grid", cfg.gamma_grid);
  maybe(j, "behavior_floor", cfg.behavior_floor);
  maybe(j, "smoothing_kappa", cfg.smoothing_kappa);
  if (j.contains("cql_form")) cfg.cql_form = cql_form_from_name(j.at("cql_form").get<std::string>());
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ConfigError("train.gamma must be in (0, 1)");
  if (cfg.alpha < 0.0) throw ConfigError("train.alpha must be >= 0");
  if (cfg.batch_size <= 0) throw ConfigError("train.batch_size must be > 0");
  if (cfg.total_steps <= 0) throw ConfigError("train.total_steps must be > 0");
  if (cfg.target_sync_period <= 0 || cfg.eval_period <= 0)
    throw ConfigError("train periods must be > 0");
}

void parse_guideline(const json& j, GuidelineParams& g) {
  reject_unknown_keys(j,
                      {"cal_bmi_lt30", "cal_bmi_30to50", "cal_bmi_gt50", "early_feeding_factor",
                       "early_feeding_days", "protein_icu_day12", "protein_icu_day34",
                       "protein_stable_bmi_lt30", "protein_stable_bmi_30to40",
                       "protein_stable_bmi_gt40", "protein_burns", "protein_crrt",
                       "water_ml_per_kcal", "windows_per_day"},
                      "policies.guideline");
  maybe(j, "cal_bmi_lt30", g.cal_bmi_lt30);
  maybe(j, "cal_bmi_30to50", g.cal_bmi_30to50);
  maybe(j, "cal_bmi_gt50", g.cal_bmi_gt50);
  maybe(j, "early_feeding_factor", g.early_feeding_factor);
  maybe(j, "early_feeding_days", g.early_feeding_days);
  maybe(j, "protein_icu_day12", g.protein_icu_day12);
  maybe(j, "protein_icu_day34", g.protein_icu_day34);
  maybe(j, "protein_stable_bmi_lt30", g.protein_stable_bmi_lt30);
  maybe(j, "protein_stable_bmi_30to40", g.protein_stable_bmi_30to40);
  maybe(j, "protein_stable_bmi_gt40", g.protein_stable_bmi_gt40);
  maybe(j, "protein_burns", g.protein_burns);
  maybe(j, "protein_crrt", g.protein_crrt);
  maybe(j, "water_ml_per_kcal", g.water_ml_per_kcal);
  maybe(j, "windows_per_day", g.windows_per_day);
  for (double v : {g.cal_bmi_lt30, g.cal_bmi_30to50, g.cal_bmi_gt50, g.early_feeding_factor,
                   g.protein_icu_day12, g.protein_icu_day34, g.protein_stable_bmi_lt30,
                   g.protein_stable_bmi_30to40, g.protein_stable_bmi_gt40, g.protein_burns,
                   g.protein_crrt, g.water_ml_per_kcal})
    if (!(v > 0.0)) throw ConfigError("guideline parameters must be > 0");
}

void parse_policies(const json& j, std::vector<PolicySpec>& out) {
  out.clear();
  for (const auto& pj : j) {
    reject_unknown_keys(pj, {"kind", "checkpoint", "guideline"}, "policies[]");
    PolicySpec spec;
    spec.kind = policy_kind_from_name(pj.at("kind").get<std::string>());
    if (pj.contains("checkpoint")) spec.checkpoint_path = pj.at("checkpoint").get<std::string>();
    if (pj.contains("guideline")) parse_guideline(pj.at("guideline"), spec.guideline);
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw ConfigError("policies list must not be empty");
}

void parse_ope(const json& j, OpeOptions& cfg) {
  reject_unknown_keys(j,
                      {"gamma", "calibration_bins", "bootstrap_resamples", "behavior_floor",
                       "smoothing_kappa", "seed", "glucose_range", "phosphate_range"},
                      "ope");
  maybe(j, "gamma", cfg.gamma);
  maybe(j, "calibration_bins", cfg.calibration_bins);
  maybe(j, "bootstrap_resamples", cfg.bootstrap_resamples);
  maybe(j, "behavior_floor", cfg.behavior_floor);
  maybe(j, "smoothing_kappa", cfg.smoothing_kappa);
  maybe(j, "seed", cfg.seed);
  if (j.contains("glucose_range")) cfg.glucose_range = parse_range(j.at("glucose_range"), "ope.glucose_range");
  if (j.contains("phosphate_range"))
    cfg.phosphate_range = parse_range(j.at("phosphate_range"), "ope.phosphate_range");
  if (cfg.calibration_bins <= 0) throw ConfigError("ope.calibration_bins must be > 0");
  if (cfg.bootstrap_resamples < 0) throw ConfigError("ope.bootstrap_resamples must be >= 0");
}

}  // namespace

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.policies = {{PolicyKind::kRandom, "", {}},
                  {PolicyKind::kClinician, "", {}},
                  {PolicyKind::kBc, "", {}},
                  {PolicyKind::kGuideline, "", {}},
                  {PolicyKind::kDeepen, "", {}}};
  return cfg;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  reject_unknown_keys(
      j, {"seed", "out_dir", "synth", "featurize", "reward", "train", "policies", "ope"}, "");

  RunConfig cfg = default_run_config();
  maybe(j, "seed", cfg.seed);
  maybe(j, "out_dir", cfg.out_dir);

  // Sub-seeds default to substreams of the global seed.
  cfg.synth.seed = derive_seed(cfg.seed, "synth");
  cfg.featurize.split_seed = derive_seed(cfg.seed, "split");
  cfg.train.seed = derive_seed(cfg.seed, "train");
  cfg.ope.seed = derive_seed(cfg.seed, "ope");

  if (j.contains("synth")) parse_synth(j.at("synth"), cfg.synth);
  if (j.contains("featurize")) parse_featurize(j.at("featurize"), cfg.featurize);
  if (j.contains("reward")) parse_reward(j.at("reward"), cfg.reward);
  if (j.contains("train")) parse_train(j.at("train"), cfg.train);
  if (j.contains("policies")) parse_policies(j.at("policies"), cfg.policies);
  if (j.contains("ope")) parse_ope(j.at("ope"), cfg.ope);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string dump_run_config(const RunConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  ordered_json freq = ordered_json::object();
  for (const auto& [id, w] : cfg.synth.action_frequency_table) freq[std::to_string(id)] = w;
  j["synth"] = {{"n_patients", cfg.synth.n_patients},
                {"seed", cfg.synth.seed},
                {"mortality_rate_target", cfg.synth.mortality_rate_target},
                {"mean_stay_hours", cfg.synth.mean_stay_hours},
                {"female_fraction", cfg.synth.female_fraction},
                {"mean_age", cfg.synth.mean_age},
                {"action_frequency_table", std::move(freq)},
                {"effect_strength", cfg.synth.effect_strength},
                {"missingness_rate", cfg.synth.missingness_rate}};
  j["featurize"] = {{"train_fraction", cfg.featurize.train_fraction},
                    {"split_seed", cfg.featurize.split_seed},
                    {"refit_thresholds", cfg.featurize.refit_thresholds},
                    {"thresholds",
                     {{"calories", cfg.featurize.thresholds.calories},
                      {"protein", cfg.featurize.thresholds.protein},
                      {"water", cfg.featurize.thresholds.water}}}};
  j["reward"] = {{"r_terminal", cfg.reward.r_terminal},
                 {"c0", cfg.reward.c0},
                 {"c1", cfg.reward.c1},
                 {"c2", cfg.reward.c2},
                 {"epsilon", cfg.reward.epsilon},
                 {"lambda_glucose", cfg.reward.lambda_glucose},
                 {"lambda_phosphate", cfg.reward.lambda_phosphate},
                 {"glucose_range", cfg.reward.glucose_range},
                 {"phosphate_range", cfg.reward.phosphate_range}};
  j["train"] = {{"alpha", cfg.train.alpha},
                {"gamma", cfg.train.gamma},
                {"learning_rate", cfg.train.learning_rate},
                {"batch_size", cfg.train.batch_size},
                {"total_steps", cfg.train.total_steps},
                {"target_sync_period", cfg.train.target_sync_period},
                {"eval_period", cfg.train.eval_period},
                {"seed", cfg.train.seed},
                {"cql_form", std::string(cql_form_name(cfg.train.cql_form))},
                {"hidden", cfg.train.hidden},
                {"alpha_grid", cfg.train.alpha_grid},
                {"gamma_grid", cfg.train.gamma_grid},
                {"behavior_floor", cfg.train.behavior_floor},
                {"smoothing_kappa", cfg.train.smoothing_kappa}};
  ordered_json policies = ordered_json::array();
  for (const auto& spec : cfg.policies) {
    ordered_json pj{{"kind", std::string(policy_kind_name(spec.kind))}};
    if (!spec.checkpoint_path.empty()) pj["checkpoint"] = spec.checkpoint_path;
    if (spec.kind == PolicyKind::kGuideline) {
      const auto& g = spec.guideline;
      pj["guideline"] = {{"cal_bmi_lt30", g.cal_bmi_lt30},
                         {"cal_bmi_30to50", g.cal_bmi_30to50},
                         {"cal_bmi_gt50", g.cal_bmi_gt50},
                         {"early_feeding_factor", g.early_feeding_factor},
                         {"early_feeding_days", g.early_feeding_days},
                         {"protein_icu_day12", g.protein_icu_day12},
                         {"protein_icu_day34", g.protein_icu_day34},
                         {"protein_stable_bmi_lt30", g.protein_stable_bmi_lt30},
                         {"protein_stable_bmi_30to40", g.protein_stable_bmi_30to40},
                         {"protein_stable_bmi_gt40", g.protein_stable_bmi_gt40},
                         {"protein_burns", g.protein_burns},
                         {"protein_crrt", g.protein_crrt},
                         {"water_ml_per_kcal", g.water_ml_per_kcal},
                         {"windows_per_day", g.windows_per_day}};
    }
    policies.push_back(std::move(pj));
  }
  j["policies"] = std::move(policies);
  j["ope"] = {{"gamma", cfg.ope.gamma},
              {"calibration_bins", cfg.ope.calibration_bins},
              {"bootstrap_resamples", cfg.ope.bootstrap_resamples},
              {"behavior_floor", cfg.ope.behavior_floor},
              {"smoothing_kappa", cfg.ope.smoothing_kappa},
              {"seed", cfg.ope.seed},
              {"glucose_range", cfg.ope.glucose_range},
              {"phosphate_range", cfg.ope.phosphate_range}};
  return j.dump(2);
}

std::string config_hash(const RunConfig& cfg) {
  const std::uint64_t h = fnv1a64(dump_run_config(cfg));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_resolved_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << dump_run_config(cfg) << "\n";
}

}  // namespace deepen
