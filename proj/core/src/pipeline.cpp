#include "deepen/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "deepen/dataset_io.hpp"
#include "deepen/errors.hpp"
#include "deepen/validation.hpp"

namespace deepen {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void require_exists(const std::string& path) {
  if (!fs::exists(path)) throw MissingInputError(path);
}

void check_hash(const std::string& artifact_hash, const std::string& expected,
                const std::string& what, bool force) {
  if (force) return;
  if (artifact_hash != expected)
    throw ConfigError("config hash mismatch for " + what + ": artifact " + artifact_hash +
                      " vs run " + expected + " (use --force to override)");
}

// Formats a double for the flat tables.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string resolve_checkpoint(const PolicySpec& spec, const std::string& out_dir) {
  if (!spec.checkpoint_path.empty()) return spec.checkpoint_path;
  return join(out_dir, spec.kind == PolicyKind::kBc ? artifacts::kBcCheckpoint
                                                    : artifacts::kQCheckpoint);
}

}  // namespace

SynthSummary run_synth(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_resolved_config(join(out_dir, artifacts::kResolvedConfig), cfg);

  const auto records = generate_cohort(cfg.synth);
  for (const auto& rec : records) {
    const auto violations = validate_record(rec);
    if (!violations.empty())
      throw DataError("generated record " + rec.patient_id +
                      " fails validation: " + violations.front().message());
  }

  DatasetManifest manifest = make_default_manifest();
  manifest.action_thresholds = cfg.featurize.thresholds;
  manifest.split_seed = cfg.featurize.split_seed;
  manifest.config_hash = config_hash(cfg);
  manifest.counts.train_patients = static_cast<std::int64_t>(records.size());
  write_dataset(join(out_dir, artifacts::kCohort), join(out_dir, artifacts::kManifest), records,
                manifest);

  SynthSummary summary;
  summary.n_patients = static_cast<std::int64_t>(records.size());
  std::size_t deaths = 0, windows = 0;
  for (const auto& r : records) {
    deaths += static_cast<std::size_t>(r.mortality);
    windows += r.windows.size();
  }
  if (!records.empty()) {
    summary.mortality = static_cast<double>(deaths) / static_cast<double>(records.size());
    summary.mean_stay_hours = static_cast<double>(windows * kWindowHours) /
                              static_cast<double>(records.size());
  }
  return summary;
}

void run_featurize(const RunConfig& cfg, const std::string& out_dir) {
  write_resolved_config(join(out_dir, artifacts::kResolvedConfig), cfg);
  const std::string cohort_path = join(out_dir, artifacts::kCohort);
  const std::string manifest_path = join(out_dir, artifacts::kManifest);
  require_exists(cohort_path);
  require_exists(manifest_path);

  auto [records, manifest] = read_dataset(cohort_path, manifest_path);
  FeaturizeLog log;
  TransitionDataset ds = build_transitions(records, cfg.featurize, cfg.reward, &log);
  ds.manifest.config_hash = config_hash(cfg);
  write_transitions(join(out_dir, artifacts::kTransitions), ds);
  write_manifest(manifest_path, ds.manifest);

  ordered_json lj;
  lj["config_hash"] = ds.manifest.config_hash;
  lj["unobserved_actions_remapped"] = log.unobserved_actions_remapped;
  ordered_json excluded = ordered_json::array();
  for (const auto& e : log.excluded)
    excluded.push_back({{"patient_id", e.patient_id}, {"reason", e.reason}});
  lj["excluded"] = std::move(excluded);
  std::ofstream out(join(out_dir, artifacts::kFeaturizeLog), std::ios::binary);
  out << lj.dump(2) << "\n";
}

void run_train_bc(const RunConfig& cfg, const std::string& out_dir) {
  const std::string transitions_path = join(out_dir, artifacts::kTransitions);
  require_exists(transitions_path);
  TransitionDataset ds = read_transitions(transitions_path, join(out_dir, artifacts::kManifest));

  BcResult result = train_bc(ds, cfg.train);
  result.checkpoint.config_hash = config_hash(cfg);
  save_checkpoint(join(out_dir, artifacts::kBcCheckpoint), result.checkpoint);
  write_train_log(join(out_dir, artifacts::kBcTrainLog), result.log, result.checkpoint.config_hash);

  ordered_json mj;
  mj["config_hash"] = result.checkpoint.config_hash;
  mj["test_accuracy"] = result.test_accuracy;
  ordered_json ll = ordered_json::array();
  for (double v : result.per_class_log_likelihood)
    ll.push_back(std::isnan(v) ? ordered_json(nullptr) : ordered_json(v));
  mj["per_class_log_likelihood"] = std::move(ll);
  std::ofstream out(join(out_dir, artifacts::kBcMetrics), std::ios::binary);
  out << mj.dump(2) << "\n";
}

void run_train(const RunConfig& cfg, const std::string& out_dir, bool grid) {
  const std::string transitions_path = join(out_dir, artifacts::kTransitions);
  require_exists(transitions_path);
  const std::string bc_path = join(out_dir, artifacts::kBcCheckpoint);
  require_exists(bc_path);

  TransitionDataset ds = read_transitions(transitions_path, join(out_dir, artifacts::kManifest));
  const std::string hash = config_hash(cfg);
  check_hash(ds.manifest.config_hash, hash, "transitions manifest", false);

  BcPolicy behavior(bc_from_checkpoint(load_checkpoint(bc_path)), cfg.train.behavior_floor);

  if (grid) {
    const auto rows = grid_search(ds, cfg.train, behavior);
    std::ofstream out(join(out_dir, artifacts::kGridResults), std::ios::binary);
    if (!out) throw DataError("cannot open grid results for writing");
    out << "# config_hash=" << hash << "\n";
    out << "rank\talpha\tgamma\tvalidation_cwpdis\tbest_step\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << i + 1 << "\t" << num(rows[i].alpha) << "\t" << num(rows[i].gamma) << "\t"
          << num(rows[i].validation_cwpdis) << "\t" << rows[i].best_step << "\n";
  }

  TrainResult result = train(ds, cfg.train, behavior);
  result.checkpoint.config_hash = hash;
  save_checkpoint(join(out_dir, artifacts::kQCheckpoint), result.checkpoint);
  write_train_log(join(out_dir, artifacts::kTrainLog), result.log, hash);
}

void run_eval(const RunConfig& cfg, const std::string& out_dir) {
  const std::string transitions_path = join(out_dir, artifacts::kTransitions);
  require_exists(transitions_path);
  TransitionDataset ds = read_transitions(transitions_path, join(out_dir, artifacts::kManifest));
  const std::string hash = config_hash(cfg);
  check_hash(ds.manifest.config_hash, hash, "transitions manifest", false);

  const std::string bc_path = join(out_dir, artifacts::kBcCheckpoint);
  require_exists(bc_path);
  BcPolicy behavior(bc_from_checkpoint(load_checkpoint(bc_path)), cfg.ope.behavior_floor);

  std::vector<std::unique_ptr<Policy>> owned;
  std::vector<const Policy*> policies;
  for (const auto& spec : cfg.policies) {
    PolicySpec resolved = spec;
    if (spec.kind == PolicyKind::kBc || spec.kind == PolicyKind::kDeepen) {
      resolved.checkpoint_path = resolve_checkpoint(spec, out_dir);
      require_exists(resolved.checkpoint_path);
      const Checkpoint ckpt = load_checkpoint(resolved.checkpoint_path);
      check_hash(ckpt.config_hash, hash, resolved.checkpoint_path, false);
    }
    owned.push_back(make_policy(resolved, ds.manifest.action_thresholds, cfg.ope.behavior_floor));
    policies.push_back(owned.back().get());
  }

  std::vector<const FeaturizedTrajectory*> test;
  for (const auto& traj : ds.trajectories)
    if (!traj.meta.is_train) test.push_back(&traj);

  OpeReport report = build_ope_report(test, policies, behavior, cfg.ope);
  report.config_hash = hash;
  write_ope_report(join(out_dir, artifacts::kOpeReport), report);
}

void run_report(const RunConfig& cfg, const std::string& out_dir, bool force) {
  const std::string report_path = join(out_dir, artifacts::kOpeReport);
  require_exists(report_path);
  const OpeReport report = read_ope_report(report_path);
  const std::string hash = config_hash(cfg);
  check_hash(report.config_hash, hash, "ope report", force);

  const fs::path tables = fs::path(out_dir) / artifacts::kTablesDir;
  fs::create_directories(tables);

  auto open_table = [&](const char* name) {
    std::ofstream out(tables / name, std::ios::binary);
    if (!out) throw DataError(std::string("cannot open table for writing: ") + name);
    out << "# config_hash=" << report.config_hash << "\n";
    return out;
  };

  {
    auto out = open_table("policy_comparison.tsv");
    out << "policy\tcwpdis\tcwpdis_se\test_mortality_pct\test_mortality_se_pct\tci_lo_pct\tci_hi_"
           "pct\tmortality_source\treturn_clamped\n";
    for (const auto& ev : report.policies)
      out << ev.policy << "\t" << num(ev.cwpdis_value) << "\t" << num(ev.cwpdis_se) << "\t"
          << num(100.0 * ev.est_mortality) << "\t" << num(100.0 * ev.est_mortality_se) << "\t"
          << num(100.0 * ev.est_mortality_ci_lo) << "\t" << num(100.0 * ev.est_mortality_ci_hi)
          << "\t" << (ev.mortality_from_empirical ? "empirical" : "calibration") << "\t"
          << (ev.return_clamped ? 1 : 0) << "\n";
  }
  {
    auto out = open_table("return_mortality.tsv");
    out << "bin\treturn_lo\treturn_hi\treturn_mean\tmortality\tci_lo\tci_hi\tcount\n";
    for (std::size_t b = 0; b < report.calibration.bins.size(); ++b) {
      const auto& bin = report.calibration.bins[b];
      out << b << "\t" << num(bin.x_lo) << "\t" << num(bin.x_hi) << "\t" << num(bin.x_mean) << "\t"
          << num(bin.y) << "\t" << num(bin.ci_lo) << "\t" << num(bin.ci_hi) << "\t" << bin.count
          << "\n";
    }
  }
  {
    auto out = open_table("dosage_mortality.tsv");
    out << "policy\tcomponent\tdiff\tmortality\tci_lo\tci_hi\tcount\n";
    for (const auto& ev : report.policies)
      for (const auto& curve : ev.dosage_curves)
        for (const auto& bin : curve.bins)
          out << ev.policy << "\t" << curve.component << "\t" << bin.diff << "\t" << num(bin.y)
              << "\t" << num(bin.ci_lo) << "\t" << num(bin.ci_hi) << "\t" << bin.count << "\n";
  }
  {
    auto out = open_table("biomarker_deviation.tsv");
    out << "policy\tpair\tdiff\tmean_deviation\tcount\n";
    for (const auto& ev : report.policies)
      for (const auto& curve : ev.biomarker_curves)
        for (const auto& bin : curve.bins)
          out << ev.policy << "\t" << curve.component << "\t" << bin.diff << "\t" << num(bin.y)
              << "\t" << bin.count << "\n";
  }
  {
    auto out = open_table("action_distributions.tsv");
    out << "policy\tcomponent\tlevel\tfrequency\n";
    const char* comps[3] = {"calories", "protein", "water"};
    for (const auto& ev : report.policies)
      for (int c = 0; c < 3; ++c)
        for (int level = 1; level <= 4; ++level)
          out << ev.policy << "\t" << comps[c] << "\t" << level << "\t"
              << num(ev.action_level_freq[static_cast<std::size_t>(c)]
                                         [static_cast<std::size_t>(level - 1)])
              << "\n";
  }
}

}  // namespace deepen
