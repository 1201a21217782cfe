#pragma once

#include <string>

#include "deepen/config.hpp"

namespace deepen {

// Artifact names inside a run's output directory.
namespace artifacts {
inline constexpr const char* kResolvedConfig = "resolved_config.json";
inline constexpr const char* kCohort = "cohort.jsonl";
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kTransitions = "transitions.jsonl";
inline constexpr const char* kFeaturizeLog = "featurize_log.json";
inline constexpr const char* kBcCheckpoint = "bc_checkpoint.json";
inline constexpr const char* kBcMetrics = "bc_metrics.json";
inline constexpr const char* kBcTrainLog = "bc_train_log.jsonl";
inline constexpr const char* kQCheckpoint = "q_checkpoint.json";
inline constexpr const char* kTrainLog = "train_log.jsonl";
inline constexpr const char* kGridResults = "grid_results.tsv";
inline constexpr const char* kOpeReport = "ope_report.json";
inline constexpr const char* kTablesDir = "tables";
}  // namespace artifacts

struct SynthSummary {
  std::int64_t n_patients = 0;
  double mortality = 0.0;
  double mean_stay_hours = 0.0;
};

// Pipeline stages. Each stage reads only its declared upstream artifacts from
// out_dir, writes only into out_dir, and embeds the resolved config hash in
// every artifact. Missing upstream artifacts raise MissingInputError.
SynthSummary run_synth(const RunConfig& cfg, const std::string& out_dir);
void run_featurize(const RunConfig& cfg, const std::string& out_dir);
void run_train_bc(const RunConfig& cfg, const std::string& out_dir);
void run_train(const RunConfig& cfg, const std::string& out_dir, bool grid = false);
void run_eval(const RunConfig& cfg, const std::string& out_dir);
// force skips the mixed-config-hash check.
void run_report(const RunConfig& cfg, const std::string& out_dir, bool force = false);

}  // namespace deepen
