#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deepen/checkpoint_io.hpp"
#include "deepen/featurize.hpp"
#include "deepen/net.hpp"
#include "deepen/ope.hpp"

namespace deepen {

enum class CqlForm { kMeanOverActions, kLogSumExp };

CqlForm cql_form_from_name(std::string_view name);
std::string_view cql_form_name(CqlForm form);

struct TrainConfig {
  double alpha = 0.5;   // CQL weight
  double gamma = 0.99;  // discount
  double learning_rate = 1e-4;
  int batch_size = 500;
  std::int64_t total_steps = 50000;
  std::int64_t target_sync_period = 1000;  // hard copy every C steps
  std::int64_t eval_period = 1000;         // validation CWPDIS snapshots
  std::uint64_t seed = 0;
  CqlForm cql_form = CqlForm::kMeanOverActions;
  std::vector<int> hidden{256, 128, 64};
  std::vector<double> alpha_grid{0.01, 0.1, 0.5, 1.0};
  std::vector<double> gamma_grid{0.75, 0.9, 0.95, 0.99};
  // Smoothing/floor applied when scoring snapshots by validation CWPDIS.
  double behavior_floor = 1e-3;
  double smoothing_kappa = 0.01;
};

// Non-owning flat view over transitions; the source dataset must outlive it.
struct FlatTransitions {
  std::vector<const double*> state;
  std::vector<const double*> next_state;  // nullptr on terminal transitions
  std::vector<int> action;
  std::vector<double> reward;

  std::size_t size() const { return action.size(); }
  static FlatTransitions from_dataset(const TransitionDataset& ds, bool train);
};

// Owned copies of one sampled minibatch (zero rows where terminal).
struct MiniBatch {
  int size = 0;
  int input_dim = 0;
  std::vector<double> states;
  std::vector<double> next_states;
  std::vector<int> actions;
  std::vector<std::uint8_t> terminal;
  std::vector<double> rewards;
  std::vector<std::size_t> indices;  // positions in the source FlatTransitions

  void gather(const FlatTransitions& data, std::span<const std::size_t> idx, int input_dim);
};

// Double-Q targets: y = r for terminal rows, else
// y = r + gamma * Q_target(s', argmax_a Q_online(s', a)).
std::vector<double> double_q_target(const MiniBatch& batch, const DuelingQNet& online,
                                    const DuelingQNet& target, double gamma);

// Per-sample conservative penalty on one row of Q-values.
double cql_penalty(std::span<const double> q_row, int a_data, CqlForm form);

struct StepDiagnostics {
  double td_loss = 0.0;
  double cql_term = 0.0;
  double mean_q = 0.0;
};

// One optimizer step on loss = mean squared TD error + alpha * mean CQL
// penalty. Throws NumericalError (with the offending batch indices) on a
// non-finite loss.
StepDiagnostics train_step(const MiniBatch& batch, DuelingQNet& online, const DuelingQNet& target,
                           AdamState& opt, const TrainConfig& cfg);

struct TrainLogRow {
  std::int64_t step = 0;
  double td_loss = 0.0;
  double cql_term = 0.0;
  double mean_q = 0.0;
  double validation_cwpdis = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;  // best snapshot by validation CWPDIS
  std::vector<TrainLogRow> log;
  std::int64_t best_step = 0;
  double best_cwpdis = 0.0;
};

// Offline D3QN + CQL training with periodic target syncs and evaluation
// snapshots; the final checkpoint is the snapshot with the best validation
// CWPDIS. The behavior policy for snapshot scoring is the given BC policy.
TrainResult train(const TransitionDataset& dataset, const TrainConfig& cfg,
                  const BcPolicy& behavior);

struct BcResult {
  Checkpoint checkpoint;
  double test_accuracy = 0.0;
  // Mean log-likelihood of test samples per true class; NaN when unseen.
  std::vector<double> per_class_log_likelihood;
  std::vector<TrainLogRow> log;  // cql fields unused
};

// Behavior cloning: same trunk with a softmax head, cross-entropy loss.
BcResult train_bc(const TransitionDataset& dataset, const TrainConfig& cfg);

struct GridRow {
  double alpha = 0.0;
  double gamma = 0.0;
  double validation_cwpdis = 0.0;
  std::int64_t best_step = 0;
};

// Trains every (alpha, gamma) combination of the configured lists and returns
// rows ranked by validation CWPDIS, best first.
std::vector<GridRow> grid_search(const TransitionDataset& dataset, const TrainConfig& cfg,
                                 const BcPolicy& behavior);

void write_train_log(const std::string& path, const std::vector<TrainLogRow>& rows,
                     const std::string& config_hash);

}  // namespace deepen
