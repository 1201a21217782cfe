#include "deepen/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "deepen/errors.hpp"
#include "deepen/rng.hpp"

namespace deepen {

CqlForm cql_form_from_name(std::string_view name) {
  if (name == "mean-over-actions") return CqlForm::kMeanOverActions;
  if (name == "log-sum-exp") return CqlForm::kLogSumExp;
  throw ConfigError("unknown cql_form: " + std::string(name));
}

std::string_view cql_form_name(CqlForm form) {
  return form == CqlForm::kMeanOverActions ? "mean-over-actions" : "log-sum-exp";
}

FlatTransitions FlatTransitions::from_dataset(const TransitionDataset& ds, bool train) {
  FlatTransitions out;
  for (const auto& traj : ds.trajectories) {
    if (traj.meta.is_train != train) continue;
    for (std::size_t t = 0; t < traj.size(); ++t) {
      out.state.push_back(traj.state(t).data());
      out.next_state.push_back(traj.terminal(t) ? nullptr : traj.next_state(t).data());
      out.action.push_back(traj.actions[t]);
      out.reward.push_back(traj.rewards[t]);
    }
  }
  return out;
}

void MiniBatch::gather(const FlatTransitions& data, std::span<const std::size_t> idx, int dim) {
  size = static_cast<int>(idx.size());
  input_dim = dim;
  states.assign(static_cast<std::size_t>(size) * dim, 0.0);
  next_states.assign(static_cast<std::size_t>(size) * dim, 0.0);
  actions.resize(static_cast<std::size_t>(size));
  terminal.resize(static_cast<std::size_t>(size));
  rewards.resize(static_cast<std::size_t>(size));
  indices.assign(idx.begin(), idx.end());
  for (int b = 0; b < size; ++b) {
    const std::size_t i = idx[static_cast<std::size_t>(b)];
    std::copy_n(data.state[i], dim, states.data() + static_cast<std::size_t>(b) * dim);
    if (data.next_state[i]) {
      std::copy_n(data.next_state[i], dim, next_states.data() + static_cast<std::size_t>(b) * dim);
      terminal[static_cast<std::size_t>(b)] = 0;
    } else {
      terminal[static_cast<std::size_t>(b)] = 1;
    }
    actions[static_cast<std::size_t>(b)] = data.action[i];
    rewards[static_cast<std::size_t>(b)] = data.reward[i];
  }
}

std::vector<double> double_q_target(const MiniBatch& batch, const DuelingQNet& online,
                                    const DuelingQNet& target, double gamma) {
  const int na = online.config().actions;
  const int n = batch.size;
  std::vector<double> y(static_cast<std::size_t>(n));
  std::vector<double> q_online(static_cast<std::size_t>(n) * na);
  std::vector<double> q_target(static_cast<std::size_t>(n) * na);
  online.forward(batch.next_states, n, q_online);
  target.forward(batch.next_states, n, q_target);
  for (int b = 0; b < n; ++b) {
    if (batch.terminal[static_cast<std::size_t>(b)]) {
      y[static_cast<std::size_t>(b)] = batch.rewards[static_cast<std::size_t>(b)];
      continue;
    }
    const double* row = q_online.data() + static_cast<std::size_t>(b) * na;
    const int a_star = online.argmax_action({row, static_cast<std::size_t>(na)});
    y[static_cast<std::size_t>(b)] =
        batch.rewards[static_cast<std::size_t>(b)] +
        gamma * q_target[static_cast<std::size_t>(b) * na + static_cast<std::size_t>(a_star)];
  }
  return y;
}

double cql_penalty(std::span<const double> q_row, int a_data, CqlForm form) {
  const std::size_t na = q_row.size();
  const double q_data = q_row[static_cast<std::size_t>(a_data)];
  if (form == CqlForm::kMeanOverActions) {
    double m = 0.0;
    for (double q : q_row) m += q;
    return m / static_cast<double>(na) - q_data;
  }
  double mx = q_row[0];
  for (double q : q_row) mx = std::max(mx, q);
  double sum = 0.0;
  for (double q : q_row) sum += std::exp(q - mx);
  return mx + std::log(sum) - q_data;
}

StepDiagnostics train_step(const MiniBatch& batch, DuelingQNet& online, const DuelingQNet& target,
                           AdamState& opt, const TrainConfig& cfg) {
  const int na = online.config().actions;
  const int n = batch.size;
  const double inv_n = 1.0 / static_cast<double>(n);

  const std::vector<double> y = double_q_target(batch, online, target, cfg.gamma);

  ForwardCache cache;
  std::vector<double> q(static_cast<std::size_t>(n) * na);
  online.forward(batch.states, n, q, &cache);

  StepDiagnostics diag;
  std::vector<double> dq(static_cast<std::size_t>(n) * na, 0.0);
  std::vector<double> probs;
  if (cfg.cql_form == CqlForm::kLogSumExp) {
    probs.resize(static_cast<std::size_t>(n) * na);
    softmax_rows(q, n, na, probs);
  }

  double sum_q = 0.0;
  for (int b = 0; b < n; ++b) {
    const std::size_t off = static_cast<std::size_t>(b) * na;
    const double* row = q.data() + off;
    const int a = batch.actions[static_cast<std::size_t>(b)];
    const double err = row[a] - y[static_cast<std::size_t>(b)];
    diag.td_loss += err * err;
    diag.cql_term += cql_penalty({row, static_cast<std::size_t>(na)}, a, cfg.cql_form);
    for (int j = 0; j < na; ++j) sum_q += row[j];

    // d/dQ of (Q(s,a) - y)^2 / n.
    dq[off + static_cast<std::size_t>(a)] += 2.0 * err * inv_n;
    // d/dQ of alpha * cql / n.
    if (cfg.alpha != 0.0) {
      if (cfg.cql_form == CqlForm::kMeanOverActions) {
        const double g = cfg.alpha * inv_n / static_cast<double>(na);
        for (int j = 0; j < na; ++j) dq[off + static_cast<std::size_t>(j)] += g;
      } else {
        const double* p = probs.data() + off;
        for (int j = 0; j < na; ++j)
          dq[off + static_cast<std::size_t>(j)] += cfg.alpha * inv_n * p[j];
      }
      dq[off + static_cast<std::size_t>(a)] -= cfg.alpha * inv_n;
    }
  }
  diag.td_loss *= inv_n;
  diag.cql_term *= inv_n;
  diag.mean_q = sum_q * inv_n / static_cast<double>(na);

  const double loss = diag.td_loss + cfg.alpha * diag.cql_term;
  if (!std::isfinite(loss))
    throw NumericalError("non-finite training loss", batch.indices);

  std::vector<double> grads(online.param_count());
  online.backward(cache, dq, grads);
  optimizer_step(online, grads, opt);
  return diag;
}

namespace {

// Validation CWPDIS of the smoothed greedy policy induced by the current
// online network.
double snapshot_cwpdis(const DuelingQNet& online,
                       const std::vector<const FeaturizedTrajectory*>& validation,
                       const BcPolicy& behavior, const TrainConfig& cfg) {
  if (validation.empty()) return 0.0;
  DuelingQNet copy = online;  // frozen evaluation copy
  GreedyPolicy greedy(std::move(copy));
  SmoothedPolicy smoothed(greedy, cfg.smoothing_kappa);
  auto weighted = weight_trajectories(validation, smoothed, behavior);
  std::vector<std::size_t> all(weighted.size());
  std::iota(all.begin(), all.end(), 0);
  return cwpdis_from_weighted(weighted, all, cfg.gamma);
}

std::vector<const FeaturizedTrajectory*> select_split(const TransitionDataset& ds, bool train) {
  std::vector<const FeaturizedTrajectory*> out;
  for (const auto& traj : ds.trajectories)
    if (traj.meta.is_train == train) out.push_back(&traj);
  return out;
}

}  // namespace

TrainResult train(const TransitionDataset& dataset, const TrainConfig& cfg,
                  const BcPolicy& behavior) {
  const FlatTransitions data = FlatTransitions::from_dataset(dataset, /*train=*/true);
  if (data.size() == 0) throw DataError("train: empty training split");
  const auto validation = select_split(dataset, /*train=*/false);

  NetConfig net_cfg;
  net_cfg.input_dim = kNumFeatures;
  net_cfg.hidden = cfg.hidden;
  net_cfg.actions = kNumActions;
  net_cfg.init_seed = derive_seed(cfg.seed, "q-init");
  DuelingQNet online(net_cfg);
  DuelingQNet target(net_cfg);
  sync_target(online, target);

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  AdamState opt(online.param_count(), adam_cfg);

  Rng sample_rng(derive_seed(cfg.seed, "batch-sampling"));

  TrainResult result;
  result.best_cwpdis = -std::numeric_limits<double>::infinity();
  std::vector<double> best_params(online.params().begin(), online.params().end());
  std::int64_t best_step = 0;

  MiniBatch batch;
  std::vector<std::size_t> idx;
  StepDiagnostics diag;
  for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
    idx.resize(static_cast<std::size_t>(cfg.batch_size));
    for (auto& i : idx) i = static_cast<std::size_t>(sample_rng.uniform_index(data.size()));
    batch.gather(data, idx, kNumFeatures);
    diag = train_step(batch, online, target, opt, cfg);

    if (step % cfg.target_sync_period == 0) sync_target(online, target);

    if (step % cfg.eval_period == 0 || step == cfg.total_steps) {
      const double v = snapshot_cwpdis(online, validation, behavior, cfg);
      result.log.push_back({step, diag.td_loss, diag.cql_term, diag.mean_q, v});
      if (v > result.best_cwpdis || result.log.size() == 1) {
        result.best_cwpdis = v;
        best_step = step;
        best_params.assign(online.params().begin(), online.params().end());
      }
    }
  }

  std::copy(best_params.begin(), best_params.end(), online.params().begin());
  result.checkpoint = make_checkpoint(online, opt, best_step);
  result.checkpoint.selection_metric = result.best_cwpdis;
  result.checkpoint.has_selection_metric = true;
  result.best_step = best_step;
  return result;
}

BcResult train_bc(const TransitionDataset& dataset, const TrainConfig& cfg) {
  const FlatTransitions data = FlatTransitions::from_dataset(dataset, /*train=*/true);
  if (data.size() == 0) throw DataError("train_bc: empty training split");
  const FlatTransitions test = FlatTransitions::from_dataset(dataset, /*train=*/false);

  NetConfig net_cfg;
  net_cfg.input_dim = kNumFeatures;
  net_cfg.hidden = cfg.hidden;
  net_cfg.actions = kNumActions;
  net_cfg.init_seed = derive_seed(cfg.seed, "bc-init");
  BcNet net(net_cfg);

  AdamConfig adam_cfg;
  adam_cfg.learning_rate = cfg.learning_rate;
  AdamState opt(net.param_count(), adam_cfg);

  Rng sample_rng(derive_seed(cfg.seed, "bc-batch-sampling"));
  const int na = kNumActions;

  BcResult result;
  MiniBatch batch;
  std::vector<std::size_t> idx;
  std::vector<double> logits, probs, dlogits, grads(net.param_count());
  ForwardCache cache;
  for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
    idx.resize(static_cast<std::size_t>(cfg.batch_size));
    for (auto& i : idx) i = static_cast<std::size_t>(sample_rng.uniform_index(data.size()));
    batch.gather(data, idx, kNumFeatures);

    const int n = batch.size;
    logits.assign(static_cast<std::size_t>(n) * na, 0.0);
    net.forward_logits(batch.states, n, logits, &cache);
    probs.assign(logits.size(), 0.0);
    softmax_rows(logits, n, na, probs);

    // Cross-entropy: dL/dlogits = (softmax - onehot) / n.
    const double inv_n = 1.0 / static_cast<double>(n);
    double loss = 0.0;
    dlogits.assign(logits.size(), 0.0);
    for (int b = 0; b < n; ++b) {
      const std::size_t off = static_cast<std::size_t>(b) * na;
      const int a = batch.actions[static_cast<std::size_t>(b)];
      loss -= std::log(std::max(probs[off + static_cast<std::size_t>(a)], 1e-300)) * inv_n;
      for (int j = 0; j < na; ++j)
        dlogits[off + static_cast<std::size_t>(j)] = probs[off + static_cast<std::size_t>(j)] * inv_n;
      dlogits[off + static_cast<std::size_t>(a)] -= inv_n;
    }
    if (!std::isfinite(loss)) throw NumericalError("non-finite BC loss", batch.indices);

    net.backward(cache, dlogits, grads);
    optimizer_step(net, grads, opt);

    if (step % cfg.eval_period == 0 || step == cfg.total_steps)
      result.log.push_back({step, loss, 0.0, 0.0, 0.0});
  }

  // Test-split accuracy and per-class log-likelihood.
  result.per_class_log_likelihood.assign(na, std::nan(""));
  if (test.size() > 0) {
    std::vector<double> class_ll(static_cast<std::size_t>(na), 0.0);
    std::vector<std::int64_t> class_count(static_cast<std::size_t>(na), 0);
    std::int64_t correct = 0;
    const std::size_t chunk = 1024;
    std::vector<double> states;
    for (std::size_t lo = 0; lo < test.size(); lo += chunk) {
      const std::size_t hi = std::min(test.size(), lo + chunk);
      const int n = static_cast<int>(hi - lo);
      states.assign(static_cast<std::size_t>(n) * kNumFeatures, 0.0);
      for (int b = 0; b < n; ++b)
        std::copy_n(test.state[lo + static_cast<std::size_t>(b)], kNumFeatures,
                    states.data() + static_cast<std::size_t>(b) * kNumFeatures);
      probs.assign(static_cast<std::size_t>(n) * na, 0.0);
      net.forward_probs(states, n, probs);
      for (int b = 0; b < n; ++b) {
        const std::size_t off = static_cast<std::size_t>(b) * na;
        const int label = test.action[lo + static_cast<std::size_t>(b)];
        int arg = 0;
        for (int j = 1; j < na; ++j)
          if (probs[off + static_cast<std::size_t>(j)] > probs[off + static_cast<std::size_t>(arg)])
            arg = j;
        if (arg == label) ++correct;
        class_ll[static_cast<std::size_t>(label)] +=
            std::log(std::max(probs[off + static_cast<std::size_t>(label)], 1e-300));
        class_count[static_cast<std::size_t>(label)] += 1;
      }
    }
    result.test_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    for (int c = 0; c < na; ++c)
      if (class_count[static_cast<std::size_t>(c)] > 0)
        result.per_class_log_likelihood[static_cast<std::size_t>(c)] =
            class_ll[static_cast<std::size_t>(c)] /
            static_cast<double>(class_count[static_cast<std::size_t>(c)]);
  }

  result.checkpoint = make_checkpoint(net, opt, cfg.total_steps);
  return result;
}

std::vector<GridRow> grid_search(const TransitionDataset& dataset, const TrainConfig& cfg,
                                 const BcPolicy& behavior) {
  std::vector<GridRow> rows;
  for (double alpha : cfg.alpha_grid) {
    for (double gamma : cfg.gamma_grid) {
      TrainConfig combo = cfg;
      combo.alpha = alpha;
      combo.gamma = gamma;
      const TrainResult r = train(dataset, combo, behavior);
      rows.push_back({alpha, gamma, r.best_cwpdis, r.best_step});
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GridRow& a, const GridRow& b) {
                     return a.validation_cwpdis > b.validation_cwpdis;
                   });
  return rows;
}

void write_train_log(const std::string& path, const std::vector<TrainLogRow>& rows,
                     const std::string& config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (const auto& r : rows) {
    nlohmann::ordered_json j{{"step", r.step},
                             {"td_loss", r.td_loss},
                             {"cql_term", r.cql_term},
                             {"mean_q", r.mean_q},
                             {"validation_cwpdis", r.validation_cwpdis},
                             {"config_hash", config_hash}};
    out << j.dump() << "\n";
  }
}

}  // namespace deepen
