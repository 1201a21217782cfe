#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "deepen/cohort_synth.hpp"
#include "deepen/featurize.hpp"
#include "deepen/rng.hpp"
#include "deepen/training.hpp"
#include "support/test_helpers.hpp"

using namespace deepen;
using namespace deepen::testing;

namespace {

NetConfig head_only_config(int input, int actions) {
  NetConfig cfg;
  cfg.input_dim = input;
  cfg.hidden = {2, 2};
  cfg.actions = actions;
  cfg.init_seed = 0;
  return cfg;
}

// Zero the trunk and set head biases so Q(s) is constant in s.
DuelingQNet net_with_constant_q(const std::vector<double>& q_values) {
  DuelingQNet net(head_only_config(3, static_cast<int>(q_values.size())));
  std::fill(net.params().begin(), net.params().end(), 0.0);
  double mean = 0.0;
  for (double q : q_values) mean += q;
  mean /= static_cast<double>(q_values.size());
  auto params = net.params();
  params[net.layout().block("value_head").b_offset] = mean;
  const auto& adv = net.layout().block("advantage_head");
  for (std::size_t j = 0; j < q_values.size(); ++j)
    params[adv.b_offset + j] = q_values[j] - mean;
  return net;
}

MiniBatch single_transition_batch(int action, double reward, bool terminal, int input_dim) {
  MiniBatch batch;
  batch.size = 1;
  batch.input_dim = input_dim;
  batch.states.assign(static_cast<std::size_t>(input_dim), 0.1);
  batch.next_states.assign(static_cast<std::size_t>(input_dim), 0.2);
  batch.actions = {action};
  batch.terminal = {static_cast<std::uint8_t>(terminal ? 1 : 0)};
  batch.rewards = {reward};
  batch.indices = {0};
  return batch;
}

}  // namespace

TEST_CASE("double-Q targets: terminal transitions pass the reward through") {
  const auto online = net_with_constant_q({0.0, 1.0});
  const auto target = net_with_constant_q({0.0, 0.5});
  const MiniBatch batch = single_transition_batch(0, -15.0, true, 3);
  const auto y = double_q_target(batch, online, target, 0.99);
  CHECK(y[0] == -15.0);
}

TEST_CASE("double-Q targets: online selects, target evaluates") {
  // Online argmax is action 1; the target values that action at 0.5.
  const auto online = net_with_constant_q({0.0, 1.0});
  const auto target = net_with_constant_q({0.0, 0.5});
  const MiniBatch batch = single_transition_batch(0, 1.0, false, 3);
  const auto y = double_q_target(batch, online, target, 0.99);
  CHECK(y[0] == doctest::Approx(1.495).epsilon(1e-9));
}

TEST_CASE("double-Q with identical nets reduces to the max-based target") {
  const auto online = net_with_constant_q({0.3, 0.9, -0.2});
  const MiniBatch batch = single_transition_batch(2, 0.5, false, 3);
  const auto y = double_q_target(batch, online, online, 0.9);
  CHECK(y[0] == doctest::Approx(0.5 + 0.9 * 0.9).epsilon(1e-9));
}

TEST_CASE("cql penalty hand cases") {
  const std::vector<double> q{1.0, 2.0, 3.0};
  CHECK(cql_penalty(q, 2, CqlForm::kMeanOverActions) == doctest::Approx(-1.0));
  const std::vector<double> uniform{0.7, 0.7, 0.7, 0.7};
  CHECK(cql_penalty(uniform, 1, CqlForm::kMeanOverActions) == doctest::Approx(0.0));
  const std::vector<double> two{0.0, 0.0};
  CHECK(cql_penalty(two, 0, CqlForm::kLogSumExp) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

namespace {

// Synthetic flat dataset over `actions_used` of the 51 ids; one id never
// appears. Returns held-out probe states as well.
struct CqlFixture {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> next_states;
  FlatTransitions flat;
  std::vector<double> probe;  // n_probe x dim
  int never_action = 17;
  int dim = 10;
  int n_probe = 64;
};

CqlFixture make_cql_fixture(std::uint64_t seed, std::size_t n = 2000) {
  CqlFixture fx;
  Rng rng(seed);
  fx.states.resize(n);
  fx.next_states.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fx.states[i].resize(static_cast<std::size_t>(fx.dim));
    fx.next_states[i].resize(static_cast<std::size_t>(fx.dim));
    for (auto& x : fx.states[i]) x = rng.normal();
    for (auto& x : fx.next_states[i]) x = rng.normal();
    int a = static_cast<int>(rng.uniform_index(kNumActions));
    if (a == fx.never_action) a = (a + 1) % kNumActions;
    const bool terminal = rng.uniform() < 0.1;
    fx.flat.state.push_back(fx.states[i].data());
    fx.flat.next_state.push_back(terminal ? nullptr : fx.next_states[i].data());
    fx.flat.action.push_back(a);
    fx.flat.reward.push_back(rng.normal(1.0, 0.5));
  }
  fx.probe.resize(static_cast<std::size_t>(fx.n_probe * fx.dim));
  for (auto& x : fx.probe) x = rng.normal();
  return fx;
}

// Train a small net on the fixture and return the mean Q of the never-taken
// action over the probe states.
double never_action_mean_q(const CqlFixture& fx, double alpha, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.alpha = alpha;
  cfg.gamma = 0.9;
  cfg.learning_rate = 3e-3;
  cfg.batch_size = 64;
  cfg.seed = seed;

  NetConfig net_cfg;
  net_cfg.input_dim = fx.dim;
  net_cfg.hidden = {16, 16};
  net_cfg.actions = kNumActions;
  net_cfg.init_seed = derive_seed(seed, "cql-net");
  DuelingQNet online(net_cfg);
  DuelingQNet target(net_cfg);
  sync_target(online, target);
  AdamConfig adam;
  adam.learning_rate = cfg.learning_rate;
  AdamState opt(online.param_count(), adam);

  Rng sample_rng(derive_seed(seed, "cql-sampling"));
  MiniBatch batch;
  std::vector<std::size_t> idx(static_cast<std::size_t>(cfg.batch_size));
  for (int step = 1; step <= 700; ++step) {
    for (auto& i : idx) i = static_cast<std::size_t>(sample_rng.uniform_index(fx.flat.size()));
    batch.gather(fx.flat, idx, fx.dim);
    train_step(batch, online, target, opt, cfg);
    if (step % 100 == 0) sync_target(online, target);
  }

  std::vector<double> q(static_cast<std::size_t>(fx.n_probe) * kNumActions);
  online.forward(fx.probe, fx.n_probe, q);
  double mean_q = 0.0;
  for (int b = 0; b < fx.n_probe; ++b)
    mean_q += q[static_cast<std::size_t>(b) * kNumActions + static_cast<std::size_t>(fx.never_action)];
  return mean_q / static_cast<double>(fx.n_probe);
}

}  // namespace

TEST_CASE("cql pushes never-taken actions down") {
  const CqlFixture fx = make_cql_fixture(404);
  const double q0 = never_action_mean_q(fx, 0.0, 1);
  const double q1 = never_action_mean_q(fx, 1.0, 1);
  CHECK(q1 < q0 - 0.5);
}

TEST_CASE("alpha = 0 ignores the cql form entirely") {
  const CqlFixture fx = make_cql_fixture(11, 500);
  TrainConfig cfg;
  cfg.alpha = 0.0;
  cfg.gamma = 0.9;
  cfg.batch_size = 32;

  auto run = [&](CqlForm form) {
    cfg.cql_form = form;
    NetConfig net_cfg;
    net_cfg.input_dim = fx.dim;
    net_cfg.hidden = {8, 8};
    net_cfg.actions = kNumActions;
    net_cfg.init_seed = 7;
    DuelingQNet online(net_cfg);
    DuelingQNet target(net_cfg);
    sync_target(online, target);
    AdamState opt(online.param_count(), AdamConfig{});
    Rng rng(3);
    MiniBatch batch;
    std::vector<std::size_t> idx(32);
    StepDiagnostics last;
    for (int step = 0; step < 30; ++step) {
      for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(fx.flat.size()));
      batch.gather(fx.flat, idx, fx.dim);
      last = train_step(batch, online, target, opt, cfg);
    }
    // The diagnostic CQL term is still reported.
    CHECK(last.cql_term != 0.0);
    return std::vector<double>(online.params().begin(), online.params().end());
  };
  CHECK(run(CqlForm::kMeanOverActions) == run(CqlForm::kLogSumExp));
}

TEST_CASE("train_step diagnostics are deterministic across reruns") {
  const CqlFixture fx = make_cql_fixture(21, 400);
  auto run = [&] {
    TrainConfig cfg;
    cfg.alpha = 0.5;
    cfg.batch_size = 32;
    NetConfig net_cfg;
    net_cfg.input_dim = fx.dim;
    net_cfg.hidden = {8, 8};
    net_cfg.actions = kNumActions;
    net_cfg.init_seed = 1;
    DuelingQNet online(net_cfg);
    DuelingQNet target(net_cfg);
    sync_target(online, target);
    AdamState opt(online.param_count(), AdamConfig{});
    Rng rng(9);
    MiniBatch batch;
    std::vector<std::size_t> idx(32);
    std::vector<double> diags;
    for (int step = 0; step < 20; ++step) {
      for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(fx.flat.size()));
      batch.gather(fx.flat, idx, fx.dim);
      const auto d = train_step(batch, online, target, opt, cfg);
      diags.push_back(d.td_loss);
      diags.push_back(d.cql_term);
      diags.push_back(d.mean_q);
    }
    return diags;
  };
  CHECK(run() == run());
}

TEST_CASE("td loss trends down over the first 200 steps on a smoke dataset") {
  SynthConfig synth;
  synth.n_patients = 60;
  synth.seed = 14;
  const auto records = generate_cohort(synth);
  FeaturizeOptions fopts;
  fopts.split_seed = 14;
  const TransitionDataset ds = build_transitions(records, fopts, RewardConfig{});
  const FlatTransitions flat = FlatTransitions::from_dataset(ds, true);

  TrainConfig cfg;
  cfg.alpha = 0.5;
  cfg.learning_rate = 1e-3;
  cfg.batch_size = 64;
  NetConfig net_cfg;
  net_cfg.input_dim = kNumFeatures;
  net_cfg.hidden = {32, 32};
  net_cfg.actions = kNumActions;
  net_cfg.init_seed = 3;
  DuelingQNet online(net_cfg);
  DuelingQNet target(net_cfg);
  sync_target(online, target);
  AdamConfig adam;
  adam.learning_rate = cfg.learning_rate;
  AdamState opt(online.param_count(), adam);
  Rng rng(5);
  MiniBatch batch;
  std::vector<std::size_t> idx(64);
  double early = 0.0, late = 0.0;
  for (int step = 1; step <= 200; ++step) {
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(flat.size()));
    batch.gather(flat, idx, kNumFeatures);
    const auto d = train_step(batch, online, target, opt, cfg);
    CHECK(std::isfinite(d.td_loss));
    if (step <= 25) early += d.td_loss;
    if (step > 175) late += d.td_loss;
  }
  CHECK(late < early);
}

TEST_CASE("train() selects a checkpoint and is deterministic under seed") {
  SynthConfig synth;
  synth.n_patients = 80;
  synth.seed = 25;
  const auto records = generate_cohort(synth);
  FeaturizeOptions fopts;
  fopts.split_seed = 25;
  const TransitionDataset ds = build_transitions(records, fopts, RewardConfig{});

  TrainConfig cfg;
  cfg.total_steps = 120;
  cfg.batch_size = 48;
  cfg.eval_period = 40;
  cfg.target_sync_period = 40;
  cfg.hidden = {24, 16};
  cfg.seed = 10;
  NetConfig bc_cfg;
  bc_cfg.input_dim = kNumFeatures;
  bc_cfg.hidden = {24, 16};
  bc_cfg.actions = kNumActions;
  bc_cfg.init_seed = 2;
  const BcPolicy behavior{BcNet(bc_cfg)};

  const TrainResult a = train(ds, cfg, behavior);
  const TrainResult b = train(ds, cfg, behavior);
  CHECK(a.checkpoint.params == b.checkpoint.params);
  REQUIRE(a.log.size() == 3);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].td_loss == b.log[i].td_loss);
    CHECK(a.log[i].validation_cwpdis == b.log[i].validation_cwpdis);
  }
  CHECK(a.checkpoint.has_selection_metric);
  CHECK(a.best_step >= 40);
  CHECK(a.checkpoint.kind == "dueling_q");
}

TEST_CASE("empty training split is an error") {
  TransitionDataset ds;
  ds.manifest = make_default_manifest();
  auto traj = make_trajectory(4, 1);
  traj.meta.is_train = false;
  ds.trajectories.push_back(std::move(traj));
  TrainConfig cfg;
  NetConfig bc_cfg;
  bc_cfg.hidden = {8};
  const BcPolicy behavior{BcNet(bc_cfg)};
  CHECK_THROWS_AS(train(ds, cfg, behavior), DataError);
  CHECK_THROWS_AS(train_bc(ds, cfg), DataError);
}

namespace {

// Dataset whose action is a deterministic function of feature 0.
TransitionDataset separable_dataset(std::size_t n_traj, std::uint64_t seed) {
  TransitionDataset ds;
  ds.manifest = make_default_manifest();
  Rng rng(seed);
  const std::array<int, 4> classes{0, 7, 18, 42};
  for (std::size_t i = 0; i < n_traj; ++i) {
    FeaturizedTrajectory traj = make_trajectory(8, derive_seed(seed, "sep", i));
    traj.meta.is_train = i % 5 != 0;  // 80/20
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double x = rng.uniform(-3.0, 3.0);
      traj.states[t * kNumFeatures] = x;
      const int bucket = x < -1.5 ? 0 : x < 0.0 ? 1 : x < 1.5 ? 2 : 3;
      traj.actions[t] = classes[static_cast<std::size_t>(bucket)];
    }
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

}  // namespace

TEST_CASE("behavior cloning learns a separable action rule to >95% accuracy") {
  const TransitionDataset ds = separable_dataset(300, 77);
  TrainConfig cfg;
  cfg.total_steps = 1500;
  cfg.batch_size = 128;
  cfg.learning_rate = 3e-3;
  cfg.eval_period = 500;
  cfg.hidden = {32, 32};
  cfg.seed = 4;
  const BcResult r = train_bc(ds, cfg);
  CHECK(r.test_accuracy > 0.95);
  // Seen classes carry finite log-likelihood, unseen ones are NaN.
  CHECK(std::isfinite(r.per_class_log_likelihood[0]));
  CHECK(std::isfinite(r.per_class_log_likelihood[7]));
  CHECK(std::isnan(r.per_class_log_likelihood[3]));
}

TEST_CASE("behavior cloning on uniform-random labels sits at chance level") {
  TransitionDataset ds;
  ds.manifest = make_default_manifest();
  Rng rng(31);
  for (std::size_t i = 0; i < 400; ++i) {
    FeaturizedTrajectory traj = make_trajectory(10, derive_seed(31, "rand", i));
    traj.meta.is_train = i % 5 != 0;
    for (std::size_t t = 0; t < traj.size(); ++t)
      traj.actions[t] = static_cast<int>(rng.uniform_index(kNumActions));
    ds.trajectories.push_back(std::move(traj));
  }
  TrainConfig cfg;
  cfg.total_steps = 400;
  cfg.batch_size = 128;
  cfg.learning_rate = 1e-3;
  cfg.eval_period = 200;
  cfg.hidden = {16, 16};
  const BcResult r = train_bc(ds, cfg);
  CHECK(r.test_accuracy < 1.0 / 51.0 + 0.02);
}

TEST_CASE("grid search emits one ranked row per combination") {
  const TransitionDataset ds = separable_dataset(60, 5);
  TrainConfig cfg;
  cfg.total_steps = 40;
  cfg.batch_size = 32;
  cfg.eval_period = 20;
  cfg.target_sync_period = 20;
  cfg.hidden = {12, 8};
  cfg.alpha_grid = {0.1, 1.0};
  cfg.gamma_grid = {0.9, 0.99};
  NetConfig bc_cfg;
  bc_cfg.input_dim = kNumFeatures;
  bc_cfg.hidden = {12, 8};
  bc_cfg.actions = kNumActions;
  const BcPolicy behavior{BcNet(bc_cfg)};
  const auto rows = grid_search(ds, cfg, behavior);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    CHECK(rows[i].validation_cwpdis >= rows[i + 1].validation_cwpdis);
}
