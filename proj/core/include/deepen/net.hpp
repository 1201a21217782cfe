#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deepen/variables.hpp"

namespace deepen {

struct NetConfig {
  int input_dim = kNumFeatures;
  std::vector<int> hidden{256, 128, 64};  // ReLU layers, decreasing widths
  int actions = kNumActions;
  std::uint64_t init_seed = 0;
};

// One dense block inside the flat parameter array.
struct DenseBlock {
  std::string name;
  int in = 0;
  int out = 0;
  std::size_t w_offset = 0;  // row-major out x in
  std::size_t b_offset = 0;
};

// Deterministic flat layout: hidden layers in order, then the head blocks.
struct NetLayout {
  std::vector<DenseBlock> blocks;
  std::size_t param_count = 0;

  const DenseBlock& block(const std::string& name) const;
  // Name of the block owning a flat parameter index.
  const std::string& block_of(std::size_t param_index) const;
};

// Activations cached by a forward pass for the matching backward pass.
struct ForwardCache {
  int batch = 0;
  std::vector<std::vector<double>> activations;  // input + each hidden output
};

// Dueling multilayer perceptron: shared ReLU trunk, scalar value head and an
// advantage head over the 51 actions, combined with mean-subtracted
// advantages: Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a').
// All arithmetic is in 64-bit reals.
class DuelingQNet {
 public:
  explicit DuelingQNet(NetConfig cfg);

  const NetConfig& config() const { return cfg_; }
  const NetLayout& layout() const { return layout_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return layout_.param_count; }

  // states: batch x input_dim row-major; q_out: batch x actions.
  void forward(std::span<const double> states, int batch, std::span<double> q_out,
               ForwardCache* cache = nullptr) const;

  // Exact gradient of a scalar loss given dLoss/dQ (batch x actions).
  // grads has param_count() entries and is overwritten.
  void backward(const ForwardCache& cache, std::span<const double> dq,
                std::span<double> grads) const;

  // Greedy action over the valid ids; ties break toward the lowest id.
  int argmax_action(std::span<const double> q_row) const;

 private:
  NetConfig cfg_;
  NetLayout layout_;
  std::vector<double> params_;
};

// Softmax action classifier sharing the same trunk shape; used for behavior
// cloning and as the estimated behavior policy.
class BcNet {
 public:
  explicit BcNet(NetConfig cfg);

  const NetConfig& config() const { return cfg_; }
  const NetLayout& layout() const { return layout_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return layout_.param_count; }

  void forward_logits(std::span<const double> states, int batch, std::span<double> logits_out,
                      ForwardCache* cache = nullptr) const;
  // Row-wise stable softmax of forward_logits.
  void forward_probs(std::span<const double> states, int batch, std::span<double> probs_out) const;
  void backward(const ForwardCache& cache, std::span<const double> dlogits,
                std::span<double> grads) const;

 private:
  NetConfig cfg_;
  NetLayout layout_;
  std::vector<double> params_;
};

// Hard copy of the online parameters into the target network.
void sync_target(const DuelingQNet& online, DuelingQNet& target);

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adaptive-moment optimizer state (first/second moments plus step count).
class AdamState {
 public:
  AdamState(std::size_t param_count, AdamConfig cfg);

  void step(std::span<double> params, std::span<const double> grads);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return t_; }
  std::span<const double> m() const { return m_; }
  std::span<const double> v() const { return v_; }
  void restore(std::vector<double> m, std::vector<double> v, std::int64_t t);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  std::int64_t t_ = 0;
};

// One optimizer step with a finiteness check; throws NumericalError naming the
// offending layer when a gradient is non-finite.
void optimizer_step(std::span<double> params, std::span<const double> grads,
                    const NetLayout& layout, AdamState& opt);
void optimizer_step(DuelingQNet& net, std::span<const double> grads, AdamState& opt);
void optimizer_step(BcNet& net, std::span<const double> grads, AdamState& opt);

// Row-wise stable softmax, any width.
void softmax_rows(std::span<const double> logits, int batch, int width, std::span<double> out);

}  // namespace deepen
