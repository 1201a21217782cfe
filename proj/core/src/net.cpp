#include "deepen/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deepen/errors.hpp"
#include "deepen/rng.hpp"

namespace deepen {

namespace {

NetLayout build_layout(const NetConfig& cfg, bool dueling) {
  if (cfg.input_dim <= 0 || cfg.actions <= 0 || cfg.hidden.empty())
    throw ConfigError("invalid network shape");
  NetLayout layout;
  std::size_t off = 0;
  int in = cfg.input_dim;
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    const int out = cfg.hidden[i];
    if (out <= 0) throw ConfigError("hidden width must be > 0");
    DenseBlock b{"hidden" + std::to_string(i), in, out, off,
                 off + static_cast<std::size_t>(out) * static_cast<std::size_t>(in)};
    off = b.b_offset + static_cast<std::size_t>(out);
    layout.blocks.push_back(std::move(b));
    in = out;
  }
  if (dueling) {
    DenseBlock v{"value_head", in, 1, off, off + static_cast<std::size_t>(in)};
    off = v.b_offset + 1;
    layout.blocks.push_back(std::move(v));
    DenseBlock a{"advantage_head", in, cfg.actions, off,
                 off + static_cast<std::size_t>(cfg.actions) * static_cast<std::size_t>(in)};
    off = a.b_offset + static_cast<std::size_t>(cfg.actions);
    layout.blocks.push_back(std::move(a));
  } else {
    DenseBlock l{"logits_head", in, cfg.actions, off,
                 off + static_cast<std::size_t>(cfg.actions) * static_cast<std::size_t>(in)};
    off = l.b_offset + static_cast<std::size_t>(cfg.actions);
    layout.blocks.push_back(std::move(l));
  }
  layout.param_count = off;
  return layout;
}

std::vector<double> init_params(const NetLayout& layout, std::uint64_t seed) {
  std::vector<double> p(layout.param_count);
  Rng rng(derive_seed(seed, "net-init"));
  for (const auto& b : layout.blocks) {
    // Scaled-uniform fan-in initialization.
    const double bound = 1.0 / std::sqrt(static_cast<double>(b.in));
    const std::size_t nw = static_cast<std::size_t>(b.out) * static_cast<std::size_t>(b.in);
    for (std::size_t i = 0; i < nw; ++i) p[b.w_offset + i] = rng.uniform(-bound, bound);
    for (int i = 0; i < b.out; ++i) p[b.b_offset + static_cast<std::size_t>(i)] = rng.uniform(-bound, bound);
  }
  return p;
}

// y[b][o] = W x[b] + bias; y is batch x out.
void dense_forward(const double* params, const DenseBlock& blk, const double* x, int batch,
                   double* y) {
  const double* w = params + blk.w_offset;
  const double* bias = params + blk.b_offset;
  for (int b = 0; b < batch; ++b) {
    const double* xb = x + static_cast<std::size_t>(b) * blk.in;
    double* yb = y + static_cast<std::size_t>(b) * blk.out;
    for (int o = 0; o < blk.out; ++o) {
      const double* wo = w + static_cast<std::size_t>(o) * blk.in;
      double acc = bias[o];
      for (int k = 0; k < blk.in; ++k) acc += wo[k] * xb[k];
      yb[o] = acc;
    }
  }
}

// Accumulates dW/db into grads and writes dx (may be null for the input layer).
void dense_backward(const double* params, const DenseBlock& blk, const double* x, int batch,
                    const double* dy, double* grads, double* dx) {
  const double* w = params + blk.w_offset;
  double* gw = grads + blk.w_offset;
  double* gb = grads + blk.b_offset;
  for (int b = 0; b < batch; ++b) {
    const double* xb = x + static_cast<std::size_t>(b) * blk.in;
    const double* dyb = dy + static_cast<std::size_t>(b) * blk.out;
    double* dxb = dx ? dx + static_cast<std::size_t>(b) * blk.in : nullptr;
    for (int o = 0; o < blk.out; ++o) {
      const double g = dyb[o];
      if (g == 0.0) continue;
      gb[o] += g;
      double* gwo = gw + static_cast<std::size_t>(o) * blk.in;
      const double* wo = w + static_cast<std::size_t>(o) * blk.in;
      for (int k = 0; k < blk.in; ++k) gwo[k] += g * xb[k];
      if (dxb)
        for (int k = 0; k < blk.in; ++k) dxb[k] += g * wo[k];
    }
  }
}

void relu_inplace(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

// Trunk forward shared by both nets; fills cache with input + hidden outputs.
void trunk_forward(const NetConfig& cfg, const NetLayout& layout,
                   std::span<const double> params, std::span<const double> states, int batch,
                   ForwardCache& cache) {
  if (states.size() != static_cast<std::size_t>(batch) * static_cast<std::size_t>(cfg.input_dim))
    throw DataError("state batch size mismatch: got " + std::to_string(states.size()) +
                    " values for batch " + std::to_string(batch));
  cache.batch = batch;
  cache.activations.assign(cfg.hidden.size() + 1, {});
  cache.activations[0].assign(states.begin(), states.end());
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
    const DenseBlock& blk = layout.blocks[l];
    cache.activations[l + 1].assign(static_cast<std::size_t>(batch) * blk.out, 0.0);
    dense_forward(params.data(), blk, cache.activations[l].data(), batch,
                  cache.activations[l + 1].data());
    relu_inplace(cache.activations[l + 1]);
  }
}

// Backprop through the trunk given the gradient at the last hidden output.
void trunk_backward(const NetConfig& cfg, const NetLayout& layout,
                    std::span<const double> params, const ForwardCache& cache,
                    std::vector<double>& d_hidden, std::span<double> grads) {
  for (std::size_t l = cfg.hidden.size(); l-- > 0;) {
    const DenseBlock& blk = layout.blocks[l];
    const auto& post = cache.activations[l + 1];
    // ReLU mask: post-activation zero means the unit was clamped.
    for (std::size_t i = 0; i < d_hidden.size(); ++i)
      if (post[i] <= 0.0) d_hidden[i] = 0.0;
    std::vector<double> dx;
    if (l > 0) dx.assign(cache.activations[l].size(), 0.0);
    dense_backward(params.data(), blk, cache.activations[l].data(), cache.batch, d_hidden.data(),
                   grads.data(), l > 0 ? dx.data() : nullptr);
    if (l > 0) d_hidden = std::move(dx);
  }
}

}  // namespace

const DenseBlock& NetLayout::block(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b;
  throw std::out_of_range("no such block: " + name);
}

const std::string& NetLayout::block_of(std::size_t param_index) const {
  for (const auto& b : blocks) {
    const std::size_t end = b.b_offset + static_cast<std::size_t>(b.out);
    if (param_index >= b.w_offset && param_index < end) return b.name;
  }
  throw std::out_of_range("parameter index out of range");
}

DuelingQNet::DuelingQNet(NetConfig cfg)
    : cfg_(std::move(cfg)), layout_(build_layout(cfg_, true)), params_(init_params(layout_, cfg_.init_seed)) {}

void DuelingQNet::forward(std::span<const double> states, int batch, std::span<double> q_out,
                          ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  trunk_forward(cfg_, layout_, params_, states, batch, c);

  const DenseBlock& vb = layout_.block("value_head");
  const DenseBlock& ab = layout_.block("advantage_head");
  const double* last = c.activations.back().data();
  const int na = cfg_.actions;
  if (q_out.size() != static_cast<std::size_t>(batch) * static_cast<std::size_t>(na))
    throw DataError("q_out size mismatch");

  std::vector<double> value(static_cast<std::size_t>(batch));
  dense_forward(params_.data(), vb, last, batch, value.data());
  dense_forward(params_.data(), ab, last, batch, q_out.data());

  for (int b = 0; b < batch; ++b) {
    double* row = q_out.data() + static_cast<std::size_t>(b) * na;
    double mean_adv = 0.0;
    for (int a = 0; a < na; ++a) mean_adv += row[a];
    mean_adv /= static_cast<double>(na);
    const double base = value[static_cast<std::size_t>(b)] - mean_adv;
    for (int a = 0; a < na; ++a) row[a] += base;
  }
}

void DuelingQNet::backward(const ForwardCache& cache, std::span<const double> dq,
                           std::span<double> grads) const {
  if (grads.size() != layout_.param_count) throw DataError("grads size mismatch");
  std::fill(grads.begin(), grads.end(), 0.0);
  const int batch = cache.batch;
  const int na = cfg_.actions;

  const DenseBlock& vb = layout_.block("value_head");
  const DenseBlock& ab = layout_.block("advantage_head");
  const auto& last = cache.activations.back();

  // Q = V + A - mean(A):  dV = sum_a dQ,  dA_j = dQ_j - mean_a dQ.
  std::vector<double> dv(static_cast<std::size_t>(batch));
  std::vector<double> dadv(static_cast<std::size_t>(batch) * na);
  for (int b = 0; b < batch; ++b) {
    const double* row = dq.data() + static_cast<std::size_t>(b) * na;
    double s = 0.0;
    for (int a = 0; a < na; ++a) s += row[a];
    dv[static_cast<std::size_t>(b)] = s;
    const double mean_g = s / static_cast<double>(na);
    double* drow = dadv.data() + static_cast<std::size_t>(b) * na;
    for (int a = 0; a < na; ++a) drow[a] = row[a] - mean_g;
  }

  std::vector<double> d_hidden(last.size(), 0.0);
  dense_backward(params_.data(), vb, last.data(), batch, dv.data(), grads.data(), d_hidden.data());
  dense_backward(params_.data(), ab, last.data(), batch, dadv.data(), grads.data(), d_hidden.data());
  trunk_backward(cfg_, layout_, params_, cache, d_hidden, grads);
}

int DuelingQNet::argmax_action(std::span<const double> q_row) const {
  int best = 0;
  for (int a = 1; a < cfg_.actions; ++a)
    if (q_row[static_cast<std::size_t>(a)] > q_row[static_cast<std::size_t>(best)]) best = a;
  return best;
}

BcNet::BcNet(NetConfig cfg)
    : cfg_(std::move(cfg)), layout_(build_layout(cfg_, false)), params_(init_params(layout_, cfg_.init_seed)) {}

void BcNet::forward_logits(std::span<const double> states, int batch, std::span<double> logits_out,
                           ForwardCache* cache) const {
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  trunk_forward(cfg_, layout_, params_, states, batch, c);
  const DenseBlock& lb = layout_.block("logits_head");
  if (logits_out.size() != static_cast<std::size_t>(batch) * static_cast<std::size_t>(cfg_.actions))
    throw DataError("logits_out size mismatch");
  dense_forward(params_.data(), lb, c.activations.back().data(), batch, logits_out.data());
}

void BcNet::forward_probs(std::span<const double> states, int batch,
                          std::span<double> probs_out) const {
  forward_logits(states, batch, probs_out);
  std::vector<double> logits(probs_out.begin(), probs_out.end());
  softmax_rows(logits, batch, cfg_.actions, probs_out);
}

void BcNet::backward(const ForwardCache& cache, std::span<const double> dlogits,
                     std::span<double> grads) const {
  if (grads.size() != layout_.param_count) throw DataError("grads size mismatch");
  std::fill(grads.begin(), grads.end(), 0.0);
  const DenseBlock& lb = layout_.block("logits_head");
  const auto& last = cache.activations.back();
  std::vector<double> d_hidden(last.size(), 0.0);
  dense_backward(params_.data(), lb, last.data(), cache.batch, dlogits.data(), grads.data(),
                 d_hidden.data());
  trunk_backward(cfg_, layout_, params_, cache, d_hidden, grads);
}

void sync_target(const DuelingQNet& online, DuelingQNet& target) {
  if (online.param_count() != target.param_count())
    throw DataError("sync_target: mismatched network shapes");
  std::copy(online.params().begin(), online.params().end(), target.params().begin());
}

AdamState::AdamState(std::size_t param_count, AdamConfig cfg)
    : cfg_(cfg), m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw DataError("optimizer state size mismatch");
  ++t_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = cfg_.learning_rate;
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
    const double mhat = m_[i] / bias1;
    const double vhat = v_[i] / bias2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
  }
}

void AdamState::restore(std::vector<double> m, std::vector<double> v, std::int64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size())
    throw DataError("optimizer restore size mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

void optimizer_step(std::span<double> params, std::span<const double> grads,
                    const NetLayout& layout, AdamState& opt) {
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i]))
      throw NumericalError("non-finite gradient in layer " + layout.block_of(i));
  }
  opt.step(params, grads);
}

void optimizer_step(DuelingQNet& net, std::span<const double> grads, AdamState& opt) {
  optimizer_step(net.params(), grads, net.layout(), opt);
}

void optimizer_step(BcNet& net, std::span<const double> grads, AdamState& opt) {
  optimizer_step(net.params(), grads, net.layout(), opt);
}

void softmax_rows(std::span<const double> logits, int batch, int width, std::span<double> out) {
  for (int b = 0; b < batch; ++b) {
    const double* row = logits.data() + static_cast<std::size_t>(b) * width;
    double* orow = out.data() + static_cast<std::size_t>(b) * width;
    double mx = row[0];
    for (int j = 1; j < width; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < width; ++j) {
      orow[j] = std::exp(row[j] - mx);
      sum += orow[j];
    }
    for (int j = 0; j < width; ++j) orow[j] /= sum;
  }
}

}  // namespace deepen
