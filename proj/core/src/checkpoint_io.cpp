#include "deepen/checkpoint_io.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "deepen/errors.hpp"

namespace deepen {

namespace {
using ordered_json = nlohmann::ordered_json;
using nlohmann::json;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ordered_json j;
  j["format"] = "deepen-checkpoint";
  j["version"] = 1;
  j["kind"] = ckpt.kind;
  j["config_hash"] = ckpt.config_hash;
  j["net"] = {{"input_dim", ckpt.net_config.input_dim},
              {"hidden", ckpt.net_config.hidden},
              {"actions", ckpt.net_config.actions},
              {"init_seed", ckpt.net_config.init_seed}};
  j["step"] = ckpt.step;
  if (ckpt.has_selection_metric) j["selection_metric"] = ckpt.selection_metric;
  j["params"] = ckpt.params;
  j["adam"] = {{"m", ckpt.adam_m}, {"v", ckpt.adam_v}, {"t", ckpt.adam_t}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("checkpoint parse error in " + path + ": " + e.what());
  }
  if (j.value("format", "") != "deepen-checkpoint")
    throw SchemaError("not a deepen checkpoint: " + path);
  if (j.value("version", 0) != 1) throw SchemaError("unsupported checkpoint version");
  Checkpoint c;
  c.kind = j.at("kind").get<std::string>();
  c.config_hash = j.value("config_hash", "");
  const auto& n = j.at("net");
  c.net_config.input_dim = n.at("input_dim").get<int>();
  c.net_config.hidden = n.at("hidden").get<std::vector<int>>();
  c.net_config.actions = n.at("actions").get<int>();
  c.net_config.init_seed = n.at("init_seed").get<std::uint64_t>();
  c.step = j.at("step").get<std::int64_t>();
  if (j.contains("selection_metric")) {
    c.selection_metric = j.at("selection_metric").get<double>();
    c.has_selection_metric = true;
  }
  c.params = j.at("params").get<std::vector<double>>();
  const auto& a = j.at("adam");
  c.adam_m = a.at("m").get<std::vector<double>>();
  c.adam_v = a.at("v").get<std::vector<double>>();
  c.adam_t = a.at("t").get<std::int64_t>();
  return c;
}

namespace {

Checkpoint make_common(const NetConfig& cfg, std::span<const double> params, const AdamState& opt,
                       std::int64_t step, const char* kind) {
  Checkpoint c;
  c.kind = kind;
  c.net_config = cfg;
  c.params.assign(params.begin(), params.end());
  c.adam_m.assign(opt.m().begin(), opt.m().end());
  c.adam_v.assign(opt.v().begin(), opt.v().end());
  c.adam_t = opt.step_count();
  c.step = step;
  return c;
}

void check_sizes(const Checkpoint& ckpt, std::size_t expected, const char* kind) {
  if (ckpt.kind != kind)
    throw SchemaError("checkpoint kind '" + ckpt.kind + "', expected '" + kind + "'");
  if (ckpt.params.size() != expected)
    throw SchemaError("checkpoint parameter count " + std::to_string(ckpt.params.size()) +
                      " does not match layout (" + std::to_string(expected) + ")");
}

}  // namespace

Checkpoint make_checkpoint(const DuelingQNet& net, const AdamState& opt, std::int64_t step) {
  return make_common(net.config(), net.params(), opt, step, "dueling_q");
}

Checkpoint make_checkpoint(const BcNet& net, const AdamState& opt, std::int64_t step) {
  return make_common(net.config(), net.params(), opt, step, "bc_softmax");
}

DuelingQNet dueling_from_checkpoint(const Checkpoint& ckpt) {
  DuelingQNet net(ckpt.net_config);
  check_sizes(ckpt, net.param_count(), "dueling_q");
  std::copy(ckpt.params.begin(), ckpt.params.end(), net.params().begin());
  return net;
}

BcNet bc_from_checkpoint(const Checkpoint& ckpt) {
  BcNet net(ckpt.net_config);
  check_sizes(ckpt, net.param_count(), "bc_softmax");
  std::copy(ckpt.params.begin(), ckpt.params.end(), net.params().begin());
  return net;
}

}  // namespace deepen
