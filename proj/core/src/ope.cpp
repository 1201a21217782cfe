#include "deepen/ope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "deepen/action_codec.hpp"
#include "deepen/errors.hpp"
#include "deepen/reward.hpp"
#include "deepen/rng.hpp"
#include "deepen/stats.hpp"

namespace deepen {

namespace {
using ordered_json = nlohmann::ordered_json;
using nlohmann::json;
}  // namespace

std::vector<WeightedTrajectory> weight_trajectories(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& eval_policy,
    const Policy& behavior_policy) {
  std::vector<WeightedTrajectory> out;
  out.reserve(trajectories.size());
  std::vector<double> pe, pb;
  for (const auto* traj : trajectories) {
    const std::size_t n = traj->size();
    pe.assign(n * kNumActions, 0.0);
    pb.assign(n * kNumActions, 0.0);
    eval_policy.action_probs(*traj, pe);
    behavior_policy.action_probs(*traj, pb);
    WeightedTrajectory wt;
    wt.log_rho.resize(n);
    wt.rewards.assign(traj->rewards.begin(), traj->rewards.end());
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t a = static_cast<std::size_t>(traj->actions[t]);
      acc += std::log(pe[t * kNumActions + a]) - std::log(pb[t * kNumActions + a]);
      wt.log_rho[t] = acc;
    }
    out.push_back(std::move(wt));
  }
  return out;
}

double cwpdis_from_weighted(const std::vector<WeightedTrajectory>& weighted,
                            const std::vector<std::size_t>& selection, double gamma) {
  if (selection.empty()) throw DataError("cwpdis: empty trajectory set");
  std::size_t max_len = 0;
  for (std::size_t idx : selection) max_len = std::max(max_len, weighted[idx].log_rho.size());

  std::vector<double> num_terms(selection.size()), den_terms(selection.size());
  double value = 0.0;
  double discount = 1.0;
  for (std::size_t t = 0; t < max_len; ++t) {
    // Shifted-exponential aggregation keeps long products of ratios stable.
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : selection) {
      const auto& wt = weighted[idx];
      const double lr = t < wt.log_rho.size() ? wt.log_rho[t] : wt.log_rho.back();
      m = std::max(m, lr);
    }
    if (std::isinf(m)) {  // zero total weight at this step
      discount *= gamma;
      continue;
    }
    std::size_t k = 0;
    for (std::size_t idx : selection) {
      const auto& wt = weighted[idx];
      const bool alive = t < wt.log_rho.size();
      const double lr = alive ? wt.log_rho[t] : wt.log_rho.back();
      const double w = std::exp(lr - m);
      den_terms[k] = w;
      num_terms[k] = alive ? w * wt.rewards[t] : 0.0;
      ++k;
    }
    const double den = pairwise_sum(den_terms);
    if (den > 0.0) value += discount * pairwise_sum(num_terms) / den;
    discount *= gamma;
  }
  return value;
}

double cwpdis(const std::vector<const FeaturizedTrajectory*>& trajectories,
              const Policy& eval_policy, const Policy& behavior_policy, double gamma) {
  if (trajectories.empty()) throw DataError("cwpdis: empty trajectory set");
  const auto weighted = weight_trajectories(trajectories, eval_policy, behavior_policy);
  std::vector<std::size_t> all(weighted.size());
  std::iota(all.begin(), all.end(), 0);
  return cwpdis_from_weighted(weighted, all, gamma);
}

double discounted_return(const FeaturizedTrajectory& traj, double gamma) {
  double value = 0.0;
  double discount = 1.0;
  for (double r : traj.rewards) {
    value += discount * r;
    discount *= gamma;
  }
  return value;
}

BinnedCurve return_mortality_curve(const std::vector<double>& returns,
                                   const std::vector<int>& mortality, int n_bins) {
  if (returns.size() != mortality.size())
    throw DataError("return_mortality_curve: size mismatch");
  const std::size_t n = returns.size();
  if (n_bins <= 0 || static_cast<std::size_t>(n_bins) > n)
    throw DataError("return_mortality_curve: need at least one trajectory per bin");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return returns[a] < returns[b]; });

  BinnedCurve curve;
  curve.bins.reserve(static_cast<std::size_t>(n_bins));
  for (int b = 0; b < n_bins; ++b) {
    const std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(n_bins);
    const std::size_t hi = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(n_bins);
    if (lo == hi) continue;
    CurveBin bin;
    bin.count = static_cast<std::int64_t>(hi - lo);
    bin.x_lo = returns[order[lo]];
    bin.x_hi = returns[order[hi - 1]];
    double sum_x = 0.0;
    std::size_t deaths = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      sum_x += returns[order[i]];
      deaths += static_cast<std::size_t>(mortality[order[i]]);
    }
    bin.x_mean = sum_x / static_cast<double>(hi - lo);
    bin.y = static_cast<double>(deaths) / static_cast<double>(hi - lo);
    const Interval ci = wilson_interval(deaths, hi - lo);
    bin.ci_lo = ci.lo;
    bin.ci_hi = ci.hi;
    curve.bins.push_back(bin);
  }

  std::vector<double> mort(n);
  for (std::size_t i = 0; i < n; ++i) mort[i] = static_cast<double>(mortality[i]);
  curve.spearman_rho = spearman(returns, mort);
  curve.spearman_z = spearman_z(curve.spearman_rho, n);
  return curve;
}

MortalityEstimate estimate_policy_mortality(double policy_return, const BinnedCurve& calibration) {
  const auto& bins = calibration.bins;
  if (bins.empty()) throw DataError("estimate_policy_mortality: empty calibration curve");
  MortalityEstimate est;
  if (policy_return <= bins.front().x_mean) {
    est.mortality = bins.front().y;
    est.clamped = policy_return < bins.front().x_mean;
    return est;
  }
  if (policy_return >= bins.back().x_mean) {
    est.mortality = bins.back().y;
    est.clamped = policy_return > bins.back().x_mean;
    return est;
  }
  for (std::size_t i = 0; i + 1 < bins.size(); ++i) {
    if (policy_return <= bins[i + 1].x_mean) {
      const double x0 = bins[i].x_mean, x1 = bins[i + 1].x_mean;
      const double f = x1 > x0 ? (policy_return - x0) / (x1 - x0) : 0.0;
      est.mortality = bins[i].y * (1.0 - f) + bins[i + 1].y * f;
      return est;
    }
  }
  est.mortality = bins.back().y;
  return est;
}

namespace {

// Sampled policy action per step (deterministic under seed); the mode of a
// deterministic policy, a draw for stochastic ones.
std::vector<std::vector<int>> sample_policy_actions(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& policy,
    std::uint64_t sample_seed) {
  std::vector<std::vector<int>> out(trajectories.size());
  std::vector<double> probs;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& traj = *trajectories[i];
    probs.assign(traj.size() * kNumActions, 0.0);
    policy.action_probs(traj, probs);
    Rng rng(derive_seed(sample_seed, "policy-action-sample", i));
    out[i].resize(traj.size());
    for (std::size_t t = 0; t < traj.size(); ++t) {
      const double* row = probs.data() + t * kNumActions;
      const double u = rng.uniform();
      double acc = 0.0;
      int chosen = kNumActions - 1;
      for (int a = 0; a < kNumActions; ++a) {
        acc += row[a];
        if (u < acc) {
          chosen = a;
          break;
        }
      }
      out[i][t] = chosen;
    }
  }
  return out;
}

int component_level(int action_id, int component) {
  const ActionCode code = decode_action(action_id);
  switch (component) {
    case 0: return code.cal_level;
    case 1: return code.pro_level;
    default: return code.water_level;
  }
}

const char* kComponentNames[3] = {"calories", "protein", "water"};

}  // namespace

std::vector<DeviationCurve> dosage_deviation_curves(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& policy,
    std::uint64_t sample_seed) {
  const auto actions = sample_policy_actions(trajectories, policy, sample_seed);
  std::vector<DeviationCurve> curves(3);
  for (int comp = 0; comp < 3; ++comp) {
    // diff in {-3..3}: per bin, mortality of the patients owning the steps.
    std::array<std::int64_t, 7> deaths{}, counts{};
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& traj = *trajectories[i];
      for (std::size_t t = 0; t < traj.size(); ++t) {
        const int diff =
            component_level(actions[i][t], comp) - component_level(traj.actions[t], comp);
        const std::size_t bin = static_cast<std::size_t>(diff + 3);
        counts[bin] += 1;
        deaths[bin] += traj.meta.mortality;
      }
    }
    DeviationCurve curve;
    curve.component = kComponentNames[comp];
    for (int d = -3; d <= 3; ++d) {
      const std::size_t bin = static_cast<std::size_t>(d + 3);
      DeviationBin b;
      b.diff = d;
      b.count = counts[bin];
      if (counts[bin] > 0) {
        b.y = static_cast<double>(deaths[bin]) / static_cast<double>(counts[bin]);
        const Interval ci = wilson_interval(static_cast<std::size_t>(deaths[bin]),
                                            static_cast<std::size_t>(counts[bin]));
        b.ci_lo = ci.lo;
        b.ci_hi = ci.hi;
      }
      curve.bins.push_back(b);
    }
    curves[static_cast<std::size_t>(comp)] = std::move(curve);
  }
  return curves;
}

std::vector<DeviationCurve> biomarker_deviation_curves(
    const std::vector<const FeaturizedTrajectory*>& trajectories, const Policy& policy,
    std::uint64_t sample_seed, const std::array<double, 2>& glucose_range,
    const std::array<double, 2>& phosphate_range) {
  const auto actions = sample_policy_actions(trajectories, policy, sample_seed);
  // Pair 0: calorie differences vs glucose deviation; pair 1: protein vs phosphate.
  std::vector<DeviationCurve> curves(2);
  for (int pair = 0; pair < 2; ++pair) {
    std::array<double, 7> dev_sum{};
    std::array<std::int64_t, 7> counts{};
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      const auto& traj = *trajectories[i];
      for (std::size_t t = 0; t + 1 < traj.size(); ++t) {
        const double biomarker =
            pair == 0 ? traj.aux[t].glucose_next : traj.aux[t].phosphate_next;
        if (std::isnan(biomarker)) continue;
        const int diff =
            component_level(actions[i][t], pair) - component_level(traj.actions[t], pair);
        const std::size_t bin = static_cast<std::size_t>(diff + 3);
        dev_sum[bin] += deviation(biomarker, pair == 0 ? glucose_range : phosphate_range);
        counts[bin] += 1;
      }
    }
    DeviationCurve curve;
    curve.component = pair == 0 ? "calories-glucose" : "protein-phosphate";
    for (int d = -3; d <= 3; ++d) {
      const std::size_t bin = static_cast<std::size_t>(d + 3);
      DeviationBin b;
      b.diff = d;
      b.count = counts[bin];
      if (counts[bin] > 0) b.y = dev_sum[bin] / static_cast<double>(counts[bin]);
      curve.bins.push_back(b);
    }
    curves[static_cast<std::size_t>(pair)] = std::move(curve);
  }
  return curves;
}

namespace {

std::array<std::array<double, 4>, 3> action_level_frequencies(
    const std::vector<std::vector<int>>& actions) {
  std::array<std::array<double, 4>, 3> freq{};
  std::int64_t total = 0;
  for (const auto& traj_actions : actions) {
    for (int a : traj_actions) {
      const ActionCode code = decode_action(a);
      freq[0][static_cast<std::size_t>(code.cal_level - 1)] += 1.0;
      freq[1][static_cast<std::size_t>(code.pro_level - 1)] += 1.0;
      freq[2][static_cast<std::size_t>(code.water_level - 1)] += 1.0;
      ++total;
    }
  }
  if (total > 0)
    for (auto& comp : freq)
      for (auto& f : comp) f /= static_cast<double>(total);
  return freq;
}

}  // namespace

OpeReport build_ope_report(const std::vector<const FeaturizedTrajectory*>& trajectories,
                           const std::vector<const Policy*>& policies, const BcPolicy& behavior,
                           const OpeOptions& options) {
  if (trajectories.empty()) throw DataError("build_ope_report: empty trajectory set");
  const std::size_t n = trajectories.size();

  OpeReport report;
  report.options = options;
  report.n_trajectories = static_cast<std::int64_t>(n);

  // Empirical returns and mortality anchor the calibration curve.
  std::vector<double> returns(n);
  std::vector<int> mortality(n);
  for (std::size_t i = 0; i < n; ++i) {
    returns[i] = discounted_return(*trajectories[i], options.gamma);
    mortality[i] = trajectories[i]->meta.mortality;
  }
  report.behavior_mean_return = mean(returns);
  std::size_t deaths = 0;
  for (int m : mortality) deaths += static_cast<std::size_t>(m);
  report.empirical_mortality = static_cast<double>(deaths) / static_cast<double>(n);
  report.calibration = return_mortality_curve(returns, mortality, options.calibration_bins);

  // Bootstrap index sets are shared across policies for paired comparisons.
  std::vector<std::vector<std::size_t>> resamples(
      static_cast<std::size_t>(std::max(0, options.bootstrap_resamples)));
  {
    Rng rng(derive_seed(options.seed, "ope-bootstrap"));
    for (auto& sel : resamples) {
      sel.resize(n);
      for (auto& idx : sel) idx = static_cast<std::size_t>(rng.uniform_index(n));
    }
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  for (const Policy* policy : policies) {
    PolicyEvaluation ev;
    ev.policy = std::string(policy->name());

    // Deterministic policies are smoothed toward uniform for the importance
    // ratios; stochastic ones already have full support.
    const bool stochastic = ev.policy == "random" || ev.policy == "bc";
    const SmoothedPolicy smoothed(*policy, options.smoothing_kappa);
    const Policy& eval_policy = stochastic ? *policy : static_cast<const Policy&>(smoothed);

    const auto weighted = weight_trajectories(trajectories, eval_policy, behavior);
    ev.cwpdis_value = cwpdis_from_weighted(weighted, all, options.gamma);

    std::vector<double> boot_values;
    boot_values.reserve(resamples.size());
    for (const auto& sel : resamples)
      boot_values.push_back(cwpdis_from_weighted(weighted, sel, options.gamma));

    if (!boot_values.empty()) {
      ev.cwpdis_se = sample_std(boot_values);
      ev.cwpdis_ci_lo = percentile(boot_values, 2.5);
      ev.cwpdis_ci_hi = percentile(boot_values, 97.5);
    }

    if (ev.policy == "clinician") {
      // The clinician generated the data; report its empirical mortality
      // directly rather than a curve interpolation.
      ev.mortality_from_empirical = true;
      ev.est_mortality = report.empirical_mortality;
      std::vector<double> boot_mort;
      boot_mort.reserve(resamples.size());
      for (const auto& sel : resamples) {
        std::size_t d = 0;
        for (std::size_t idx : sel) d += static_cast<std::size_t>(mortality[idx]);
        boot_mort.push_back(static_cast<double>(d) / static_cast<double>(sel.size()));
      }
      if (!boot_mort.empty()) {
        ev.est_mortality_se = sample_std(boot_mort);
        ev.est_mortality_ci_lo = percentile(boot_mort, 2.5);
        ev.est_mortality_ci_hi = percentile(boot_mort, 97.5);
      }
    } else {
      const MortalityEstimate est = estimate_policy_mortality(ev.cwpdis_value, report.calibration);
      ev.est_mortality = est.mortality;
      ev.return_clamped = est.clamped;
      std::vector<double> boot_mort;
      boot_mort.reserve(boot_values.size());
      for (double v : boot_values)
        boot_mort.push_back(estimate_policy_mortality(v, report.calibration).mortality);
      if (!boot_mort.empty()) {
        ev.est_mortality_se = sample_std(boot_mort);
        ev.est_mortality_ci_lo = percentile(boot_mort, 2.5);
        ev.est_mortality_ci_hi = percentile(boot_mort, 97.5);
      }
    }

    ev.dosage_curves = dosage_deviation_curves(trajectories, *policy, options.seed);
    ev.biomarker_curves = biomarker_deviation_curves(trajectories, *policy, options.seed,
                                                     options.glucose_range, options.phosphate_range);
    ev.action_level_freq =
        action_level_frequencies(sample_policy_actions(trajectories, *policy, options.seed));
    report.policies.push_back(std::move(ev));
  }
  return report;
}

namespace {

ordered_json curve_to_json(const BinnedCurve& c) {
  ordered_json bins = ordered_json::array();
  for (const auto& b : c.bins)
    bins.push_back({{"x_lo", b.x_lo},
                    {"x_hi", b.x_hi},
                    {"x_mean", b.x_mean},
                    {"y", b.y},
                    {"ci_lo", b.ci_lo},
                    {"ci_hi", b.ci_hi},
                    {"count", b.count}});
  return {{"bins", std::move(bins)},
          {"spearman_rho", c.spearman_rho},
          {"spearman_z", c.spearman_z}};
}

BinnedCurve curve_from_json(const json& j) {
  BinnedCurve c;
  for (const auto& b : j.at("bins")) {
    CurveBin bin;
    bin.x_lo = b.at("x_lo").get<double>();
    bin.x_hi = b.at("x_hi").get<double>();
    bin.x_mean = b.at("x_mean").get<double>();
    bin.y = b.at("y").get<double>();
    bin.ci_lo = b.at("ci_lo").get<double>();
    bin.ci_hi = b.at("ci_hi").get<double>();
    bin.count = b.at("count").get<std::int64_t>();
    c.bins.push_back(bin);
  }
  c.spearman_rho = j.at("spearman_rho").get<double>();
  c.spearman_z = j.at("spearman_z").get<double>();
  return c;
}

ordered_json deviation_curves_to_json(const std::vector<DeviationCurve>& curves) {
  ordered_json out = ordered_json::array();
  for (const auto& c : curves) {
    ordered_json bins = ordered_json::array();
    for (const auto& b : c.bins)
      bins.push_back({{"diff", b.diff},
                      {"y", b.y},
                      {"ci_lo", b.ci_lo},
                      {"ci_hi", b.ci_hi},
                      {"count", b.count}});
    out.push_back({{"component", c.component}, {"bins", std::move(bins)}});
  }
  return out;
}

std::vector<DeviationCurve> deviation_curves_from_json(const json& j) {
  std::vector<DeviationCurve> out;
  for (const auto& cj : j) {
    DeviationCurve c;
    c.component = cj.at("component").get<std::string>();
    for (const auto& b : cj.at("bins")) {
      DeviationBin bin;
      bin.diff = b.at("diff").get<int>();
      bin.y = b.at("y").get<double>();
      bin.ci_lo = b.at("ci_lo").get<double>();
      bin.ci_hi = b.at("ci_hi").get<double>();
      bin.count = b.at("count").get<std::int64_t>();
      c.bins.push_back(bin);
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

void write_ope_report(const std::string& path, const OpeReport& report) {
  ordered_json j;
  j["format"] = "deepen-ope-report";
  j["version"] = 1;
  j["config_hash"] = report.config_hash;
  j["options"] = {{"gamma", report.options.gamma},
                  {"calibration_bins", report.options.calibration_bins},
                  {"bootstrap_resamples", report.options.bootstrap_resamples},
                  {"behavior_floor", report.options.behavior_floor},
                  {"smoothing_kappa", report.options.smoothing_kappa},
                  {"seed", report.options.seed},
                  {"glucose_range", report.options.glucose_range},
                  {"phosphate_range", report.options.phosphate_range}};
  j["n_trajectories"] = report.n_trajectories;
  j["behavior_mean_return"] = report.behavior_mean_return;
  j["empirical_mortality"] = report.empirical_mortality;
  j["calibration"] = curve_to_json(report.calibration);
  ordered_json policies = ordered_json::array();
  for (const auto& ev : report.policies) {
    ordered_json pj{{"policy", ev.policy},
                    {"cwpdis", ev.cwpdis_value},
                    {"cwpdis_se", ev.cwpdis_se},
                    {"cwpdis_ci_lo", ev.cwpdis_ci_lo},
                    {"cwpdis_ci_hi", ev.cwpdis_ci_hi},
                    {"est_mortality", ev.est_mortality},
                    {"est_mortality_se", ev.est_mortality_se},
                    {"est_mortality_ci_lo", ev.est_mortality_ci_lo},
                    {"est_mortality_ci_hi", ev.est_mortality_ci_hi},
                    {"mortality_from_empirical", ev.mortality_from_empirical},
                    {"return_clamped", ev.return_clamped},
                    {"dosage_curves", deviation_curves_to_json(ev.dosage_curves)},
                    {"biomarker_curves", deviation_curves_to_json(ev.biomarker_curves)}};
    ordered_json freq = ordered_json::array();
    for (const auto& comp : ev.action_level_freq) freq.push_back(comp);
    pj["action_level_freq"] = std::move(freq);
    policies.push_back(std::move(pj));
  }
  j["policies"] = std::move(policies);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

OpeReport read_ope_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("ope report parse error in " + path + ": " + e.what());
  }
  if (j.value("format", "") != "deepen-ope-report")
    throw SchemaError("not a deepen ope report: " + path);
  OpeReport r;
  r.config_hash = j.value("config_hash", "");
  const auto& o = j.at("options");
  r.options.gamma = o.at("gamma").get<double>();
  r.options.calibration_bins = o.at("calibration_bins").get<int>();
  r.options.bootstrap_resamples = o.at("bootstrap_resamples").get<int>();
  r.options.behavior_floor = o.at("behavior_floor").get<double>();
  r.options.smoothing_kappa = o.at("smoothing_kappa").get<double>();
  r.options.seed = o.at("seed").get<std::uint64_t>();
  r.options.glucose_range = o.at("glucose_range").get<std::array<double, 2>>();
  r.options.phosphate_range = o.at("phosphate_range").get<std::array<double, 2>>();
  r.n_trajectories = j.at("n_trajectories").get<std::int64_t>();
  r.behavior_mean_return = j.at("behavior_mean_return").get<double>();
  r.empirical_mortality = j.at("empirical_mortality").get<double>();
  r.calibration = curve_from_json(j.at("calibration"));
  for (const auto& pj : j.at("policies")) {
    PolicyEvaluation ev;
    ev.policy = pj.at("policy").get<std::string>();
    ev.cwpdis_value = pj.at("cwpdis").get<double>();
    ev.cwpdis_se = pj.at("cwpdis_se").get<double>();
    ev.cwpdis_ci_lo = pj.at("cwpdis_ci_lo").get<double>();
    ev.cwpdis_ci_hi = pj.at("cwpdis_ci_hi").get<double>();
    ev.est_mortality = pj.at("est_mortality").get<double>();
    ev.est_mortality_se = pj.at("est_mortality_se").get<double>();
    ev.est_mortality_ci_lo = pj.at("est_mortality_ci_lo").get<double>();
    ev.est_mortality_ci_hi = pj.at("est_mortality_ci_hi").get<double>();
    ev.mortality_from_empirical = pj.at("mortality_from_empirical").get<bool>();
    ev.return_clamped = pj.at("return_clamped").get<bool>();
    ev.dosage_curves = deviation_curves_from_json(pj.at("dosage_curves"));
    ev.biomarker_curves = deviation_curves_from_json(pj.at("biomarker_curves"));
    const auto& freq = pj.at("action_level_freq");
    for (std::size_t c = 0; c < 3; ++c)
      ev.action_level_freq[c] = freq.at(c).get<std::array<double, 4>>();
    r.policies.push_back(std::move(ev));
  }
  return r;
}

}  // namespace deepen
