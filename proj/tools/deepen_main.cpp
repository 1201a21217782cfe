// deepen: offline RL engine for ICU enteral nutrition dosing.
//
// Subcommands wire the pipeline end to end over a shared run config:
//   synth -> featurize -> train-bc -> train -> eval -> report
//
// Exit codes: 0 ok, 2 config error, 3 missing input, 4 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "deepen/errors.hpp"
#include "deepen/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissingInput = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string seed;  // optional override, as text
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run config JSON file");
  cmd->add_option("--out", args.out_dir, "Output directory (overrides config out_dir)");
  cmd->add_option("--seed", args.seed, "Global seed override");
}

deepen::RunConfig resolve_config(const CommonArgs& args) {
  std::string text = "{}";
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) throw deepen::MissingInputError(args.config_path);
    text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  if (!args.seed.empty()) {
    // Replace the global seed before parsing so derived sub-seeds follow it.
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw deepen::ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
      j["seed"] = std::stoull(args.seed);
    } catch (const std::exception&) {
      throw deepen::ConfigError("--seed must be an unsigned integer");
    }
    text = j.dump();
  }
  deepen::RunConfig cfg = deepen::parse_run_config(text);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const deepen::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const deepen::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const deepen::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    if (!e.batch_indices().empty()) {
      std::cerr << "offending batch indices:";
      for (std::size_t i : e.batch_indices()) std::cerr << " " << i;
      std::cerr << "\n";
    }
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline RL pipeline for personalized enteral nutrition dosing"};
  app.require_subcommand(1);

  CommonArgs synth_args, feat_args, bc_args, train_args, eval_args, report_args;
  bool train_grid = false;
  std::string train_cql_form;
  bool report_force = false;
  std::vector<std::string> eval_policies;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic cohort dataset");
  add_common(synth, synth_args);

  CLI::App* featurize = app.add_subcommand("featurize", "Build the normalized transition dataset");
  add_common(featurize, feat_args);

  CLI::App* train_bc = app.add_subcommand("train-bc", "Train the behavior-cloning baseline");
  add_common(train_bc, bc_args);

  CLI::App* train = app.add_subcommand("train", "Train the conservative dueling double DQN");
  add_common(train, train_args);
  train->add_flag("--grid", train_grid, "Run the alpha/gamma grid search first");
  train->add_option("--cql-form", train_cql_form,
                    "CQL penalty form: mean-over-actions or log-sum-exp");

  CLI::App* eval = app.add_subcommand("eval", "Off-policy evaluation of the configured policies");
  add_common(eval, eval_args);
  eval->add_option("--policies", eval_policies,
                   "Subset of policies to evaluate (default: all configured)");

  CLI::App* report = app.add_subcommand("report", "Render plot-ready tables from the evaluation");
  add_common(report, report_args);
  report->add_flag("--force", report_force, "Accept artifacts with mixed config hashes");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    return run_guarded([&] {
      const auto cfg = resolve_config(synth_args);
      const auto summary = deepen::run_synth(cfg, cfg.out_dir);
      std::printf("synth: %lld patients, mortality %.4f, mean stay %.1f h\n",
                  static_cast<long long>(summary.n_patients), summary.mortality,
                  summary.mean_stay_hours);
      return kExitOk;
    });
  }
  if (featurize->parsed()) {
    return run_guarded([&] {
      const auto cfg = resolve_config(feat_args);
      deepen::run_featurize(cfg, cfg.out_dir);
      std::printf("featurize: wrote %s\n", deepen::artifacts::kTransitions);
      return kExitOk;
    });
  }
  if (train_bc->parsed()) {
    return run_guarded([&] {
      const auto cfg = resolve_config(bc_args);
      deepen::run_train_bc(cfg, cfg.out_dir);
      std::printf("train-bc: wrote %s\n", deepen::artifacts::kBcCheckpoint);
      return kExitOk;
    });
  }
  if (train->parsed()) {
    return run_guarded([&] {
      auto cfg = resolve_config(train_args);
      if (!train_cql_form.empty()) cfg.train.cql_form = deepen::cql_form_from_name(train_cql_form);
      deepen::run_train(cfg, cfg.out_dir, train_grid);
      std::printf("train: wrote %s\n", deepen::artifacts::kQCheckpoint);
      return kExitOk;
    });
  }
  if (eval->parsed()) {
    return run_guarded([&] {
      auto cfg = resolve_config(eval_args);
      if (!eval_policies.empty()) {
        std::vector<deepen::PolicySpec> filtered;
        for (const auto& name : eval_policies) {
          const auto kind = deepen::policy_kind_from_name(name);
          for (const auto& spec : cfg.policies)
            if (spec.kind == kind) filtered.push_back(spec);
        }
        if (filtered.empty()) throw deepen::ConfigError("--policies selected nothing");
        cfg.policies = std::move(filtered);
      }
      deepen::run_eval(cfg, cfg.out_dir);
      std::printf("eval: wrote %s\n", deepen::artifacts::kOpeReport);
      return kExitOk;
    });
  }
  if (report->parsed()) {
    return run_guarded([&] {
      const auto cfg = resolve_config(report_args);
      deepen::run_report(cfg, cfg.out_dir, report_force);
      std::printf("report: wrote %s/\n", deepen::artifacts::kTablesDir);
      return kExitOk;
    });
  }
  return kExitGeneric;
}
