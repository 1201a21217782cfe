#include <doctest.h>

#include "deepen/config.hpp"
#include "deepen/errors.hpp"

using namespace deepen;

TEST_CASE("defaults include all five policies") {
  const RunConfig cfg = parse_run_config("{}");
  REQUIRE(cfg.policies.size() == 5);
  CHECK(cfg.policies[0].kind == PolicyKind::kRandom);
  CHECK(cfg.policies[4].kind == PolicyKind::kDeepen);
  CHECK(cfg.train.alpha == 0.5);
  CHECK(cfg.train.gamma == 0.99);
  CHECK(cfg.train.learning_rate == 1e-4);
  CHECK(cfg.train.batch_size == 500);
  CHECK(cfg.train.total_steps == 50000);
  CHECK(cfg.reward.r_terminal == 15.0);
  CHECK(cfg.synth.mortality_rate_target == doctest::Approx(0.2246));
  CHECK(cfg.train.alpha_grid == std::vector<double>{0.01, 0.1, 0.5, 1.0});
  CHECK(cfg.train.gamma_grid == std::vector<double>{0.75, 0.9, 0.95, 0.99});
}

TEST_CASE("unknown keys are rejected with their path") {
  try {
    parse_run_config(R"({"synth": {"n_patients": 5, "frobnicate": 1}})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("synth.frobnicate") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config(R"({"unknown_top": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"cql_form": "nope"}})"), ConfigError);
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"gamma": 1.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"train": {"alpha": -0.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"featurize": {"train_fraction": 1.0}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"reward": {"glucose_range": [180, 140]}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"policies": []})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
}

TEST_CASE("sub-seeds derive from the global seed") {
  const RunConfig a = parse_run_config(R"({"seed": 1})");
  const RunConfig b = parse_run_config(R"({"seed": 2})");
  CHECK(a.synth.seed != b.synth.seed);
  CHECK(a.synth.seed != a.train.seed);
  CHECK(a.featurize.split_seed != a.ope.seed);
  // Explicit per-section seeds win over the derived ones.
  const RunConfig c = parse_run_config(R"({"seed": 1, "synth": {"seed": 777}})");
  CHECK(c.synth.seed == 777);
}

TEST_CASE("config hash is stable and seed-sensitive") {
  const RunConfig a1 = parse_run_config(R"({"seed": 5})");
  const RunConfig a2 = parse_run_config(R"({"seed": 5})");
  const RunConfig b = parse_run_config(R"({"seed": 6})");
  CHECK(config_hash(a1) == config_hash(a2));
  CHECK(config_hash(a1) != config_hash(b));
  CHECK(config_hash(a1).size() == 16);
}

TEST_CASE("cql form round-trips through names") {
  const RunConfig lse = parse_run_config(R"({"train": {"cql_form": "log-sum-exp"}})");
  CHECK(lse.train.cql_form == CqlForm::kLogSumExp);
  CHECK(cql_form_name(CqlForm::kMeanOverActions) == "mean-over-actions");
}

TEST_CASE("threshold overrides must be increasing triples") {
  CHECK_THROWS_AS(parse_run_config(R"({"featurize": {"thresholds": {"calories": [3, 2, 1]}}})"),
                  ConfigError);
  const RunConfig ok =
      parse_run_config(R"({"featurize": {"thresholds": {"calories": [1.0, 2.0, 3.0]}}})");
  CHECK(ok.featurize.thresholds.calories[0] == 1.0);
  CHECK(ok.featurize.thresholds.protein[1] == doctest::Approx(0.14));
}
