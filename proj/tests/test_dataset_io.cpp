#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "deepen/cohort_synth.hpp"
#include "deepen/dataset_io.hpp"
#include "deepen/errors.hpp"
#include "support/test_helpers.hpp"

using namespace deepen;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "deepen_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cohort write/read round-trips bit-exactly") {
  const auto dir = temp_dir();
  SynthConfig cfg;
  cfg.n_patients = 10;
  cfg.seed = 42;
  const auto records = generate_cohort(cfg);
  DatasetManifest manifest = make_default_manifest();
  manifest.counts.train_patients = 10;

  const auto data_a = (dir / "a.jsonl").string();
  const auto mani_a = (dir / "a_manifest.json").string();
  write_dataset(data_a, mani_a, records, manifest);

  auto [read_back, manifest_back] = read_dataset(data_a, mani_a);
  CHECK(read_back.size() == records.size());

  const auto data_b = (dir / "b.jsonl").string();
  const auto mani_b = (dir / "b_manifest.json").string();
  write_dataset(data_b, mani_b, read_back, manifest_back);
  CHECK(read_file(data_a) == read_file(data_b));
  CHECK(read_file(mani_a) == read_file(mani_b));
}

TEST_CASE("empty dataset file reads as an empty cohort") {
  const auto dir = temp_dir();
  const auto data = (dir / "empty.jsonl").string();
  const auto mani = (dir / "empty_manifest.json").string();
  std::ofstream(data).close();
  write_manifest(mani, make_default_manifest());
  auto [records, manifest] = read_dataset(data, mani);
  CHECK(records.empty());
  CHECK(manifest.counts.train_patients == 0);
  CHECK(manifest.counts.train_transitions == 0);
}

TEST_CASE("malformed line reports its line number") {
  const auto dir = temp_dir();
  const auto data = (dir / "bad.jsonl").string();
  const auto mani = (dir / "bad_manifest.json").string();
  write_manifest(mani, make_default_manifest());
  {
    SynthConfig cfg;
    cfg.n_patients = 1;
    write_cohort(data, generate_cohort(cfg));
    std::ofstream append(data, std::ios::app);
    append << "{not json}\n";
  }
  try {
    read_dataset(data, mani);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("manifest with the wrong feature count is a schema error") {
  const auto dir = temp_dir();
  const auto mani = (dir / "short_manifest.json").string();
  {
    std::ofstream out(mani);
    out << R"({"format":"deepen-manifest","version":1,"config_hash":"","feature_names":[)";
    for (int i = 0; i < 101; ++i) out << (i ? "," : "") << "\"f" << i << "\"";
    out << R"(],"feature_means":null,"feature_stds":null,)"
        << R"("action_thresholds":{"calories":[1.91,3.05,4.13],"protein":[0.08,0.14,0.19],)"
        << R"("water":[3.61,5.40,8.15]},"split_seed":0,)"
        << R"("counts":{"train_patients":0,"test_patients":0,"train_transitions":0,"test_transitions":0}})";
  }
  CHECK_THROWS_AS(read_manifest(mani), SchemaError);
}

TEST_CASE("invalid records are rejected at read time") {
  const auto dir = temp_dir();
  const auto data = (dir / "invalid.jsonl").string();
  const auto mani = (dir / "invalid_manifest.json").string();
  write_manifest(mani, make_default_manifest());
  auto record = testing::make_record();
  record.windows[0].values[wvar::kSofa] = 99.0;
  write_cohort(data, {record});
  CHECK_THROWS_AS(read_dataset(data, mani), DataError);
}

TEST_CASE("transitions round-trip preserves every value") {
  const auto dir = temp_dir();
  SynthConfig cfg;
  cfg.n_patients = 6;
  cfg.seed = 5;
  const auto records = generate_cohort(cfg);
  FeaturizeOptions opts;
  opts.split_seed = 3;
  TransitionDataset ds = build_transitions(records, opts, RewardConfig{});
  ds.manifest.config_hash = "cafe";

  const auto trans_a = (dir / "trans_a.jsonl").string();
  const auto mani = (dir / "trans_manifest.json").string();
  write_transitions(trans_a, ds);
  write_manifest(mani, ds.manifest);

  TransitionDataset back = read_transitions(trans_a, mani);
  REQUIRE(back.trajectories.size() == ds.trajectories.size());
  const auto trans_b = (dir / "trans_b.jsonl").string();
  write_transitions(trans_b, back);
  CHECK(read_file(trans_a) == read_file(trans_b));

  // Spot-check the in-memory contents as well.
  CHECK(back.trajectories[0].states == ds.trajectories[0].states);
  CHECK(back.trajectories[0].actions == ds.trajectories[0].actions);
  CHECK(back.trajectories[0].rewards == ds.trajectories[0].rewards);
}
