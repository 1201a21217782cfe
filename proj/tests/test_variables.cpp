#include <doctest.h>

#include <set>

#include "deepen/variables.hpp"

using namespace deepen;

TEST_CASE("feature layout counts") {
  CHECK(kNumPatientFeatures + kNumWindowVars == 63);
  CHECK(kNumBaseFeatures + kNumRocFeatures == 102);
  CHECK(feature_names().size() == 102);
  CHECK(window_var_names().size() == 53);
}

TEST_CASE("rate-of-change set is weight, vitals, labs and urine output") {
  const auto& roc = roc_base_feature_indices();
  CHECK(roc.size() == 39);
  CHECK(roc[0] == pvar::kWeight);
  // 13 vitals, 24 labs, then 4-hourly urine output.
  CHECK(roc[1] == kNumPatientFeatures + wvar::kHr);
  CHECK(roc[13] == kNumPatientFeatures + wvar::kShockIndex);
  CHECK(roc[14] == kNumPatientFeatures + wvar::kAlbumin);
  CHECK(roc[37] == kNumPatientFeatures + wvar::kPhosphate);
  CHECK(roc[38] == kNumPatientFeatures + wvar::kUrineOutput4h);
}

TEST_CASE("feature names are unique and roc names derive from their base") {
  std::set<std::string> names(feature_names().begin(), feature_names().end());
  CHECK(names.size() == feature_names().size());
  CHECK(feature_names()[63] == "Weight roc");
  CHECK(feature_names()[101] == "Urine output 4h roc");
  CHECK(feature_names()[static_cast<std::size_t>(kNumPatientFeatures + wvar::kGlucose)] ==
        "Glucose");
}

TEST_CASE("window variable lookup and maskability") {
  CHECK(window_var_index("Glucose") == wvar::kGlucose);
  CHECK(window_var_index("no such var") == -1);
  CHECK(window_var_maskable(wvar::kGlucose));
  CHECK(window_var_maskable(wvar::kHr));
  CHECK_FALSE(window_var_maskable(wvar::kSofa));
  CHECK_FALSE(window_var_maskable(wvar::kGcs));
  CHECK_FALSE(window_var_maskable(wvar::kPrevCalories));
  CHECK(window_var_binary(wvar::kMechVent));
  CHECK(window_var_binary(wvar::kCrrt));
  CHECK_FALSE(window_var_binary(wvar::kFio2));
}
