#include "deepen/variables.hpp"

#include <unordered_map>

namespace deepen {

const std::array<std::string_view, kNumPatientFeatures>& patient_feature_names() {
  static const std::array<std::string_view, kNumPatientFeatures> names = {
      "Age",   "Gender", "Weight",   "ICU readmission", "Burns",
      "CKD",   "Diabetes", "Sepsis", "Trauma",          "Elixhauser score",
  };
  return names;
}

const std::array<std::string_view, kNumWindowVars>& window_var_names() {
  static const std::array<std::string_view, kNumWindowVars> names = {
      // Vitals.
      "HR", "SBP", "MBP", "DBP", "Resp rate", "Temperature", "PaCO2", "PaO2",
      "PF ratio", "SpO2", "SOFA", "GCS", "Shock index",
      // Labs.
      "Albumin", "pH", "Calcium", "Glucose", "Hemoglobin", "Magnesium", "WBC",
      "Creatinine", "Bicarbonate", "Sodium", "Lactate", "Chloride", "Platelets",
      "Potassium", "PTT", "PT", "AST", "ALT", "BUN", "INR", "Ionised calcium",
      "Total bilirubin", "Base excess", "Phosphate",
      // Feeding.
      "Previous calories", "Previous protein", "Previous water",
      "Cumulative calories", "Cumulative protein",
      // Treatments and interventions.
      "Mechanical ventilation", "FiO2", "CRRT", "IV fluids", "Vasopressor dose",
      "Propofol dose", "Insulin dose", "24h cumulative insulin",
      // Others.
      "Urine output 4h", "Total output", "Time since EN initiation",
  };
  return names;
}

int window_var_index(std::string_view name) {
  static const std::unordered_map<std::string_view, int> index = [] {
    std::unordered_map<std::string_view, int> m;
    const auto& names = window_var_names();
    for (int i = 0; i < kNumWindowVars; ++i) m.emplace(names[i], i);
    return m;
  }();
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

const std::array<int, kNumRocFeatures>& roc_base_feature_indices() {
  static const std::array<int, kNumRocFeatures> indices = [] {
    std::array<int, kNumRocFeatures> out{};
    int n = 0;
    out[n++] = pvar::kWeight;
    for (int wv = wvar::kHr; wv <= wvar::kShockIndex; ++wv)
      out[n++] = kNumPatientFeatures + wv;
    for (int wv = wvar::kAlbumin; wv <= wvar::kPhosphate; ++wv)
      out[n++] = kNumPatientFeatures + wv;
    out[n++] = kNumPatientFeatures + wvar::kUrineOutput4h;
    return out;
  }();
  return indices;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    out.reserve(kNumFeatures);
    for (auto n : patient_feature_names()) out.emplace_back(n);
    for (auto n : window_var_names()) out.emplace_back(n);
    for (int base : roc_base_feature_indices()) out.push_back(out[base] + " roc");
    return out;
  }();
  return names;
}

bool window_var_maskable(int wv) {
  if (wv >= wvar::kHr && wv <= wvar::kShockIndex)
    return wv != wvar::kSofa && wv != wvar::kGcs;
  return wv >= wvar::kAlbumin && wv <= wvar::kPhosphate;
}

bool window_var_binary(int wv) {
  return wv == wvar::kMechVent || wv == wvar::kCrrt;
}

}  // namespace deepen
