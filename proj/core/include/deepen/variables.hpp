#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace deepen {

// State layout: 63 base variables (10 patient-level + 53 per-window) followed
// by 39 rate-of-change features, 102 in total.
inline constexpr int kNumPatientFeatures = 10;
inline constexpr int kNumWindowVars = 53;
inline constexpr int kNumBaseFeatures = kNumPatientFeatures + kNumWindowVars;  // 63
inline constexpr int kNumRocFeatures = 39;
inline constexpr int kNumFeatures = kNumBaseFeatures + kNumRocFeatures;  // 102
inline constexpr int kNumActions = 51;

// Trajectories cover the first 10 days after ICU admission, on a 4-hour grid.
inline constexpr int kWindowHours = 4;
inline constexpr int kMaxWindowIndex = 59;
inline constexpr int kWindowsPerDay = 6;

// Per-window variable indices (into TimeWindow::values).
namespace wvar {
// Vitals.
inline constexpr int kHr = 0;
inline constexpr int kSbp = 1;
inline constexpr int kMbp = 2;
inline constexpr int kDbp = 3;
inline constexpr int kRespRate = 4;
inline constexpr int kTemperature = 5;
inline constexpr int kPaco2 = 6;
inline constexpr int kPao2 = 7;
inline constexpr int kPfRatio = 8;
inline constexpr int kSpo2 = 9;
inline constexpr int kSofa = 10;
inline constexpr int kGcs = 11;
inline constexpr int kShockIndex = 12;
// Labs.
inline constexpr int kAlbumin = 13;
inline constexpr int kPh = 14;
inline constexpr int kCalcium = 15;
inline constexpr int kGlucose = 16;
inline constexpr int kHemoglobin = 17;
inline constexpr int kMagnesium = 18;
inline constexpr int kWbc = 19;
inline constexpr int kCreatinine = 20;
inline constexpr int kBicarbonate = 21;
inline constexpr int kSodium = 22;
inline constexpr int kLactate = 23;
inline constexpr int kChloride = 24;
inline constexpr int kPlatelets = 25;
inline constexpr int kPotassium = 26;
inline constexpr int kPtt = 27;
inline constexpr int kPt = 28;
inline constexpr int kAst = 29;
inline constexpr int kAlt = 30;
inline constexpr int kBun = 31;
inline constexpr int kInr = 32;
inline constexpr int kIonisedCalcium = 33;
inline constexpr int kTotalBilirubin = 34;
inline constexpr int kBaseExcess = 35;
inline constexpr int kPhosphate = 36;
// Feeding.
inline constexpr int kPrevCalories = 37;
inline constexpr int kPrevProtein = 38;
inline constexpr int kPrevWater = 39;
inline constexpr int kCumCalories = 40;
inline constexpr int kCumProtein = 41;
// Treatments and interventions.
inline constexpr int kMechVent = 42;
inline constexpr int kFio2 = 43;
inline constexpr int kCrrt = 44;
inline constexpr int kIvFluids = 45;
inline constexpr int kVasopressorDose = 46;
inline constexpr int kPropofolDose = 47;
inline constexpr int kInsulinDose = 48;
inline constexpr int kInsulin24h = 49;
// Others.
inline constexpr int kUrineOutput4h = 50;
inline constexpr int kTotalOutput = 51;
inline constexpr int kTimeSinceEnInit = 52;
}  // namespace wvar

// Patient-level feature indices (first 10 entries of the state vector).
namespace pvar {
inline constexpr int kAge = 0;
inline constexpr int kGender = 1;
inline constexpr int kWeight = 2;
inline constexpr int kIcuReadmission = 3;
inline constexpr int kBurns = 4;
inline constexpr int kCkd = 5;
inline constexpr int kDiabetes = 6;
inline constexpr int kSepsis = 7;
inline constexpr int kTrauma = 8;
inline constexpr int kElixhauser = 9;
}  // namespace pvar

const std::array<std::string_view, kNumPatientFeatures>& patient_feature_names();
const std::array<std::string_view, kNumWindowVars>& window_var_names();

// Index of a window variable by name, or -1.
int window_var_index(std::string_view name);

// Ordered names of the full 102-feature state vector.
const std::vector<std::string>& feature_names();

// Feature-vector indices of the 39 variables that gain a rate-of-change
// feature (weight, the 13 vitals, the 24 labs, 4-hourly urine output).
const std::array<int, kNumRocFeatures>& roc_base_feature_indices();

// Window variables eligible for missing values in ingested data (continuous
// vitals and labs; scores, flags, feeding and dose fields must be present).
bool window_var_maskable(int wv);

// Window variables constrained to {0, 1}.
bool window_var_binary(int wv);

}  // namespace deepen
