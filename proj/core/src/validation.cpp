#include "deepen/validation.hpp"

#include <cmath>

namespace deepen {

std::string Violation::message() const {
  std::string msg = field + ": " + rule;
  if (window_index >= 0) msg += " (window " + std::to_string(window_index) + ")";
  return msg;
}

namespace {

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

void check_binary(std::vector<Violation>& out, const std::string& field, int value) {
  if (value != 0 && value != 1) out.push_back({field, "must be 0 or 1"});
}

}  // namespace

std::vector<Violation> validate_record(const PatientRecord& record) {
  std::vector<Violation> out;

  if (record.windows.empty()) {
    out.push_back({"windows", "must be nonempty"});
    return out;
  }
  if (!(record.weight_kg > 0.0)) out.push_back({"weight_kg", "must be > 0"});
  if (!(record.height_cm > 0.0)) out.push_back({"height_cm", "must be > 0"});
  check_binary(out, "gender", record.gender);
  check_binary(out, "icu_readmission", record.icu_readmission);
  check_binary(out, "burns", record.burns);
  check_binary(out, "ckd", record.ckd);
  check_binary(out, "diabetes", record.diabetes);
  check_binary(out, "sepsis", record.sepsis);
  check_binary(out, "trauma", record.trauma);
  check_binary(out, "mortality", record.mortality);

  for (std::size_t i = 0; i < record.windows.size(); ++i) {
    const TimeWindow& w = record.windows[i];
    const int wi = static_cast<int>(i);

    if (w.t_index < 0) out.push_back({"t_index", "must be >= 0", wi});
    if (w.t_index > kMaxWindowIndex)
      out.push_back({"t_index", "window must lie within the first 10 days post-ICU admission", wi});
    if (i > 0 && w.t_index != record.windows[i - 1].t_index + 1)
      out.push_back({"t_index", "timestamps must increase in consecutive 4-hour steps", wi});

    const double sofa = w.values[wvar::kSofa];
    if (std::isnan(sofa) || sofa < 0.0 || sofa > 24.0)
      out.push_back({"SOFA", "must be in [0, 24]", wi});
    const double gcs = w.values[wvar::kGcs];
    if (std::isnan(gcs) || gcs < 3.0 || gcs > 15.0)
      out.push_back({"GCS", "must be in [3, 15]", wi});

    for (int wv = 0; wv < kNumWindowVars; ++wv) {
      const double v = w.values[wv];
      if (window_var_binary(wv) && !std::isnan(v) && !is_binary(v))
        out.push_back({std::string(window_var_names()[wv]), "must be 0 or 1", wi});
      if (std::isnan(v) && !window_var_maskable(wv) && wv != wvar::kSofa && wv != wvar::kGcs)
        out.push_back({std::string(window_var_names()[wv]), "must be present", wi});
    }

    if (!(w.dose.calories > 0.0) || !(w.dose.protein > 0.0) || !(w.dose.water > 0.0))
      out.push_back({"dose_administered", "dose components must be > 0", wi});
  }

  return out;
}

}  // namespace deepen
