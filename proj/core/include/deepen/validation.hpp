#pragma once

#include <string>
#include <vector>

#include "deepen/types.hpp"

namespace deepen {

// A single invariant violation. Violations are data, not failures.
struct Violation {
  std::string field;
  std::string rule;
  int window_index = -1;  // -1 for record-level violations

  std::string message() const;
};

// Checks every type invariant of a patient record; empty result means valid.
std::vector<Violation> validate_record(const PatientRecord& record);

}  // namespace deepen
