#pragma once

#include "xius/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace xius {

enum class Status { Pass, Fail, Inconclusive };

std::string status_name(Status s);
Status parse_status(const std::string& s);

// One verified (or refuted, or undecided) claim with the exact values behind it.
struct Check {
  std::string claim;   // what is asserted
  std::string anchor;  // stable identifier of the claim family
  Status status = Status::Inconclusive;
  std::vector<std::pair<std::string, std::string>> values;  // name -> exact rational or text
  std::string slack;  // exact rational when meaningful
  std::string note;

  Check& value(const std::string& name, const Q& q) {
    values.emplace_back(name, to_string(q));
    return *this;
  }
  Check& text(const std::string& name, const std::string& v) {
    values.emplace_back(name, v);
    return *this;
  }
  bool passed() const { return status == Status::Pass; }
  bool failed() const { return status == Status::Fail; }
};

// Status of "lhs <= rhs" from exact values, gated by hypotheses.
// Without hypotheses an instance that holds is inconclusive and one that breaks is inconclusive too.
inline Status le_status(const Q& lhs, const Q& rhs, bool hypotheses_hold) {
  if (!hypotheses_hold) return Status::Inconclusive;
  return lhs <= rhs ? Status::Pass : Status::Fail;
}

// Combined status: any fail wins, then any inconclusive.
Status combine(const std::vector<Check>& checks);

}  // namespace xius
