#include "xius/check.hpp"

#include <stdexcept>

namespace xius {

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Status parse_status(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "inconclusive") return Status::Inconclusive;
  throw std::invalid_argument("unknown status '" + s + "'");
}

Status combine(const std::vector<Check>& checks) {
  Status r = Status::Pass;
  for (auto& c : checks) {
    if (c.status == Status::Fail) return Status::Fail;
    if (c.status == Status::Inconclusive) r = Status::Inconclusive;
  }
  return r;
}

}  // namespace xius
