#pragma once

#include "xius/check.hpp"
#include "xius/kset.hpp"
#include "xius/norm.hpp"
#include "xius/sequences.hpp"
#include "xius/wfunc.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace xius {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct JsonFormatError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ReportSection {
  std::string name;
  std::vector<Check> checks;
  bool operator==(const ReportSection&) const;
};

struct Report {
  std::string version = kToolVersion;
  int schema = kSchemaVersion;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<ReportSection> sections;
  Status status() const;
  std::size_t count(Status s) const;
  bool operator==(const Report&) const;
};

// Exit codes: 0 no fail, 1 fail, 3 inconclusive under --strict. Usage and config errors use 2.
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;
int exit_code(const Report& r, bool strict);

Json to_json(const Check& c);
Check check_from_json(const Json& j);
Json to_json(const Report& r);
Report report_from_json(const Json& j);

// Exact rationals are strings; the text ends with a newline.
std::string emit_json(const Report& r);
// One row per recorded value; decimal column truncated to 12 places and flagged when inexact.
std::string emit_csv(const Report& r);

// [[coord, "p/q"], ...]; parse_finvec also takes "1:1,2:-1/2".
Json to_json(const FinVec& x);
FinVec finvec_from_json(const Json& j);
FinVec parse_finvec(const std::string& s);

Json to_json(const WFunctional& f);
WFunctional wfunc_from_json(const Json& j);

// Tagged trees: leaf {coord, sign}, even {J, children}, special {J, sequence, E, sign, replacements,
// lambdas} with the sequence looked up by id in the registry, zero.
Json to_json(const KFunctional& f);
KFunctional kfunc_from_json(const Json& j, const SpecialRegistry* registry);

Json to_json(const NormCertificate& c);

Json to_json(const SpecialSequence& s);
SpecialSequence special_from_json(const Json& j, const SpecialRegistry* registry);

Json to_json(const ParamSeq& p);
ParamSeq params_from_json(const Json& j);
// A named parameter set or a path to a JSON file.
ParamSeq load_params(const std::string& name_or_path);

Json to_json(const ExperimentRecord& r);

}  // namespace xius
