#pragma once

#include "xius/report.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xius {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Budget {
  std::size_t instances = 240;       // generated transform / basic-inequality instances
  std::size_t random_vectors = 200;  // random corpus of the norm oracle
  std::size_t enum_depth = 1;
  std::size_t dp_ceiling = 48;
  std::size_t window = 3000;         // coordinates offered to sequence constructions
  std::size_t samples = 24;          // sampled K_phi functionals per audit
};

// "instances=200,window=4000"; unknown keys and zero values are config errors.
Budget parse_budget(const std::string& s, Budget base = {});

struct RunConfig {
  std::optional<std::string> params_source;  // suite default when unset
  std::uint64_t seed = 1;
  Budget budget;
};

std::vector<std::string> suite_names();
// Parameter set a suite runs on without --params.
std::string default_params(const std::string& suite);

// Validates suite name, parameters and feasibility before computing; throws ConfigError.
Report run_suite(const RunConfig& cfg, const std::string& suite);

// Sections, also used by the acceptance binary.
ReportSection norm_oracle_section(const ParamSeq& p, std::uint64_t seed, const Budget& b);
ReportSection norm_monotonicity_section(const ParamSeq& p, std::uint64_t seed, const Budget& b);
ReportSection uncond_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg);
ReportSection basic_inequality_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg);
ReportSection sequences_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg);
ReportSection probe_section(const ParamSeq& p, const Budget& b, SpecialRegistry& reg);
ReportSection sigma_section(const std::vector<const SpecialRegistry*>& regs);
ReportSection norming_set_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg);

// The norm-oracle corpus: every nonzero {-1,0,1} vector on coordinates 1..5, then `random`
// seeded rational vectors with support at most 6.
std::vector<FinVec> norm_corpus(std::uint64_t seed, std::size_t random);

// Aggregate of per-instance checks sharing an anchor: fail if any failed, pass if any passed.
Check aggregate(const std::string& anchor, const std::string& claim, const std::vector<Check>& cs);

}  // namespace xius
