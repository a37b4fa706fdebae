#pragma once

#include "xius/analysis.hpp"
#include "xius/check.hpp"
#include "xius/kset.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace xius {

struct NotBlockSequence : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when the sign-flip construction has no valid output in K for this tree; `address` names
// the node.
struct TransformGap : std::runtime_error {
  TransformGap(const std::string& what, std::string addr) : std::runtime_error(what), address(std::move(addr)) {}
  std::string address;
};

struct DependedCoupleIndex {
  // per_k[k-1]: node indices alpha (odd members) whose couple straddles x_k.
  std::vector<std::vector<int>> per_k;
  std::vector<int> all;  // union, sorted
  std::vector<std::string> addresses(const AnalysisTree& t, std::size_t k) const;
  // Union as addresses, sorted.
  std::vector<std::string> all_addresses(const AnalysisTree& t) const;
  // Structural invariants: at most one member per node per k among the children of any node,
  // and members pairwise incomparable with disjoint ranges. Returns the first problem.
  std::optional<std::string> invariant_problem(const AnalysisTree& t) const;
};

DependedCoupleIndex index_depended_couples(const AnalysisTree& t, const std::vector<FinVec>& xs);

// y_k = x_k restricted to the union of the supports of the indexed f_alpha.
std::vector<FinVec> project_y(const std::vector<FinVec>& xs, const AnalysisTree& t, const DependedCoupleIndex& idx);

// |f(y_k)| <= 2 sigma_k for each k, given norm_tildeK(x_k) <= sigma_k and m_1 = 2.
std::vector<Check> check_small_projection(const KFunctional& f, const std::vector<FinVec>& xs,
                                          const std::vector<Q>& sigmas, const ParamSeq& params);

struct TransformEquality {
  std::size_t k = 0;
  Q lhs;  // f(x_k - y_k)
  Q rhs;  // g(eps_k (x_k - y_k))
  bool holds() const { return lhs == rhs; }
};

struct PartitionEntry {
  std::string address;
  std::string part;  // D | D+ | D-
  std::string rule;  // construction step applied
};

struct TransformReport {
  KFunctional f, g;
  SignVector signs;
  std::vector<TransformEquality> equalities;
  std::vector<PartitionEntry> partition;
  bool supports_match = false;
  bool index_match = false;
  std::optional<KTreeViolation> g_violation;
  std::vector<std::string> couples_f, couples_g;  // F_f and F_g as addresses
  bool ok() const;
};

TransformReport sign_flip_transform(const KFunctional& f, const std::vector<FinVec>& xs, const SignVector& signs,
                                    const ParamSeq& params, const SpecialRegistry* registry = nullptr);

struct Certificate {
  TransformReport transform;
  Q f_value;       // f(sum b x)
  Q g_value;       // g(sum eps b x)
  Q f_terms;       // sum |b| |f(y)|
  Q g_terms;       // sum |b| |g(y)|
  Q sigma_sum;
  std::vector<Check> checks;
  Status status() const { return combine(checks); }
};

Certificate unconditionality_certificate(const std::vector<FinVec>& xs, const std::vector<Q>& b,
                                         const SignVector& signs, const KFunctional& f, const std::vector<Q>& sigmas,
                                         const ParamSeq& params, const SpecialRegistry* registry = nullptr);

}  // namespace xius
