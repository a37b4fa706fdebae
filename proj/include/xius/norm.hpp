#pragma once

#include "xius/check.hpp"
#include "xius/finvec.hpp"
#include "xius/params.hpp"
#include "xius/wfunc.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace xius {

struct NormOptions {
  std::size_t dp_ceiling = 48;  // largest support handled by the interval DP
};

struct NormCertificate {
  Q value;
  WFunctional witness;  // witness.eval(x) == value
};

// Raised when the support exceeds the DP ceiling; carries a cheap sound bracket.
struct NormResourceError : std::runtime_error {
  NormResourceError(const std::string& what, Q lo, Q hi)
      : std::runtime_error(what), lower(std::move(lo)), upper(std::move(hi)) {}
  Q lower, upper;
};

// sup { f(x) : f in W } by interval DP over the support of x.
NormCertificate norm_W(const FinVec& x, const ParamSeq& params, const NormOptions& opt = {});

// Same with weights m_1..m_k only; k = 0 gives the sup norm.
NormCertificate norm_W_truncated(const FinVec& x, const ParamSeq& params, std::size_t k,
                                 const NormOptions& opt = {});

// Sound upper bound on the W norm that never throws: the DP value when the support fits,
// otherwise min(l1 norm, ...) from the resource error.
Q norm_W_upper(const FinVec& x, const ParamSeq& params, const NormOptions& opt = {});

// max(||x||_inf, max over even J of (1/m_J) * (sum of the n_J largest |x_i|)).
Q norm_tildeK(const FinVec& x, const ParamSeq& params);

struct BruteForceCaps {
  std::size_t depth_cap = 8;
  std::size_t arity_cap = 64;
  std::size_t max_candidates = 5'000'000;
};

struct OracleExplosion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Independent oracle: enumerates W-trees with leaves on supp(x) level by level, keeping per range
// only coefficient vectors that are not dominated, and maximizes f(x) over everything generated.
// `truncate_k` restricts weights to m_1..m_k.
Q brute_force_norm(const FinVec& x, const ParamSeq& params, const BruteForceCaps& caps = {},
                   std::optional<std::size_t> truncate_k = std::nullopt);

struct LpBound {
  Q bound;      // >= ||x||_{p_k}
  Q p_used;     // exponent actually used, p_used <= p_k
  bool p_exact; // p_k is rational and p_used is a rounding of it
};

// Certified r >= ||x||_{p_k}; throws if p_k is infinite or q_k <= 1.
LpBound lp_upper_bound(const FinVec& x, const ParamSeq& params, std::size_t k,
                       unsigned precision_bits = 256);

// a^x >= b^y for positive integers, with a fast path for powers of two.
bool pow_ge(const Z& a, std::uint64_t x, const Z& b, std::uint64_t y);

// Prerequisites under which the basis-average estimates at index j follow from the proof:
// q_i <= q_{j-1} for i < j, n_j >= m_j^{3 q_{j-1}}, and (for the weight-avoiding bound) m_{j+1} >= m_j^3.
// Returns the first failing prerequisite or nullopt.
std::optional<std::string> basis_average_prerequisite(const ParamSeq& params, std::size_t j,
                                                      bool weight_avoiding);

// What the basis-average check needs to know about a functional.
struct WeightedValue {
  bool leaf = false;
  std::size_t index = 0;        // weight m_index at the root (ignored for leaves)
  Q value;                      // f(average)
  bool avoids_index_j = false;  // no node of the supplied tree has weight m_j
};

// The two basis-average estimates for a functional with the given summary.
std::vector<Check> check_basis_average_bounds(const ParamSeq& params, std::size_t j,
                                              const FinVec& average, const WeightedValue& f);
std::vector<Check> check_basis_average_bounds(const WFunctional& f, const ParamSeq& params,
                                              std::size_t j, const FinVec& average);

// True iff avg = (1/n_j) * sum of n_j distinct unit vectors.
bool is_basis_average(const FinVec& avg, const ParamSeq& params, std::size_t j);

}  // namespace xius
