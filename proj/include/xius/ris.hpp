#pragma once

#include "xius/analysis.hpp"
#include "xius/check.hpp"
#include "xius/kset.hpp"
#include "xius/wfunc.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xius {

// Two-sided estimate of the norm of X: lower from a K witness, upper from the W norm.
struct NormBracket {
  Q lower;
  Q upper;
};

NormBracket norm_bracket(const FinVec& x, const ParamSeq& params, const std::vector<KFunctional>& database);

struct L1AverageWitness {
  FinVec x;
  std::vector<FinVec> parts;
  Q C;
  bool normalized = false;  // x rescaled to exact norm 1
  NormBracket x_norm;
  std::vector<NormBracket> part_norms;
  std::size_t k() const { return parts.size(); }
};

// x = (1/k) sum parts, parts successive, and upper(part) <= C lower(x) for every part.
// Fail when lower(part) > C upper(x) for some part, inconclusive when the brackets cannot decide.
Check verify_l1_average(const L1AverageWitness& w);

L1AverageWitness make_l1_average(const std::vector<FinVec>& parts, const Q& C, const ParamSeq& params,
                                 const std::vector<KFunctional>& database);

struct L1SearchWindowError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Scans groupings of k^s consecutive ys (s = 1, 2, ...), each split into k runs of k^(s-1)
// vectors, leftmost first, and returns the first grouping that verifies as a C-l1^k average.
// nullopt when the window is exhausted; throws if k < 2 or k > ys.size().
std::optional<L1AverageWitness> find_l1_average(const std::vector<FinVec>& ys, std::size_t k, const Q& C,
                                                const ParamSeq& params, const std::vector<KFunctional>& database);

// sum ||E_i x|| <= C (1 + 2n/n_j) for successive intervals E_1 < ... < E_n.
Check check_split_bound(const L1AverageWitness& w, const std::vector<Interval>& intervals, std::size_t j,
                        const ParamSeq& params, const std::vector<KFunctional>& database);

// Worst slack of the split bound over all tuples of at most max_n successive intervals with
// endpoints on supp x. Returns the check of the tightest tuple.
Check split_bound_scan(const L1AverageWitness& w, std::size_t j, std::size_t max_n, const ParamSeq& params,
                       const std::vector<KFunctional>& database);

struct RISWitness {
  std::vector<FinVec> xs;
  std::vector<std::size_t> js;
  Q C;
  Q eps;
  std::string scope;  // what condition (c) was checked against
  std::vector<Check> checks;
  bool ok() const;    // every check passed
};

struct RISError : std::invalid_argument {
  RISError(const std::string& what, std::size_t k) : std::invalid_argument(what), index(k) {}
  std::size_t index;  // 1-based block index, 0 when not tied to a block
};

// Verifies (a) ||x_k|| <= C, (b) #range(x_k) < eps m_{j_{k+1}} and (c) |f(x_k)| <= C/w(f) for
// w(f) < m_{j_k}. (a) and (c) hold on all of K when ||x_k||_1 <= C; otherwise (a) uses the W norm
// and (c) the audit family. Throws RISError naming the first failing condition.
RISWitness build_ris(const std::vector<FinVec>& xs, const std::vector<std::size_t>& js, const Q& C, const Q& eps,
                     const ParamSeq& params, const std::vector<KFunctional>& audit_family);

struct BasicNodeTrace {
  std::string address;
  std::size_t index = 0;  // weight index, 0 for leaves
  std::string rule;       // empty | terminal | case1 | case2
  std::vector<std::size_t> T, T1, T2, D;
  std::optional<std::size_t> head;
};

struct BasicInequalityOutput {
  std::optional<std::size_t> head;  // t with g_1 = e_t^* + h_1
  std::optional<WFunctional> h1;
  FinVec g1;  // as a vector on block indices
  FinVec g2;
  std::vector<std::size_t> A;  // A[k-1] = node index of A_k, or npos when supp f misses range x_k
  std::vector<BasicNodeTrace> trace;
  Q lhs, rhs;
  std::vector<Check> checks;
  Status status() const { return combine(checks); }
};

// Bounds |f(sum b_k x_k)| by C (g_1 + g_2)(sum |b_k| e_k) through the tree of f. With j0 the nodes
// of weight m_{j0} collapse to e_t^* + eps sum e_k^*, and their premise is checked exactly on D.
BasicInequalityOutput basic_inequality_transform(const KFunctional& f, const RISWitness& ris,
                                                 const std::vector<Q>& bs, const ParamSeq& params,
                                                 std::optional<std::size_t> j0 = std::nullopt);

// Estimates for the average (1/n_j) sum x_k of a R.I.S. against each functional of the family.
//   variant 1: |f(avg)| <= 3C/(m_j w(f)) for w(f) < m_j, else C/w(f) + 2C/n_j
//   variant 2: |f(avg)| <= 4C/m_j^3 (premise for weight m_{j0})
//   variant 3: 1/m_{2j} <= ||avg|| <= 6/m_{2j} for an average of n_{2j} blocks (pass j = 2j),
//              lower side by the witness (1/m_{2j}) sum f_i with f_i(x_i) = 1
std::vector<Check> ris_average_estimates(const RISWitness& ris, std::size_t j, int variant, const ParamSeq& params,
                                         const std::vector<KFunctional>& family,
                                         const std::vector<KFunctional>& unit_witnesses = {});

}  // namespace xius
