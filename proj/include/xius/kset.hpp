#pragma once

#include "xius/kfunc.hpp"
#include "xius/norm.hpp"
#include "xius/sigma.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xius {

struct SpecialSequenceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class SpecialRegistry;

// Checks every clause of a special sequence. With a coder the sigma values are assigned (or
// looked up) and stored in phi; without one the stored values are checked for the range bound
// and monotonicity only. Returns the first violated clause.
std::optional<std::string> check_special_sequence(SpecialSequence& phi, const ParamSeq& params, SigmaCoder* coder,
                                                  const SpecialRegistry* registry = nullptr);

// Append-only store of validated special sequences sharing one coder. Thread safe.
class SpecialRegistry {
 public:
  explicit SpecialRegistry(SigmaCoder& coder) : coder_(coder) {}

  // Validates (assigning sigma) and stores; throws SpecialSequenceError with the failing clause.
  std::shared_ptr<const SpecialSequence> add(SpecialSequence phi);

  bool contains(const SpecialSequence* p) const;
  std::vector<std::shared_ptr<const SpecialSequence>> all() const;
  std::shared_ptr<const SpecialSequence> find(const std::string& id) const;
  SigmaCoder& coder() const { return coder_; }
  const ParamSeq& params() const { return coder_.params(); }

  // For two sequences with first differing entry i_1: the number of k >= i_1 such that the weight
  // index of g_k appears among the weight indices of f_i, i >= i_1. Injectivity of sigma keeps it <= 1.
  struct Coincidence {
    std::string a, b;
    std::size_t first_difference = 0;
    std::size_t weight_coincidences = 0;
  };
  std::vector<Coincidence> weight_coincidences() const;

 private:
  SigmaCoder& coder_;
  mutable std::mutex mu_;
  std::vector<std::shared_ptr<const SpecialSequence>> seqs_;
};

struct KTreeViolation {
  std::string path;
  std::string clause;
  std::string str() const { return path + ": " + clause; }
};

struct KTreeNode {
  std::string path;
  std::string kind;  // leaf | even | special
  std::size_t index = 0;
};

struct KTreeResult {
  std::optional<KTreeViolation> violation;
  std::vector<KTreeNode> nodes;  // the analysis tree (f_alpha) when valid
  bool ok() const { return !violation.has_value(); }
};

// Checks that f is in K through the tree it carries: leaves, even nodes (arity, successive
// children), special nodes (registered or valid sequence, n_J = length, replacement weight and
// support, lambda rule). Zero is accepted only at the root.
KTreeResult verify_tree(const KFunctional& f, const ParamSeq& params, const SpecialRegistry* registry = nullptr);

struct SpecialFunctionalError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Element of K_phi from replacements f'_{2i} (defaults f_{2i}), interval E and sign.
// `zero_case_signs[i]` picks the sign of lambda = +-1/n_J^2 when f'_{2i}(x_{2i}) = 0 (default +).
KFunctional build_special_functional(const std::shared_ptr<const SpecialSequence>& phi, const ParamSeq& params,
                                     std::optional<std::vector<KFunctional>> replacements = std::nullopt,
                                     Interval E = Interval::all(), int sign = 1,
                                     std::vector<int> zero_case_signs = {},
                                     const SpecialRegistry* registry = nullptr);

struct EnumOptions {
  Coord window_lo = 1;
  Coord window_hi = 4;
  std::size_t depth = 1;             // rounds of even operations
  std::size_t max_even_index = 4;    // even J <= this
  std::size_t arity_cap = 4;
  std::size_t special_budget = 64;   // interval restrictions per registered sequence
  std::size_t max_items = 200000;
};

struct EnumerationExplosion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic database: +-e_c for c in the window, closed `depth` times under the even
// operations on window functionals, plus the canonical special functionals of the registry (both
// signs) and their interval restrictions with endpoints on their supports.
std::vector<KFunctional> enumerate_K(const ParamSeq& params, const SpecialRegistry* registry, const EnumOptions& opt);

struct KBracket {
  Q lower;
  Q upper;
  KFunctional witness;  // witness(x) == lower
  bool upper_from_dp = true;
};

// lower: best |f(Ex)| over the database, closed under even operations by an interval DP;
// upper: the W norm (or its l1 fallback above the DP ceiling).
KBracket norm_K_bracket(const FinVec& x, const ParamSeq& params, const std::vector<KFunctional>& database,
                        bool even_dp = true, const NormOptions& opt = {});

}  // namespace xius
