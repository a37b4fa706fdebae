#pragma once

#include "xius/finvec.hpp"
#include "xius/params.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace xius {

struct SpecialSequence;

// Element of the norming set K, kept as the tree it was built from.
//   Leaf:    +-e_c^*
//   Even:    (1/m_J) sum of d <= n_J successive children, J even
//   Special: (eps/m_J) E( sum_i lambda_i f_{2i-1} + f'_{2i} ), J odd, over a special sequence phi
// Values are immutable and share structure.
class KFunctional {
 public:
  enum class Kind { Leaf, Even, Special };

  // Role of a tree child of a special node.
  struct ChildRole {
    std::size_t pair;  // i, 1-based
    bool odd;          // E f_{2i-1} (odd member) or E f'_{2i} (even member)
  };

  KFunctional();  // the zero functional
  static KFunctional zero() { return KFunctional(); }
  static KFunctional leaf(Coord c, int sign = 1);
  static KFunctional even(std::size_t J, std::vector<KFunctional> children);
  // Flat (1/m_J) sum of e_c^* over coords (sign +).
  static KFunctional flat(std::size_t J, const std::vector<Coord>& coords);
  static KFunctional special(std::size_t J, std::shared_ptr<const SpecialSequence> phi, Interval E, int sign,
                             std::vector<KFunctional> replacements, std::vector<Q> lambdas);

  Kind kind() const;
  bool is_leaf() const { return kind() == Kind::Leaf; }
  bool is_even() const { return kind() == Kind::Even; }
  bool is_special() const { return kind() == Kind::Special; }
  bool is_zero() const;

  Coord coord() const;
  int sign() const;  // leaf sign or special eps
  // Index J of the weight m_J (0 for leaves).
  std::size_t index() const;
  const std::vector<KFunctional>& children() const;  // Even only
  const std::shared_ptr<const SpecialSequence>& phi() const;
  const Interval& E() const;
  const std::vector<KFunctional>& replacements() const;  // f'_{2i}, unrestricted
  const std::vector<Q>& lambdas() const;

  Q eval(const ParamSeq& params, const FinVec& x) const;
  FinVec to_vector(const ParamSeq& params) const;
  std::vector<Coord> supp() const;
  Interval range() const;

  // Children in the tree of the functional, ordered by support.
  std::vector<KFunctional> tree_children() const;
  std::vector<ChildRole> tree_child_roles() const;

  KFunctional restrict(const Interval& E) const;
  KFunctional negate() const;
  std::size_t node_count() const;
  std::size_t max_index() const;

  std::string str() const;
  bool operator==(const KFunctional& o) const;
  bool operator!=(const KFunctional& o) const { return !(*this == o); }

  struct Node;

 private:
  explicit KFunctional(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Proof route for |g(x_{2i})| <= 1/m_sigma over g of weight m_sigma.
enum class SideRoute { L1, WNorm, Sampled, Unverified };
std::string side_route_name(SideRoute r);

// (x_1, f_1, ..., x_{2k}, f_{2k}) with the sigma values of its prefixes.
struct SpecialSequence {
  std::string id;
  std::size_t j1 = 0;                  // even index of (x_1, f_1)
  std::size_t J = 0;                   // odd index with n_J = length, 0 if none
  std::vector<FinVec> x;               // x_1 .. x_{2k}
  std::vector<KFunctional> f;          // f_1 .. f_{2k}
  std::vector<std::size_t> sigma;      // sigma[i-1] = sigma(phi_i), i = 1 .. 2k
  std::vector<SideRoute> side_routes;  // per pair
  std::string side_scope;              // description of a sampled check, if any

  std::size_t length() const { return x.size(); }
  std::size_t pairs() const { return x.size() / 2; }
  // sigma(phi_{2i-1}): index of the weight of f_{2i}.
  std::size_t even_sigma(std::size_t i) const { return sigma.at(2 * i - 2); }
  const FinVec& x_at(std::size_t i) const { return x.at(i - 1); }
  const KFunctional& f_at(std::size_t i) const { return f.at(i - 1); }
};

// lambda for replacement g of pair i by the membership rule: g(m_sigma x_{2i}) when nonzero, else `fallback`.
Q lambda_rule(const SpecialSequence& phi, std::size_t i, const KFunctional& g, const ParamSeq& params,
              const Q& fallback);

// The canonical special functional: replacements f_{2i}, E = all, sign +, lambdas by the rule with +1/n_J^2.
KFunctional canonical_special(std::size_t J, std::shared_ptr<const SpecialSequence> phi, const ParamSeq& params);

}  // namespace xius
