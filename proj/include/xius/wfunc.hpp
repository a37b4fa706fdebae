#pragma once

#include "xius/finvec.hpp"
#include "xius/params.hpp"

#include <optional>
#include <string>
#include <vector>

namespace xius {

// Element of the norming set W of the auxiliary mixed Tsirelson space:
// a leaf +-e_c^* or (1/m_j) times the sum of d <= 4 n_j successive children.
// A weighted node without children is the zero functional carrying weight m_j.
class WFunctional {
 public:
  WFunctional() = default;
  static WFunctional leaf(Coord c, int sign = 1);
  static WFunctional weighted(std::size_t j, std::vector<WFunctional> children);

  bool is_leaf() const { return leaf_; }
  Coord coord() const { return coord_; }
  int sign() const { return sign_; }
  std::size_t j() const { return j_; }
  const std::vector<WFunctional>& children() const { return children_; }
  bool is_zero() const { return !leaf_ && children_.empty(); }

  Q eval(const ParamSeq& params, const FinVec& x) const;
  FinVec to_vector(const ParamSeq& params) const;
  std::vector<Coord> supp() const;
  Interval range() const;

  // Interval projection; stays in W (zero if nothing survives).
  WFunctional restrict(const Interval& E) const;
  // True if some weighted node carries index j.
  bool uses_index(std::size_t j) const;
  std::size_t max_index() const;
  std::size_t node_count() const;

  std::string str() const;
  bool operator==(const WFunctional& o) const;

 private:
  void collect_supp(std::vector<Coord>& out) const;
  bool leaf_ = false;
  int sign_ = 1;
  Coord coord_ = 0;
  std::size_t j_ = 0;
  std::vector<WFunctional> children_;
};

struct TreeViolation {
  std::string path;    // "root/2/0"
  std::string clause;  // human readable
  std::string str() const { return path + ": " + clause; }
};

// Membership in W (or W^(k) when max_index is set): arity, successiveness, index range.
std::optional<TreeViolation> verify_w(const WFunctional& f, const ParamSeq& params,
                                      std::optional<std::size_t> max_index = std::nullopt);

}  // namespace xius
