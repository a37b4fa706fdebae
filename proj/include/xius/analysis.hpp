#pragma once

#include "xius/kfunc.hpp"

#include <string>
#include <vector>

namespace xius {

// The tree (f_alpha) of a functional, flattened in preorder. Addresses are dotted child
// positions from the root ("0", "0.2", "0.2.1").
struct AnalysisNode {
  KFunctional f;
  std::string address;
  int parent = -1;
  std::vector<int> children;
  std::size_t depth = 0;
  std::vector<Coord> supp;
  Interval range;
  // Position inside a special parent.
  bool odd_member = false;
  bool even_member = false;
  std::size_t pair = 0;
  int partner = -1;  // for an odd member: the even member of the same pair, if present
};

class AnalysisTree {
 public:
  static AnalysisTree build(const KFunctional& f);

  const std::vector<AnalysisNode>& nodes() const { return nodes_; }
  const AnalysisNode& at(std::size_t i) const { return nodes_.at(i); }
  std::size_t size() const { return nodes_.size(); }
  // Index of the node with this address, or -1.
  int find(const std::string& address) const;
  // True iff a is an ancestor of b or equal to it.
  bool precedes_or_equal(int a, int b) const;
  // Odd member whose even partner is present: a depended couple w.r.t. f.
  bool is_couple_head(int i) const { return nodes_.at(i).odd_member && nodes_.at(i).partner >= 0; }

 private:
  std::vector<AnalysisNode> nodes_;
};

}  // namespace xius
