#include "xius/analysis.hpp"

namespace xius {

namespace {

void walk(const KFunctional& f, const std::string& address, int parent, std::size_t depth,
          std::vector<AnalysisNode>& out) {
  int me = static_cast<int>(out.size());
  AnalysisNode n;
  n.f = f;
  n.address = address;
  n.parent = parent;
  n.depth = depth;
  n.supp = f.supp();
  n.range = n.supp.empty() ? Interval::none() : Interval::of(n.supp.front(), n.supp.back());
  out.push_back(std::move(n));
  auto kids = f.tree_children();
  auto roles = f.tree_child_roles();
  std::vector<int> idx;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    int c = static_cast<int>(out.size());
    idx.push_back(c);
    out[me].children.push_back(c);
    walk(kids[i], address + "." + std::to_string(i), me, depth + 1, out);
    if (f.is_special()) {
      out[c].pair = roles[i].pair;
      out[c].odd_member = roles[i].odd;
      out[c].even_member = !roles[i].odd;
    }
  }
  if (f.is_special())
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
      if (out[idx[i]].odd_member && out[idx[i + 1]].even_member && out[idx[i]].pair == out[idx[i + 1]].pair)
        out[idx[i]].partner = idx[i + 1];
}

}  // namespace

AnalysisTree AnalysisTree::build(const KFunctional& f) {
  AnalysisTree t;
  if (!f.is_zero()) walk(f, "0", -1, 0, t.nodes_);
  return t;
}

int AnalysisTree::find(const std::string& address) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].address == address) return static_cast<int>(i);
  return -1;
}

bool AnalysisTree::precedes_or_equal(int a, int b) const {
  while (b >= 0) {
    if (a == b) return true;
    b = nodes_[b].parent;
  }
  return false;
}

}  // namespace xius
