#include "xius/wfunc.hpp"

#include <algorithm>

namespace xius {

WFunctional WFunctional::leaf(Coord c, int sign) {
  WFunctional f;
  f.leaf_ = true;
  f.coord_ = c;
  f.sign_ = sign >= 0 ? 1 : -1;
  return f;
}

WFunctional WFunctional::weighted(std::size_t j, std::vector<WFunctional> children) {
  WFunctional f;
  f.j_ = j;
  f.children_ = std::move(children);
  return f;
}

Q WFunctional::eval(const ParamSeq& params, const FinVec& x) const {
  if (leaf_) return sign_ > 0 ? x.at(coord_) : Q(-x.at(coord_));
  if (children_.empty()) return Q(0);
  Q s = 0;
  for (auto& c : children_) s += c.eval(params, x);
  return s / Q(params.m(j_));
}

FinVec WFunctional::to_vector(const ParamSeq& params) const {
  if (leaf_) return FinVec::basis(coord_, Q(sign_));
  std::vector<FinVec::Entry> es;
  Q scale = Q(1) / Q(params.m(j_));
  for (auto& c : children_)
    for (auto& e : c.to_vector(params)) es.emplace_back(e.first, e.second * scale);
  return FinVec::from_entries(std::move(es));
}

void WFunctional::collect_supp(std::vector<Coord>& out) const {
  if (leaf_) {
    out.push_back(coord_);
    return;
  }
  for (auto& c : children_) c.collect_supp(out);
}

std::vector<Coord> WFunctional::supp() const {
  std::vector<Coord> s;
  collect_supp(s);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

Interval WFunctional::range() const {
  auto s = supp();
  if (s.empty()) return Interval::none();
  return {s.front(), s.back()};
}

WFunctional WFunctional::restrict(const Interval& E) const {
  if (leaf_) return E.contains(coord_) ? *this : WFunctional::weighted(1, {});
  std::vector<WFunctional> kept;
  for (auto& c : children_) {
    WFunctional r = c.restrict(E);
    if (!r.is_zero()) kept.push_back(std::move(r));
  }
  return WFunctional::weighted(j_, std::move(kept));
}

bool WFunctional::uses_index(std::size_t j) const {
  if (leaf_) return false;
  if (j_ == j) return true;
  for (auto& c : children_)
    if (c.uses_index(j)) return true;
  return false;
}

std::size_t WFunctional::max_index() const {
  if (leaf_) return 0;
  std::size_t r = j_;
  for (auto& c : children_) r = std::max(r, c.max_index());
  return r;
}

std::size_t WFunctional::node_count() const {
  std::size_t n = 1;
  for (auto& c : children_) n += c.node_count();
  return n;
}

std::string WFunctional::str() const {
  if (leaf_) return std::string(sign_ > 0 ? "+" : "-") + "e" + std::to_string(coord_);
  std::string s = "W" + std::to_string(j_) + "(";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) s += " ";
    s += children_[i].str();
  }
  return s + ")";
}

bool WFunctional::operator==(const WFunctional& o) const {
  if (leaf_ != o.leaf_) return false;
  if (leaf_) return coord_ == o.coord_ && sign_ == o.sign_;
  return j_ == o.j_ && children_ == o.children_;
}

namespace {

std::optional<TreeViolation> verify_w_at(const WFunctional& f, const ParamSeq& params,
                                         std::optional<std::size_t> max_index, const std::string& path,
                                         bool is_root) {
  if (f.is_leaf()) {
    if (f.coord() == 0) return TreeViolation{path, "leaf coordinate must be positive"};
    return std::nullopt;
  }
  if (f.j() == 0) return TreeViolation{path, "weight index must be at least 1"};
  if (!params.defined(f.j())) return TreeViolation{path, "weight index beyond parameter length"};
  if (max_index && f.j() > *max_index)
    return TreeViolation{path, "weight index exceeds truncation k = " + std::to_string(*max_index)};
  if (f.children().empty() && !is_root) return TreeViolation{path, "empty weighted node below the root"};
  Z arity = Z(4) * params.n(f.j());
  if (Z(f.children().size()) > arity)
    return TreeViolation{path, "arity " + std::to_string(f.children().size()) + " exceeds 4 n_j = " +
                                   arity.str()};
  Coord prev_max = 0;
  for (std::size_t i = 0; i < f.children().size(); ++i) {
    const auto& c = f.children()[i];
    auto s = c.supp();
    if (s.empty()) return TreeViolation{path + "/" + std::to_string(i), "zero child"};
    if (i > 0 && !(prev_max < s.front()))
      return TreeViolation{path + "/" + std::to_string(i), "children not successive"};
    prev_max = s.back();
    if (auto v = verify_w_at(c, params, max_index, path + "/" + std::to_string(i), false)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<TreeViolation> verify_w(const WFunctional& f, const ParamSeq& params,
                                      std::optional<std::size_t> max_index) {
  return verify_w_at(f, params, max_index, "root", true);
}

}  // namespace xius
