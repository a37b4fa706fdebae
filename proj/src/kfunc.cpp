#include "xius/kfunc.hpp"

#include <algorithm>
#include <stdexcept>

namespace xius {

struct KFunctional::Node {
  Kind kind = Kind::Even;
  Coord coord = 0;
  int sign = 1;
  std::size_t J = 0;
  std::vector<KFunctional> children;
  std::shared_ptr<const SpecialSequence> phi;
  Interval E = Interval::all();
  std::vector<KFunctional> repl;
  std::vector<Q> lambda;
};

namespace {

const std::shared_ptr<const KFunctional::Node>& zero_node() {
  static const auto z = std::make_shared<const KFunctional::Node>();
  return z;
}

}  // namespace

KFunctional::KFunctional() : n_(zero_node()) {}

KFunctional KFunctional::leaf(Coord c, int sign) {
  if (c == 0) throw std::invalid_argument("coordinates start at 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Leaf;
  n->coord = c;
  n->sign = sign >= 0 ? 1 : -1;
  return KFunctional(std::move(n));
}

KFunctional KFunctional::even(std::size_t J, std::vector<KFunctional> children) {
  if (children.empty()) return KFunctional();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Even;
  n->J = J;
  n->children = std::move(children);
  return KFunctional(std::move(n));
}

KFunctional KFunctional::flat(std::size_t J, const std::vector<Coord>& coords) {
  std::vector<KFunctional> kids;
  for (Coord c : coords) kids.push_back(leaf(c));
  return even(J, std::move(kids));
}

KFunctional KFunctional::special(std::size_t J, std::shared_ptr<const SpecialSequence> phi, Interval E,
                                 int sign, std::vector<KFunctional> replacements, std::vector<Q> lambdas) {
  if (!phi) throw std::invalid_argument("special node without a special sequence");
  if (replacements.size() != phi->pairs() || lambdas.size() != phi->pairs())
    throw std::invalid_argument("special node needs one replacement and one lambda per pair");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Special;
  n->J = J;
  n->phi = std::move(phi);
  n->E = E;
  n->sign = sign >= 0 ? 1 : -1;
  n->repl = std::move(replacements);
  n->lambda = std::move(lambdas);
  return KFunctional(std::move(n));
}

KFunctional::Kind KFunctional::kind() const { return n_->kind; }

bool KFunctional::is_zero() const {
  switch (n_->kind) {
    case Kind::Leaf: return false;
    case Kind::Even: return n_->children.empty();
    case Kind::Special: return tree_children().empty();
  }
  return true;
}

Coord KFunctional::coord() const { return n_->coord; }
int KFunctional::sign() const { return n_->sign; }
std::size_t KFunctional::index() const { return n_->kind == Kind::Leaf ? 0 : n_->J; }
const std::vector<KFunctional>& KFunctional::children() const { return n_->children; }
const std::shared_ptr<const SpecialSequence>& KFunctional::phi() const { return n_->phi; }
const Interval& KFunctional::E() const { return n_->E; }
const std::vector<KFunctional>& KFunctional::replacements() const { return n_->repl; }
const std::vector<Q>& KFunctional::lambdas() const { return n_->lambda; }

Q KFunctional::eval(const ParamSeq& params, const FinVec& x) const {
  switch (n_->kind) {
    case Kind::Leaf: return n_->sign > 0 ? x.at(n_->coord) : Q(-x.at(n_->coord));
    case Kind::Even: {
      if (n_->children.empty()) return Q(0);
      Q s = 0;
      for (auto& c : n_->children) s += c.eval(params, x);
      return s / Q(params.m(n_->J));
    }
    case Kind::Special: {
      FinVec xe = x.restrict(n_->E);
      if (xe.is_zero()) return Q(0);
      Q s = 0;
      const auto& phi = *n_->phi;
      for (std::size_t i = 1; i <= phi.pairs(); ++i) {
        s += n_->lambda[i - 1] * phi.f_at(2 * i - 1).eval(params, xe);
        s += n_->repl[i - 1].eval(params, xe);
      }
      s /= Q(params.m(n_->J));
      return n_->sign > 0 ? s : Q(-s);
    }
  }
  return Q(0);
}

FinVec KFunctional::to_vector(const ParamSeq& params) const {
  switch (n_->kind) {
    case Kind::Leaf: return FinVec::basis(n_->coord, Q(n_->sign));
    case Kind::Even: {
      if (n_->children.empty()) return FinVec();
      std::vector<FinVec::Entry> es;
      Q scale = Q(1) / Q(params.m(n_->J));
      for (auto& c : n_->children)
        for (auto& e : c.to_vector(params)) es.emplace_back(e.first, e.second * scale);
      return FinVec::from_entries(std::move(es));
    }
    case Kind::Special: {
      std::vector<FinVec::Entry> es;
      Q scale = Q(n_->sign) / Q(params.m(n_->J));
      const auto& phi = *n_->phi;
      for (std::size_t i = 1; i <= phi.pairs(); ++i) {
        for (auto& e : phi.f_at(2 * i - 1).to_vector(params).restrict(n_->E))
          es.emplace_back(e.first, e.second * n_->lambda[i - 1] * scale);
        for (auto& e : n_->repl[i - 1].to_vector(params).restrict(n_->E)) es.emplace_back(e.first, e.second * scale);
      }
      return FinVec::from_entries(std::move(es));
    }
  }
  return FinVec();
}

std::vector<Coord> KFunctional::supp() const {
  std::vector<Coord> out;
  switch (n_->kind) {
    case Kind::Leaf: out.push_back(n_->coord); break;
    case Kind::Even:
      for (auto& c : n_->children) {
        auto s = c.supp();
        out.insert(out.end(), s.begin(), s.end());
      }
      break;
    case Kind::Special:
      for (auto& c : tree_children()) {
        auto s = c.supp();
        out.insert(out.end(), s.begin(), s.end());
      }
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Interval KFunctional::range() const {
  auto s = supp();
  if (s.empty()) return Interval::none();
  return {s.front(), s.back()};
}

std::vector<KFunctional> KFunctional::tree_children() const {
  if (n_->kind == Kind::Even) return n_->children;
  std::vector<KFunctional> out;
  if (n_->kind != Kind::Special) return out;
  const auto& phi = *n_->phi;
  for (std::size_t i = 1; i <= phi.pairs(); ++i) {
    auto a = phi.f_at(2 * i - 1).restrict(n_->E);
    if (!a.is_zero()) out.push_back(a);
    auto b = n_->repl[i - 1].restrict(n_->E);
    if (!b.is_zero()) out.push_back(b);
  }
  return out;
}

std::vector<KFunctional::ChildRole> KFunctional::tree_child_roles() const {
  std::vector<ChildRole> out;
  if (n_->kind == Kind::Even) {
    for (std::size_t i = 0; i < n_->children.size(); ++i) out.push_back({i + 1, false});
    return out;
  }
  if (n_->kind != Kind::Special) return out;
  const auto& phi = *n_->phi;
  for (std::size_t i = 1; i <= phi.pairs(); ++i) {
    if (!phi.f_at(2 * i - 1).restrict(n_->E).is_zero()) out.push_back({i, true});
    if (!n_->repl[i - 1].restrict(n_->E).is_zero()) out.push_back({i, false});
  }
  return out;
}

KFunctional KFunctional::restrict(const Interval& E) const {
  switch (n_->kind) {
    case Kind::Leaf: return E.contains(n_->coord) ? *this : KFunctional();
    case Kind::Even: {
      if (n_->children.empty()) return *this;
      std::vector<KFunctional> kept;
      bool changed = false;
      for (auto& c : n_->children) {
        auto r = c.restrict(E);
        if (r.is_zero()) {
          changed = true;
          continue;
        }
        if (r != c) changed = true;
        kept.push_back(std::move(r));
      }
      if (!changed) return *this;
      return even(n_->J, std::move(kept));
    }
    case Kind::Special: {
      Interval e2 = n_->E.intersect(E);
      if (e2 == n_->E) return *this;
      auto r = special(n_->J, n_->phi, e2, n_->sign, n_->repl, n_->lambda);
      return r.is_zero() ? KFunctional() : r;
    }
  }
  return KFunctional();
}

KFunctional KFunctional::negate() const {
  switch (n_->kind) {
    case Kind::Leaf: return leaf(n_->coord, -n_->sign);
    case Kind::Even: {
      if (n_->children.empty()) return *this;
      std::vector<KFunctional> kids;
      for (auto& c : n_->children) kids.push_back(c.negate());
      return even(n_->J, std::move(kids));
    }
    case Kind::Special: return special(n_->J, n_->phi, n_->E, -n_->sign, n_->repl, n_->lambda);
  }
  return *this;
}

std::size_t KFunctional::node_count() const {
  if (is_zero()) return 0;
  std::size_t n = 1;
  for (auto& c : tree_children()) n += c.node_count();
  return n;
}

std::size_t KFunctional::max_index() const {
  std::size_t r = index();
  for (auto& c : tree_children()) r = std::max(r, c.max_index());
  return r;
}

std::string KFunctional::str() const {
  switch (n_->kind) {
    case Kind::Leaf: return std::string(n_->sign > 0 ? "+" : "-") + "e" + std::to_string(n_->coord);
    case Kind::Even: {
      if (n_->children.empty()) return "0";
      std::string s = "E" + std::to_string(n_->J) + "(";
      for (std::size_t i = 0; i < n_->children.size(); ++i) {
        if (i) s += " ";
        s += n_->children[i].str();
      }
      return s + ")";
    }
    case Kind::Special: {
      std::string s = std::string(n_->sign > 0 ? "+" : "-") + "S" + std::to_string(n_->J) + "[" + n_->phi->id +
                      " E=" + n_->E.str() + "](";
      for (std::size_t i = 0; i < n_->repl.size(); ++i) {
        if (i) s += "; ";
        s += to_string(n_->lambda[i]) + " f" + std::to_string(2 * i + 1) + ", " + n_->repl[i].str();
      }
      return s + ")";
    }
  }
  return "?";
}

bool KFunctional::operator==(const KFunctional& o) const {
  if (n_ == o.n_) return true;
  if (n_->kind != o.n_->kind) return false;
  switch (n_->kind) {
    case Kind::Leaf: return n_->coord == o.n_->coord && n_->sign == o.n_->sign;
    case Kind::Even:
      if (n_->children.empty() && o.n_->children.empty()) return true;
      return n_->J == o.n_->J && n_->children == o.n_->children;
    case Kind::Special:
      return n_->J == o.n_->J && (n_->phi == o.n_->phi || n_->phi->id == o.n_->phi->id) && n_->E == o.n_->E &&
             n_->sign == o.n_->sign && n_->repl == o.n_->repl && n_->lambda == o.n_->lambda;
  }
  return false;
}

std::string side_route_name(SideRoute r) {
  switch (r) {
    case SideRoute::L1: return "l1";
    case SideRoute::WNorm: return "w-norm";
    case SideRoute::Sampled: return "sampled";
    case SideRoute::Unverified: return "unverified";
  }
  return "unverified";
}

Q lambda_rule(const SpecialSequence& phi, std::size_t i, const KFunctional& g, const ParamSeq& params,
              const Q& fallback) {
  Q v = g.eval(params, phi.x_at(2 * i));
  if (v != 0) return v * Q(params.m(phi.even_sigma(i)));
  return fallback;
}

KFunctional canonical_special(std::size_t J, std::shared_ptr<const SpecialSequence> phi, const ParamSeq& params) {
  Z nJ = params.n(J);
  Q fb = Q(Z(1), nJ * nJ);
  std::vector<KFunctional> repl;
  std::vector<Q> lam;
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    repl.push_back(phi->f_at(2 * i));
    lam.push_back(lambda_rule(*phi, i, phi->f_at(2 * i), params, fb));
  }
  return KFunctional::special(J, std::move(phi), Interval::all(), 1, std::move(repl), std::move(lam));
}

}  // namespace xius
