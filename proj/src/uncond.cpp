#include "xius/uncond.hpp"

#include "xius/norm.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace xius {

std::vector<std::string> DependedCoupleIndex::addresses(const AnalysisTree& t, std::size_t k) const {
  std::vector<std::string> out;
  for (int i : per_k.at(k - 1)) out.push_back(t.at(i).address);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> DependedCoupleIndex::all_addresses(const AnalysisTree& t) const {
  std::vector<std::string> out;
  for (int i : all) out.push_back(t.at(i).address);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::string> DependedCoupleIndex::invariant_problem(const AnalysisTree& t) const {
  for (std::size_t k = 0; k < per_k.size(); ++k) {
    std::map<int, int> per_parent;
    for (int a : per_k[k])
      if (++per_parent[t.at(a).parent] > 1)
        return "two couples under " + t.at(t.at(a).parent).address + " for x_" + std::to_string(k + 1);
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      int a = all[i], b = all[j];
      if (t.precedes_or_equal(a, b) || t.precedes_or_equal(b, a))
        return "comparable members " + t.at(a).address + ", " + t.at(b).address;
      if (t.at(a).range.meets(t.at(b).range))
        return "overlapping ranges " + t.at(a).address + ", " + t.at(b).address;
    }
  return std::nullopt;
}

DependedCoupleIndex index_depended_couples(const AnalysisTree& t, const std::vector<FinVec>& xs) {
  if (!is_block_sequence(xs)) throw NotBlockSequence("xs is not a block sequence");
  DependedCoupleIndex idx;
  std::size_t d = xs.size();
  idx.per_k.resize(d);
  std::set<int> all;
  for (std::size_t i = 0; i < t.size(); ++i) {
    int a = static_cast<int>(i);
    if (!t.is_couple_head(a)) continue;
    const auto& fa = t.at(i);
    const auto& fb = t.at(fa.partner);
    for (std::size_t k = 1; k <= d; ++k) {
      Coord prev_max = k > 1 ? xs[k - 2].max_supp() : 0;
      if (!(prev_max < fa.range.lo && fa.range.lo <= xs[k - 1].max_supp())) continue;
      if (k == d || fb.range.hi < xs[k].min_supp()) continue;
      idx.per_k[k - 1].push_back(a);
      all.insert(a);
    }
  }
  idx.all.assign(all.begin(), all.end());
  return idx;
}

std::vector<FinVec> project_y(const std::vector<FinVec>& xs, const AnalysisTree& t, const DependedCoupleIndex& idx) {
  std::vector<Coord> u;
  for (int a : idx.all) u.insert(u.end(), t.at(a).supp.begin(), t.at(a).supp.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  std::vector<FinVec> ys;
  for (auto& x : xs) ys.push_back(x.restrict_to(u));
  return ys;
}

std::vector<Check> check_small_projection(const KFunctional& f, const std::vector<FinVec>& xs,
                                          const std::vector<Q>& sigmas, const ParamSeq& params) {
  if (sigmas.size() != xs.size()) throw std::invalid_argument("one sigma per block");
  std::vector<Check> out;
  bool m1 = params.m(1) == 2;
  if (!m1) {
    Check c;
    c.claim = "m_1 = 2";
    c.anchor = "uncond.small-projection.hypothesis";
    c.status = Status::Inconclusive;
    c.note = "hypothesis failure: m_1 = " + to_string(params.m(1));
    out.push_back(c);
  }
  auto t = AnalysisTree::build(f);
  auto idx = index_depended_couples(t, xs);
  auto ys = project_y(xs, t, idx);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Q tk = norm_tildeK(xs[k], params);
    bool hyp = m1 && tk <= sigmas[k];
    Q v = qabs(f.eval(params, ys[k]));
    Q bound = Q(2) * sigmas[k];
    Check c;
    c.claim = "|f(y_" + std::to_string(k + 1) + ")| <= 2 sigma_" + std::to_string(k + 1);
    c.anchor = "uncond.small-projection";
    c.status = le_status(v, bound, hyp);
    c.value("abs_f_y", v).value("bound", bound).value("tildeK_x", tk).value("sigma", sigmas[k]);
    c.slack = to_string(bound - v);
    if (!hyp) c.note = "hypothesis norm_tildeK(x_k) <= sigma_k or m_1 = 2 fails";
    out.push_back(c);
  }
  return out;
}

bool TransformReport::ok() const {
  for (auto& e : equalities)
    if (!e.holds()) return false;
  return supports_match && index_match && !g_violation;
}

namespace {

struct Transformer {
  const AnalysisTree& t;
  const std::vector<FinVec>& xs;
  const SignVector& signs;
  const ParamSeq& params;
  std::set<int> F;
  std::vector<std::vector<std::size_t>> meets;
  std::vector<std::string> part;
  std::vector<std::string> rule;
  std::vector<int> d_sign;  // sign applied at a D node (and inherited in D+)
  std::map<int, KFunctional> memo;

  Transformer(const AnalysisTree& tree, const std::vector<FinVec>& x, const SignVector& s, const ParamSeq& p,
              const DependedCoupleIndex& idx)
      : t(tree), xs(x), signs(s), params(p), F(idx.all.begin(), idx.all.end()) {
    std::size_t n = t.size();
    meets.resize(n);
    part.assign(n, "");
    rule.assign(n, "");
    d_sign.assign(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < xs.size(); ++k)
        if (t.at(i).range.meets(xs[k].range())) meets[i].push_back(k + 1);
    for (std::size_t i = 0; i < n; ++i) {
      int p = t.at(i).parent;
      if (p >= 0 && (part[p] == "D" || part[p] == "D+")) {
        part[i] = "D+";
        d_sign[i] = d_sign[p];
        rule[i] = "inherit";
        continue;
      }
      if (meets[i].size() <= 1) {
        part[i] = "D";
        step1(static_cast<int>(i));
      } else {
        part[i] = "D-";
      }
    }
  }

  void step1(int i) {
    for (int a = i; a >= 0; a = t.at(a).parent)
      if (t.is_couple_head(a)) {
        d_sign[i] = 1;
        rule[i] = "keep (couple member)";
        return;
      }
    if (meets[i].size() == 1) {
      std::size_t k = meets[i][0];
      d_sign[i] = signs(k);
      rule[i] = "sign of x_" + std::to_string(k);
      return;
    }
    std::size_t k = 0;
    for (std::size_t l = 1; l <= xs.size(); ++l)
      if (xs[l - 1].max_supp() < t.at(i).range.lo) k = l;
    d_sign[i] = signs(k);
    rule[i] = "sign of preceding x_" + std::to_string(k);
  }

  std::size_t unique_block(int i) const { return meets[i].size() == 1 ? meets[i][0] : 0; }

  KFunctional splice(const KFunctional& whole, const KFunctional& g, const Interval& E, const std::string& addr) {
    auto r = whole.restrict(E);
    if (r == whole) return g;
    if (r.is_zero()) return whole;
    if (whole.is_even()) {
      if (!g.is_even() || g.index() != whole.index()) throw TransformGap("interval cut changes node kind", addr);
      std::vector<KFunctional> kids;
      std::size_t j = 0;
      for (auto& c : whole.children()) {
        if (c.restrict(E).is_zero()) {
          kids.push_back(c);
          continue;
        }
        if (j >= g.children().size()) throw TransformGap("interval cut changes arity", addr);
        kids.push_back(splice(c, g.children()[j++], E, addr));
      }
      if (j != g.children().size()) throw TransformGap("interval cut changes arity", addr);
      return KFunctional::even(whole.index(), std::move(kids));
    }
    if (whole.is_special()) {
      if (!g.is_special() || g.phi()->id != whole.phi()->id || g.sign() != whole.sign())
        throw TransformGap("unsupported interval cut of a special node", addr);
      const auto& phi = *whole.phi();
      auto repl = whole.replacements();
      auto lam = whole.lambdas();
      for (std::size_t p = 1; p <= phi.pairs(); ++p) {
        auto a = phi.f_at(2 * p - 1).restrict(whole.E());
        auto b = whole.replacements()[p - 1].restrict(whole.E());
        bool any_in = false, any_out = false;
        for (auto* h : {&a, &b}) {
          if (h->is_zero()) continue;
          Interval rg = h->range();
          if (E.contains(rg)) any_in = true;
          else if (!E.meets(rg)) any_out = true;
          else any_in = any_out = true;
        }
        if (any_in && any_out) throw TransformGap("unsupported interval cut inside a special pair", addr);
        if (any_in) {
          repl[p - 1] = g.replacements()[p - 1];
          lam[p - 1] = g.lambdas()[p - 1];
        }
      }
      return KFunctional::special(whole.index(), whole.phi(), whole.E(), whole.sign(), std::move(repl),
                                  std::move(lam));
    }
    throw TransformGap("unsupported interval cut", addr);
  }

  KFunctional compute(int i) {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    const auto& node = t.at(i);
    KFunctional g;
    if (part[i] == "D" || part[i] == "D+") {
      g = d_sign[i] > 0 ? node.f : node.f.negate();
    } else if (F.count(i)) {
      rule[i] = "keep (in F)";
      g = node.f;
    } else if (node.f.is_even()) {
      rule[i] = "rebuild even";
      std::vector<KFunctional> kids;
      for (int c : node.children) kids.push_back(compute(c));
      g = KFunctional::even(node.f.index(), std::move(kids));
    } else if (node.f.is_special()) {
      rule[i] = "rebuild special";
      g = rebuild_special(i);
    } else {
      throw TransformGap("leaf meeting two blocks", node.address);
    }
    memo[i] = g;
    return g;
  }

  KFunctional rebuild_special(int i) {
    const auto& node = t.at(i);
    const auto& f = node.f;
    const auto& phi = *f.phi();
    std::size_t P = phi.pairs();
    std::vector<int> odd(P + 1, -1), ev(P + 1, -1);
    for (int c : node.children) (t.at(c).odd_member ? odd : ev)[t.at(c).pair] = c;
    Z nJ = params.n(f.index());
    Q fallback = Q(Z(1), nJ * nJ);
    std::vector<KFunctional> repl;
    std::vector<Q> lam;
    for (std::size_t p = 1; p <= P; ++p) {
      const KFunctional& whole = f.replacements()[p - 1];
      int o = odd[p], e = ev[p];
      KFunctional gp;
      if (e >= 0) {
        if (part[e] == "D") {
          gp = d_sign[e] > 0 ? whole : whole.negate();
        } else {
          KFunctional ge = compute(e);
          gp = whole.restrict(f.E()) == whole ? ge : splice(whole, ge, f.E(), t.at(e).address);
        }
      } else if (o >= 0 && meets[o].size() >= 2) {
        throw TransformGap("odd member meets several blocks while its partner is cut off", t.at(o).address);
      } else if (o >= 0 && meets[o].size() == 1) {
        gp = signs(meets[o][0]) > 0 ? whole : whole.negate();
      } else {
        gp = whole;
      }
      Q v = gp.eval(params, phi.x_at(2 * p));
      Q l;
      if (v != 0) {
        l = v * Q(params.m(phi.even_sigma(p)));
      } else if (o >= 0 && e >= 0 && !F.count(o) && unique_block(o) > 0) {
        l = Q(signs(unique_block(o))) * f.lambdas()[p - 1];
      } else {
        l = fallback;
      }
      repl.push_back(std::move(gp));
      lam.push_back(std::move(l));
    }
    return KFunctional::special(f.index(), f.phi(), f.E(), f.sign(), std::move(repl), std::move(lam));
  }
};

}  // namespace

TransformReport sign_flip_transform(const KFunctional& f, const std::vector<FinVec>& xs, const SignVector& signs,
                                    const ParamSeq& params, const SpecialRegistry* registry) {
  if (signs.size() != xs.size()) throw std::invalid_argument("one sign per block");
  auto tf = AnalysisTree::build(f);
  auto idx = index_depended_couples(tf, xs);
  TransformReport rep;
  rep.f = f;
  rep.signs = signs;
  if (tf.size() == 0) {
    rep.g = f;
  } else {
    Transformer tr(tf, xs, signs, params, idx);
    rep.g = tr.compute(0);
    for (std::size_t i = 0; i < tf.size(); ++i) rep.partition.push_back({tf.at(i).address, tr.part[i], tr.rule[i]});
  }
  auto ys = project_y(xs, tf, idx);
  for (std::size_t k = 1; k <= xs.size(); ++k) {
    FinVec z = xs[k - 1] - ys[k - 1];
    rep.equalities.push_back({k, f.eval(params, z), rep.g.eval(params, z.scaled(Q(signs(k))))});
  }
  auto tg = AnalysisTree::build(rep.g);
  rep.supports_match = tg.size() == tf.size();
  for (std::size_t i = 0; rep.supports_match && i < tf.size(); ++i) {
    int j = tg.find(tf.at(i).address);
    rep.supports_match = j >= 0 && tg.at(j).supp == tf.at(i).supp;
  }
  auto idg = index_depended_couples(tg, xs);
  rep.index_match = true;
  for (std::size_t k = 1; k <= xs.size(); ++k)
    if (idx.addresses(tf, k) != idg.addresses(tg, k)) rep.index_match = false;
  rep.couples_f = idx.all_addresses(tf);
  rep.couples_g = idg.all_addresses(tg);
  auto v = verify_tree(rep.g, params, registry);
  rep.g_violation = v.violation;
  return rep;
}

Certificate unconditionality_certificate(const std::vector<FinVec>& xs, const std::vector<Q>& b,
                                         const SignVector& signs, const KFunctional& f, const std::vector<Q>& sigmas,
                                         const ParamSeq& params, const SpecialRegistry* registry) {
  if (b.size() != xs.size() || sigmas.size() != xs.size()) throw std::invalid_argument("one b and sigma per block");
  Certificate c;
  c.transform = sign_flip_transform(f, xs, signs, params, registry);
  const auto& g = c.transform.g;
  auto tf = AnalysisTree::build(f);
  auto idx = index_depended_couples(tf, xs);
  auto ys = project_y(xs, tf, idx);

  FinVec X, Xe;
  c.f_terms = 0;
  c.g_terms = 0;
  c.sigma_sum = 0;
  Q max_b = 0;
  bool tilde_ok = true;
  for (std::size_t l = 0; l < xs.size(); ++l) {
    X = X + xs[l].scaled(b[l]);
    Xe = Xe + xs[l].scaled(b[l] * Q(signs(l + 1)));
    c.f_terms += qabs(b[l]) * qabs(f.eval(params, ys[l]));
    c.g_terms += qabs(b[l]) * qabs(g.eval(params, ys[l]));
    c.sigma_sum += sigmas[l];
    max_b = std::max(max_b, qabs(b[l]));
    if (norm_tildeK(xs[l], params) > sigmas[l]) tilde_ok = false;
  }
  c.f_value = f.eval(params, X);
  c.g_value = g.eval(params, Xe);

  Check tr;
  tr.claim = "transform postconditions and g in K";
  tr.anchor = "uncond.transform";
  tr.status = c.transform.ok() ? Status::Pass : Status::Fail;
  c.checks.push_back(tr);

  Check first;
  first.claim = "g(sum eps b x) >= f(sum b x) - sum|b||g(y)| - sum|b||f(y)|";
  first.anchor = "uncond.certificate.chain";
  Q lhs1 = c.f_value - c.g_terms - c.f_terms;
  first.status = c.g_value >= lhs1 ? Status::Pass : Status::Fail;
  first.value("g_value", c.g_value).value("f_value", c.f_value).value("g_terms", c.g_terms).value("f_terms",
                                                                                                   c.f_terms);
  first.slack = to_string(c.g_value - lhs1);
  c.checks.push_back(first);

  bool hyp = tilde_ok && c.sigma_sum <= Q(1, 8) && max_b <= 1 && params.m(1) == 2;
  Check second;
  second.claim = "sum|b||g(y)| + sum|b||f(y)| <= 4 sum sigma";
  second.anchor = "uncond.certificate.sigma";
  Q rhs = Q(4) * c.sigma_sum;
  second.status = le_status(c.g_terms + c.f_terms, rhs, hyp);
  second.value("terms", c.g_terms + c.f_terms).value("four_sigma", rhs);
  second.slack = to_string(rhs - c.g_terms - c.f_terms);
  if (!hyp) second.note = "hypotheses (sum sigma <= 1/8, tildeK(x) <= sigma, |b| <= 1, m_1 = 2) not all met";
  c.checks.push_back(second);

  if (c.f_value >= Q(3, 4)) {
    Check third;
    third.claim = "f(sum b x) >= 3/4 gives g(sum eps b x) >= 1/4";
    third.anchor = "uncond.certificate.quarter";
    third.status = le_status(Q(1, 4), c.g_value, hyp);
    third.value("g_value", c.g_value);
    third.slack = to_string(c.g_value - Q(1, 4));
    c.checks.push_back(third);
  }
  return c;
}

}  // namespace xius
