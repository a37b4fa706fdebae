#include "xius/ris.hpp"

#include "xius/norm.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

namespace xius {

NormBracket norm_bracket(const FinVec& x, const ParamSeq& params, const std::vector<KFunctional>& database) {
  if (x.is_zero()) return {Q(0), Q(0)};
  auto b = norm_K_bracket(x, params, database, x.size() <= 48);
  NormBracket out{b.lower, b.upper};
  if (x.norm_inf() > out.lower) out.lower = x.norm_inf();  // +-e_c^* is in K
  return out;
}

namespace {

FinVec sum_of(const std::vector<FinVec>& v) {
  FinVec s;
  for (auto& x : v) s = s + x;
  return s;
}

Q q_of(const Z& z) { return Q(z); }

}  // namespace

L1AverageWitness make_l1_average(const std::vector<FinVec>& parts, const Q& C, const ParamSeq& params,
                                 const std::vector<KFunctional>& database) {
  L1AverageWitness w;
  w.parts = parts;
  w.C = C;
  w.x = sum_of(parts).scaled(Q(1) / Q(Z(parts.size())));
  w.x_norm = norm_bracket(w.x, params, database);
  for (auto& p : parts) w.part_norms.push_back(norm_bracket(p, params, database));
  if (w.x_norm.lower == w.x_norm.upper && w.x_norm.lower > 0) {
    Q s = Q(1) / w.x_norm.lower;
    w.x = w.x.scaled(s);
    for (auto& p : w.parts) p = p.scaled(s);
    w.x_norm = {Q(1), Q(1)};
    for (auto& b : w.part_norms) b = {b.lower * s, b.upper * s};
    w.normalized = true;
  }
  return w;
}

Check verify_l1_average(const L1AverageWitness& w) {
  Check c;
  c.claim = "C-l1^k average: ||x_i|| <= C ||x||";
  c.anchor = "ris.l1-average";
  c.value("C", w.C).value("k", Q(Z(w.k()))).value("x.lower", w.x_norm.lower).value("x.upper", w.x_norm.upper);
  if (w.parts.empty() || !is_block_sequence(w.parts) ||
      sum_of(w.parts).scaled(Q(1) / Q(Z(w.k()))) != w.x) {
    c.status = Status::Fail;
    c.note = "x is not the average of successive parts";
    return c;
  }
  Q worst_up = 0, worst_lo = 0;
  for (auto& b : w.part_norms) {
    worst_up = std::max(worst_up, b.upper);
    worst_lo = std::max(worst_lo, b.lower);
  }
  c.value("max part upper", worst_up).value("max part lower", worst_lo);
  Q rhs_low = w.C * w.x_norm.lower;
  if (worst_up <= rhs_low) {
    c.status = Status::Pass;
    c.slack = to_string(rhs_low - worst_up);
  } else if (worst_lo > w.C * w.x_norm.upper) {
    c.status = Status::Fail;
    c.note = "a part is provably too large";
  } else {
    c.status = Status::Inconclusive;
    c.note = "brackets do not decide";
  }
  return c;
}

std::optional<L1AverageWitness> find_l1_average(const std::vector<FinVec>& ys, std::size_t k, const Q& C,
                                                const ParamSeq& params, const std::vector<KFunctional>& database) {
  if (k < 2) throw L1SearchWindowError("k must be at least 2");
  if (k > ys.size()) throw L1SearchWindowError("window of " + std::to_string(ys.size()) + " vectors is smaller than k");
  if (!is_block_sequence(ys)) throw L1SearchWindowError("ys is not a block sequence");
  for (std::size_t run = 1; run * k <= ys.size(); run *= k) {
    std::size_t group = run * k;
    for (std::size_t t = 0; t + group <= ys.size(); ++t) {
      std::vector<FinVec> parts;
      for (std::size_t i = 0; i < k; ++i)
        parts.push_back(sum_of(std::vector<FinVec>(ys.begin() + t + i * run, ys.begin() + t + (i + 1) * run)));
      auto w = make_l1_average(parts, C, params, database);
      if (verify_l1_average(w).passed()) return w;
    }
  }
  return std::nullopt;
}

namespace {

Check split_check(const L1AverageWitness& w, const std::vector<NormBracket>& pieces, std::size_t j,
                  const ParamSeq& params) {
  Check c;
  std::size_t n = pieces.size();
  c.claim = "sum ||E_i x|| <= C (1 + 2n/n_j)";
  c.anchor = "ris.split-bound";
  Q up = 0, lo = 0;
  for (auto& b : pieces) {
    up += b.upper;
    lo += b.lower;
  }
  Q nj = q_of(params.n(j));
  Q rhs = w.C * (Q(1) + Q(Z(2 * n)) / nj);
  c.value("n", Q(Z(n))).value("n_j", nj).value("lhs.upper", up).value("lhs.lower", lo).value("rhs", rhs);
  bool hyp = verify_l1_average(w).passed() && Z(w.k()) == params.n(j) &&
             (j < 2 || Z(n) <= params.n(j - 1));
  if (!hyp) {
    c.status = Status::Inconclusive;
    c.note = "hypotheses (k = n_j, n <= n_{j-1}, verified average) not met";
  } else if (up <= rhs) {
    c.status = Status::Pass;
  } else if (lo > rhs) {
    c.status = Status::Fail;
  } else {
    c.status = Status::Inconclusive;
    c.note = "brackets do not decide";
  }
  c.slack = to_string(rhs - up);
  return c;
}

}  // namespace

Check check_split_bound(const L1AverageWitness& w, const std::vector<Interval>& intervals, std::size_t j,
                        const ParamSeq& params, const std::vector<KFunctional>& database) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].empty()) throw std::invalid_argument("empty interval");
    if (i && !(intervals[i - 1].hi < intervals[i].lo)) throw std::invalid_argument("intervals are not successive");
  }
  std::vector<NormBracket> pieces;
  for (auto& E : intervals) pieces.push_back(norm_bracket(w.x.restrict(E), params, database));
  return split_check(w, pieces, j, params);
}

Check split_bound_scan(const L1AverageWitness& w, std::size_t j, std::size_t max_n, const ParamSeq& params,
                       const std::vector<KFunctional>& database) {
  auto s = w.x.supp();
  std::size_t N = s.size();
  std::map<std::pair<std::size_t, std::size_t>, NormBracket> memo;
  auto piece = [&](std::size_t a, std::size_t b) -> const NormBracket& {
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, norm_bracket(w.x.restrict(Interval::of(s[a], s[b])), params, database)).first;
    return it->second;
  };
  std::optional<Check> worst;
  Q worst_slack;
  std::size_t tuples = 0;
  std::vector<NormBracket> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!cur.empty()) {
      ++tuples;
      Check c = split_check(w, cur, j, params);
      Q sl = parse_q(c.slack);
      if (c.failed() || !worst || (!worst->failed() && sl < worst_slack)) {
        worst = c;
        worst_slack = sl;
      }
    }
    if (cur.size() == max_n) return;
    for (std::size_t a = from; a < N; ++a)
      for (std::size_t b = a; b < N; ++b) {
        cur.push_back(piece(a, b));
        rec(b + 1);
        cur.pop_back();
      }
  };
  rec(0);
  if (!worst) throw std::invalid_argument("empty average");
  worst->value("tuples scanned", Q(Z(tuples)));
  worst->anchor = "ris.split-bound.scan";
  return *worst;
}

bool RISWitness::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed(); });
}

RISWitness build_ris(const std::vector<FinVec>& xs, const std::vector<std::size_t>& js, const Q& C, const Q& eps,
                     const ParamSeq& params, const std::vector<KFunctional>& audit_family) {
  if (!is_block_sequence(xs)) throw RISError("not a block sequence", 0);
  if (js.size() != xs.size()) throw RISError("one index j_k per block", 0);
  for (std::size_t k = 1; k < js.size(); ++k)
    if (!(js[k - 1] < js[k])) throw RISError("indices j_k not strictly increasing", k + 1);
  RISWitness w{xs, js, C, eps, "", {}};
  bool all_l1 = true;
  std::size_t audited = 0;
  for (std::size_t k = 1; k <= xs.size(); ++k) {
    const FinVec& x = xs[k - 1];
    std::string K = std::to_string(k);
    Q l1 = x.norm_1();
    Check a;
    a.claim = "(a) ||x_" + K + "|| <= C";
    a.anchor = "ris.a";
    a.value("l1", l1).value("C", C);
    if (l1 <= C) {
      a.status = Status::Pass;
      a.note = "l1 route";
    } else {
      Q up = norm_W_upper(x, params);
      a.value("upper", up);
      if (up <= C) a.status = Status::Pass;
      else if (x.norm_inf() > C) throw RISError("(a) fails at x_" + K, k);
      else a.note = "brackets do not decide";
    }
    w.checks.push_back(a);

    if (k < xs.size()) {
      Check b;
      Coord width = x.max_supp() - x.min_supp() + 1;
      Q m_next = q_of(params.m(js[k]));
      b.claim = "(b) #range(x_" + K + ") < eps m_{j_" + std::to_string(k + 1) + "}";
      b.anchor = "ris.b";
      b.value("#range", Q(Z(width))).value("eps m", eps * m_next);
      if (!(Q(Z(width)) < eps * m_next)) throw RISError("(b) fails at x_" + K, k);
      b.status = Status::Pass;
      w.checks.push_back(b);
    }

    Check c;
    c.claim = "(c) |f(x_" + K + ")| <= C/w(f) for w(f) < m_{j_" + K + "}";
    c.anchor = "ris.c";
    Q mk = q_of(params.m(js[k - 1]));
    if (l1 <= C) {
      c.status = Status::Pass;
      c.note = "all of K by the l1 route";
    } else {
      all_l1 = false;
      std::size_t n = 0;
      for (auto& f : audit_family) {
        if (f.is_leaf() || f.is_zero()) continue;
        Q wf = q_of(params.m(f.index()));
        if (!(wf < mk)) continue;
        ++n;
        Q v = qabs(f.eval(params, x));
        if (v > C / wf) throw RISError("(c) fails at x_" + K + " for " + f.str(), k);
      }
      audited = std::max(audited, n);
      c.status = Status::Pass;
      c.note = "audit family, " + std::to_string(n) + " functionals of small weight";
    }
    w.checks.push_back(c);
  }
  w.scope = all_l1 ? "all of K (l1 route)"
                   : "audit family of " + std::to_string(audit_family.size()) + " functionals";
  return w;
}

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::vector<Coord> meet(const std::vector<Coord>& supp, const Interval& r) {
  std::vector<Coord> out;
  for (Coord c : supp)
    if (r.contains(c)) out.push_back(c);
  return out;
}

std::size_t weight_index(const KFunctional& f) { return f.is_leaf() ? 0 : f.index(); }

struct NodeG {
  std::optional<std::size_t> head;
  std::optional<WFunctional> h;
  FinVec g2;
  FinVec g1(const ParamSeq& params) const {
    FinVec v = h ? h->to_vector(params) : FinVec();
    if (head) v = v + FinVec::basis(*head);
    return v;
  }
};

FinVec abs_b(const std::vector<Q>& bs, const std::vector<std::size_t>& ks) {
  std::vector<FinVec::Entry> es;
  for (std::size_t k : ks)
    if (bs[k - 1] != 0) es.emplace_back(k, qabs(bs[k - 1]));
  return FinVec::from_entries(es);
}

FinVec combo(const std::vector<FinVec>& xs, const std::vector<Q>& bs, const std::vector<std::size_t>& ks) {
  FinVec s;
  for (std::size_t k : ks) s = s + xs[k - 1].scaled(bs[k - 1]);
  return s;
}

}  // namespace

BasicInequalityOutput basic_inequality_transform(const KFunctional& f, const RISWitness& ris,
                                                 const std::vector<Q>& bs, const ParamSeq& params,
                                                 std::optional<std::size_t> j0) {
  const auto& xs = ris.xs;
  std::size_t d = xs.size();
  if (bs.size() != d) throw std::invalid_argument("one coefficient per block");
  const Q& C = ris.C;
  const Q& eps = ris.eps;
  BasicInequalityOutput out;
  auto t = AnalysisTree::build(f);
  std::size_t N = f.is_zero() ? 0 : t.size();
  auto is_j0 = [&](std::size_t i) { return j0 && weight_index(t.at(i).f) == *j0; };

  // A_k: descend while a child keeps supp f cap range x_k.
  std::vector<Coord> fsupp = f.supp();
  out.A.assign(d, npos);
  std::vector<std::vector<std::size_t>> T(N);
  for (std::size_t k = 1; k <= d; ++k) {
    auto target = meet(fsupp, xs[k - 1].range());
    if (target.empty()) continue;
    std::size_t a = 0;
    for (;;) {
      if (is_j0(a)) break;
      std::optional<std::size_t> next;
      for (int c : t.at(a).children)
        if (meet(t.at(c).supp, xs[k - 1].range()) == target) {
          next = static_cast<std::size_t>(c);
          break;
        }
      if (!next) break;
      a = *next;
    }
    out.A[k - 1] = a;
    T[a].push_back(k);
  }

  std::vector<std::vector<std::size_t>> D(N);
  std::vector<NodeG> G(N);
  out.trace.resize(N);
  bool locals_ok = true, premises_ok = true, nodes_ok = true;
  std::string local_note, node_note;
  for (std::size_t r = N; r-- > 0;) {
    const auto& node = t.at(r);
    const KFunctional& fa = node.f;
    std::set<std::size_t> Ds(T[r].begin(), T[r].end());
    for (int c : node.children) Ds.insert(D[c].begin(), D[c].end());
    D[r].assign(Ds.begin(), Ds.end());
    auto& tr = out.trace[r];
    tr.address = node.address;
    tr.index = weight_index(fa);
    tr.T = T[r];
    tr.D = D[r];
    NodeG& g = G[r];
    if (D[r].empty()) {
      tr.rule = "empty";
    } else if (node.children.empty()) {
      tr.rule = "terminal";
      g.head = D[r].front();
    } else if (is_j0(r)) {
      tr.rule = "case2";
      std::size_t best = D[r].front();
      for (std::size_t k : D[r])
        if (qabs(bs[k - 1]) > qabs(bs[best - 1])) best = k;
      g.head = best;
      std::vector<FinVec::Entry> es;
      for (std::size_t k : D[r]) es.emplace_back(k, eps);
      g.g2 = FinVec::from_entries(es);
      Q lhs = qabs(fa.eval(params, combo(xs, bs, D[r])));
      Q sum = 0;
      for (std::size_t k : D[r]) sum += qabs(bs[k - 1]);
      Q rhs = C * (qabs(bs[best - 1]) + eps * sum);
      bool interval = D[r].back() - D[r].front() + 1 == D[r].size();
      if (!(lhs <= rhs) || !interval) {
        premises_ok = false;
        local_note += " premise(d) at " + node.address;
      }
    } else {
      tr.rule = "case1";
      std::size_t J = weight_index(fa);
      Q mJ = q_of(params.m(J));
      std::vector<std::size_t> T1, T2;
      for (std::size_t k : T[r]) {
        if (k < d && q_of(params.m(ris.js[k])) <= mJ) T2.push_back(k);
        else T1.push_back(k);
      }
      tr.T1 = T1;
      tr.T2 = T2;
      std::vector<std::size_t> rest = T1;
      if (!T1.empty() && !(mJ < q_of(params.m(ris.js[T1.front() - 1])))) {
        g.head = T1.front();
        rest.erase(rest.begin());
        if (qabs(fa.eval(params, xs[T1.front() - 1])) > C) {
          locals_ok = false;
          local_note += " head at " + node.address;
        }
      }
      for (std::size_t k : T2)
        if (qabs(fa.eval(params, xs[k - 1])) > C * eps) {
          locals_ok = false;
          local_note += " small-support term x_" + std::to_string(k) + " at " + node.address;
        }
      std::vector<WFunctional> comps;
      for (std::size_t k : rest) {
        comps.push_back(WFunctional::leaf(k));
        if (qabs(fa.eval(params, xs[k - 1])) > C / mJ) {
          locals_ok = false;
          local_note += " condition (c) for x_" + std::to_string(k) + " at " + node.address;
        }
      }
      FinVec g2;
      for (std::size_t k : T2) g2 = g2 + FinVec::basis(k, eps);
      for (int c : node.children) {
        const NodeG& gb = G[c];
        g2 = g2 + gb.g2;
        if (gb.head) {
          Coord hk = *gb.head;
          if (gb.h) {
            auto lo = gb.h->restrict(Interval::of(1, hk - 1));
            if (!lo.is_zero()) comps.push_back(lo);
          }
          comps.push_back(WFunctional::leaf(hk));
          if (gb.h) {
            auto hi = gb.h->restrict(Interval::of(hk + 1, kCoordMax));
            if (!hi.is_zero()) comps.push_back(hi);
          }
        } else if (gb.h && !gb.h->is_zero()) {
          comps.push_back(*gb.h);
        }
      }
      std::sort(comps.begin(), comps.end(),
                [](const WFunctional& a, const WFunctional& b) { return a.range().lo < b.range().lo; });
      g.h = WFunctional::weighted(J, std::move(comps));
      g.g2 = g2;
    }
    tr.head = g.head;
    // property (4) at this node
    if (!D[r].empty()) {
      Q lhs = qabs(fa.eval(params, combo(xs, bs, D[r])));
      Q rhs = C * (g.g1(params) + g.g2).dot(abs_b(bs, D[r]));
      if (lhs > rhs) {
        nodes_ok = false;
        node_note += " " + node.address;
      }
    }
  }

  std::vector<std::size_t> all_k(d);
  for (std::size_t k = 1; k <= d; ++k) all_k[k - 1] = k;
  NodeG root = N ? G[0] : NodeG{};
  out.head = root.head;
  out.h1 = root.h;
  out.g1 = root.g1(params);
  out.g2 = root.g2;
  out.lhs = qabs(f.eval(params, combo(xs, bs, all_k)));
  out.rhs = C * (out.g1 + out.g2).dot(abs_b(bs, all_k));

  bool hyp = ris.ok() && locals_ok && premises_ok;
  Check h;
  h.claim = "hypotheses of the reduction hold on this instance";
  h.anchor = "bi.hypotheses";
  h.text("ris scope", ris.scope);
  h.status = hyp ? Status::Pass : Status::Inconclusive;
  if (!hyp) h.note = ris.ok() ? "unverified at" + local_note : "R.I.S. conditions not all verified";
  out.checks.push_back(h);

  Check m;
  m.claim = "|f(sum b_k x_k)| <= C (g_1 + g_2)(sum |b_k| e_k)";
  m.anchor = "bi.master";
  m.value("lhs", out.lhs).value("rhs", out.rhs);
  m.status = le_status(out.lhs, out.rhs, hyp);
  m.slack = to_string(out.rhs - out.lhs);
  out.checks.push_back(m);

  Check n;
  n.claim = "per-node inequality on D_alpha";
  n.anchor = "bi.nodes";
  n.status = nodes_ok ? Status::Pass : (hyp ? Status::Fail : Status::Inconclusive);
  if (!nodes_ok) n.note = "violated at" + node_note;
  out.checks.push_back(n);

  Check w;
  w.claim = "h_1 in W with w(h_1) = w(f)";
  w.anchor = "bi.h1";
  if (!out.h1) {
    w.status = Status::Pass;
    w.note = N && out.trace[0].rule == "case1" ? "" : "no h_1: root rule " + (N ? out.trace[0].rule : std::string("empty"));
  } else {
    auto v = verify_w(*out.h1, params);
    bool same = out.h1->j() == weight_index(f);
    w.status = !v && same ? Status::Pass : Status::Fail;
    if (v) w.note = v->str();
    else if (!same) w.note = "weight index differs";
    w.text("h_1", out.h1->str());
  }
  out.checks.push_back(w);

  if (j0) {
    Check a;
    a.claim = "h_1 has no node of weight m_{j0}";
    a.anchor = "bi.j0-free";
    a.status = out.h1 && out.h1->uses_index(*j0) ? Status::Fail : Status::Pass;
    a.value("j0", Q(Z(*j0)));
    out.checks.push_back(a);
  }

  Check s;
  s.claim = "||g_2||_inf <= eps";
  s.anchor = "bi.g2";
  s.value("||g_2||_inf", out.g2.norm_inf()).value("eps", eps);
  s.status = out.g2.norm_inf() <= eps ? Status::Pass : Status::Fail;
  out.checks.push_back(s);

  Check sp;
  sp.claim = "supp g_1, supp g_2 within {k : supp f meets range x_k}";
  sp.anchor = "bi.support";
  sp.status = Status::Pass;
  for (auto* v : {&out.g1, &out.g2})
    for (Coord k : v->supp())
      if (k < 1 || k > d || out.A[k - 1] == npos) sp.status = Status::Fail;
  out.checks.push_back(sp);

  Check dl;
  dl.claim = "D_alpha shrinks down the tree and vanishes below weight m_{j0}";
  dl.anchor = "bi.D-laws";
  dl.status = Status::Pass;
  for (std::size_t i = 0; i < N; ++i) {
    int p = t.at(i).parent;
    if (p < 0) continue;
    if (!std::includes(D[p].begin(), D[p].end(), D[i].begin(), D[i].end())) {
      dl.status = Status::Fail;
      dl.note += " not nested at " + t.at(i).address;
    }
    for (int a = p; a >= 0; a = t.at(a).parent)
      if (is_j0(a) && !D[i].empty()) {
        dl.status = Status::Fail;
        dl.note += " nonempty below j0 at " + t.at(i).address;
      }
  }
  out.checks.push_back(dl);
  return out;
}

std::vector<Check> ris_average_estimates(const RISWitness& ris, std::size_t j, int variant, const ParamSeq& params,
                                         const std::vector<KFunctional>& family,
                                         const std::vector<KFunctional>& unit_witnesses) {
  Z nj = params.n(j);
  if (Z(ris.xs.size()) != nj) throw std::invalid_argument("average needs n_j blocks");
  Q inv_n = Q(Z(1), nj);
  FinVec avg = sum_of(ris.xs).scaled(inv_n);
  Q mj = q_of(params.m(j));
  const Q& C = ris.C;
  std::vector<Check> out;
  if (variant == 1 || variant == 2) {
    auto pre = basis_average_prerequisite(params, j, variant == 2);
    bool hyp = ris.ok() && ris.eps <= inv_n && !pre;
    Check c;
    c.anchor = variant == 1 ? "ris.estimate.1" : "ris.estimate.2";
    c.claim = variant == 1 ? "|f(avg)| <= 3C/(m_j w(f)) or C/w(f) + 2C/n_j" : "|f(avg)| <= 4C/m_j^3";
    Status st = Status::Pass;
    std::optional<Q> worst;
    std::string worst_f;
    std::size_t n = 0;
    for (auto& f : family) {
      if (f.is_zero()) continue;
      if (variant == 2 && f.is_leaf()) continue;
      Q v = qabs(f.eval(params, avg));
      Q bound;
      if (variant == 2) {
        bound = Q(4) * C / (mj * mj * mj);
      } else if (f.is_leaf()) {
        bound = C * inv_n;
      } else {
        Q w = q_of(params.m(f.index()));
        bound = w < mj ? Q(3) * C / (mj * w) : C / w + Q(2) * C * inv_n;
      }
      ++n;
      Q sl = bound - v;
      if (!worst || sl < *worst) {
        worst = sl;
        worst_f = f.str();
      }
      Status s = le_status(v, bound, hyp);
      if (s == Status::Fail) st = Status::Fail;
      else if (s == Status::Inconclusive && st == Status::Pass) st = Status::Inconclusive;
    }
    c.status = st;
    c.value("functionals", Q(Z(n)));
    if (worst) {
      c.slack = to_string(*worst);
      c.text("tightest", worst_f);
    }
    if (!hyp) c.note = pre ? "regime: " + *pre : "hypotheses not verified (R.I.S. or eps > 1/n_j)";
    out.push_back(c);
    return out;
  }
  if (variant != 3) throw std::invalid_argument("variant must be 1, 2 or 3");
  Check lo;
  lo.claim = "||avg|| >= 1/m_j by (1/m_j) sum f_i";
  lo.anchor = "ris.estimate.3.lower";
  if (unit_witnesses.size() != ris.xs.size()) {
    lo.status = Status::Inconclusive;
    lo.note = "no unit witnesses supplied";
  } else {
    bool units = true;
    for (std::size_t i = 0; i < ris.xs.size(); ++i)
      if (unit_witnesses[i].eval(params, ris.xs[i]) != 1) units = false;
    auto witness = KFunctional::even(j, unit_witnesses);
    Q v = witness.eval(params, avg);
    bool in_k = verify_tree(witness, params).ok();
    lo.value("witness value", v).value("1/m_j", Q(1) / mj);
    lo.status = units && in_k && v >= Q(1) / mj ? Status::Pass : Status::Fail;
    if (!units) lo.note = "some f_i(x_i) != 1";
    else if (!in_k) lo.note = "witness not in K";
  }
  out.push_back(lo);
  Check up;
  up.claim = "||avg|| <= 6/m_j";
  up.anchor = "ris.estimate.3.upper";
  Q u = norm_W_upper(avg, params);
  up.value("upper", u).value("6/m_j", Q(6) / mj);
  up.status = u <= Q(6) / mj ? Status::Pass : Status::Inconclusive;
  if (!up.passed()) up.note = "upper bracket does not decide";
  up.slack = to_string(Q(6) / mj - u);
  out.push_back(up);
  return out;
}

}  // namespace xius
