#include "xius/kset.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xius {

namespace {

bool is_flat_average(const FinVec& x, const Z& count, std::vector<Coord>& coords) {
  if (Z(x.size()) != count) return false;
  Q v(Z(1), count);
  coords.clear();
  for (auto& [c, q] : x) {
    if (q != v) return false;
    coords.push_back(c);
  }
  return true;
}

Coord pair_max(const FinVec& x, const FinVec& f) {
  Coord m = 0;
  if (!x.is_zero()) m = std::max(m, x.max_supp());
  if (!f.is_zero()) m = std::max(m, f.max_supp());
  return m;
}

Coord pair_min(const FinVec& x, const FinVec& f) {
  Coord m = kCoordMax;
  if (!x.is_zero()) m = std::min(m, x.min_supp());
  if (!f.is_zero()) m = std::min(m, f.min_supp());
  return m;
}

std::size_t find_odd_index(const ParamSeq& params, std::size_t length) {
  for (std::size_t J = 3; J < 4096 && params.defined(J); J += 2) {
    Z n = params.n(J);
    if (n == Z(length)) return J;
    if (n > Z(length)) break;
  }
  return 0;
}

std::size_t find_even_index_with_n(const ParamSeq& params, std::size_t count) {
  for (std::size_t j = 2; j < 4096 && params.defined(j); j += 2) {
    Z n = params.n(j);
    if (n == Z(count)) return j;
    if (n > Z(count)) break;
  }
  return 0;
}

}  // namespace

std::optional<std::string> check_special_sequence(SpecialSequence& phi, const ParamSeq& params, SigmaCoder* coder,
                                                  const SpecialRegistry* registry) {
  const std::size_t len = phi.x.size();
  if (len < 2 || len % 2) return "length must be even and positive";
  if (phi.f.size() != len) return "as many functionals as vectors required";
  std::vector<FinVec> fv;
  for (std::size_t i = 1; i <= len; ++i) {
    const FinVec& x = phi.x_at(i);
    FinVec f = phi.f_at(i).to_vector(params);
    if (x.is_zero() || f.is_zero()) return "entry " + std::to_string(i) + " has empty support";
    if (x.norm_inf() > 1 || f.norm_inf() > 1) return "entry " + std::to_string(i) + " has a coordinate above 1";
    fv.push_back(std::move(f));
  }
  for (std::size_t i = 1; i < len; ++i)
    if (!(pair_max(phi.x_at(i), fv[i - 1]) < pair_min(phi.x_at(i + 1), fv[i])))
      return "ranges of entries " + std::to_string(i) + " and " + std::to_string(i + 1) + " are not successive";

  // sigma values
  if (coder) {
    std::vector<std::size_t> s;
    try {
      s = coder->assign(phi.x, fv);
    } catch (const SigmaError& e) {
      return std::string("sigma: ") + e.what();
    }
    if (!phi.sigma.empty() && phi.sigma != s) return "stored sigma values disagree with the coder";
    phi.sigma = s;
  }
  if (phi.sigma.size() != len) return "sigma values missing";
  for (std::size_t i = 1; i <= len; ++i) {
    std::size_t s = phi.sigma[i - 1];
    if (s % 2 || s == 0 || !params.defined(s)) return "sigma(phi_" + std::to_string(i) + ") is not a defined even index";
    if (i > 1 && !(phi.sigma[i - 2] < s)) return "sigma not increasing at prefix " + std::to_string(i);
    Coord mr = pair_max(phi.x_at(i), fv[i - 1]);
    if (params.m(s) < Z(mr) * Z(mr)) return "range bound fails at prefix " + std::to_string(i);
  }

  // (x_1, f_1)
  std::vector<Coord> coords;
  if (phi.j1 == 0) phi.j1 = find_even_index_with_n(params, phi.x_at(1).size());
  if (phi.j1 == 0 || phi.j1 % 2 || !params.defined(phi.j1)) return "x_1 is not an average over n_{2j} basis vectors";
  if (!is_flat_average(phi.x_at(1), params.n(phi.j1), coords))
    return "x_1 is not (1/n_{2j}) times a sum of n_{2j} basis vectors";
  if (phi.f_at(1) != KFunctional::flat(phi.j1, coords)) return "f_1 is not the flat functional on supp x_1";
  if (!(params.m(phi.j1) > Z(len) * Z(len))) return "m_{2j}^(1/2) > length fails for (x_1, f_1)";

  // later odd entries
  for (std::size_t i = 1; 2 * i + 1 <= len; ++i) {
    std::size_t s = phi.sigma[2 * i - 1];
    std::size_t k = 2 * i + 1;
    if (!is_flat_average(phi.x_at(k), params.n(s), coords))
      return "x_" + std::to_string(k) + " is not the basis average of size n_sigma";
    if (phi.f_at(k) != KFunctional::flat(s, coords))
      return "f_" + std::to_string(k) + " is not the flat functional of weight m_sigma";
  }

  // even entries
  phi.side_routes.resize(phi.pairs(), SideRoute::Unverified);
  for (std::size_t i = 1; i <= phi.pairs(); ++i) {
    std::size_t s = phi.even_sigma(i);
    const KFunctional& f = phi.f_at(2 * i);
    const FinVec& x = phi.x_at(2 * i);
    Q inv = Q(1) / Q(params.m(s));
    if (!f.is_even() || f.index() != s)
      return "f_" + std::to_string(2 * i) + " does not carry weight m_sigma(phi_" + std::to_string(2 * i - 1) + ")";
    auto vt = verify_tree(f, params, registry);
    if (!vt.ok()) return "f_" + std::to_string(2 * i) + " not in K: " + vt.violation->str();
    if (fv[2 * i - 1].norm_inf() > inv) return "||f_" + std::to_string(2 * i) + "||_inf > 1/m_sigma";
    if (qabs(f.eval(params, x)) > inv) return "|f_" + std::to_string(2 * i) + "(x_" + std::to_string(2 * i) + ")| > 1/m_sigma";
    SideRoute& r = phi.side_routes[i - 1];
    if (r == SideRoute::Sampled) continue;
    if (x.norm_1() <= 1) {
      r = SideRoute::L1;
      continue;
    }
    try {
      if (norm_W(x.scaled(Q(params.m(s))), params).value <= 1) {
        r = SideRoute::WNorm;
        continue;
      }
    } catch (const NormResourceError&) {
    }
    return "side condition |g(x_" + std::to_string(2 * i) + ")| <= 1/m_sigma not established";
  }

  std::size_t J = find_odd_index(params, len);
  if (J == 0) return "length is not n_J for any odd J";
  phi.J = J;
  return std::nullopt;
}

std::shared_ptr<const SpecialSequence> SpecialRegistry::add(SpecialSequence phi) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (phi.id.empty()) phi.id = "phi" + std::to_string(seqs_.size() + 1);
    for (auto& s : seqs_)
      if (s->id == phi.id) throw SpecialSequenceError("duplicate special sequence id " + phi.id);
  }
  if (auto v = check_special_sequence(phi, coder_.params(), &coder_, this))
    throw SpecialSequenceError(phi.id + ": " + *v);
  auto p = std::make_shared<const SpecialSequence>(std::move(phi));
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& s : seqs_)
    if (s->id == p->id) throw SpecialSequenceError("duplicate special sequence id " + p->id);
  seqs_.push_back(p);
  return p;
}

bool SpecialRegistry::contains(const SpecialSequence* p) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& s : seqs_)
    if (s.get() == p) return true;
  return false;
}

std::vector<std::shared_ptr<const SpecialSequence>> SpecialRegistry::all() const {
  std::lock_guard<std::mutex> lock(mu_);
  return seqs_;
}

std::shared_ptr<const SpecialSequence> SpecialRegistry::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& s : seqs_)
    if (s->id == id) return s;
  return nullptr;
}

std::vector<SpecialRegistry::Coincidence> SpecialRegistry::weight_coincidences() const {
  auto seqs = all();
  const auto& params = coder_.params();
  auto weights = [](const SpecialSequence& s) {
    std::vector<std::size_t> w{s.j1};
    for (std::size_t k = 2; k <= s.length(); ++k) w.push_back(s.sigma[k - 2]);
    return w;
  };
  std::vector<Coincidence> out;
  for (auto& a : seqs)
    for (auto& b : seqs) {
      if (a == b) continue;
      std::size_t n = std::min(a->length(), b->length());
      std::size_t i1 = n + 1;
      for (std::size_t i = 1; i <= n; ++i)
        if (a->x_at(i) != b->x_at(i) || a->f_at(i).to_vector(params) != b->f_at(i).to_vector(params)) {
          i1 = i;
          break;
        }
      auto wa = weights(*a), wb = weights(*b);
      std::set<std::size_t> late_a;
      for (std::size_t i = i1; i <= a->length(); ++i) late_a.insert(wa[i - 1]);
      Coincidence c{a->id, b->id, i1, 0};
      for (std::size_t k = i1; k <= b->length(); ++k)
        if (late_a.count(wb[k - 1])) ++c.weight_coincidences;
      out.push_back(c);
    }
  return out;
}

// ----------------------------------------------------------------------------------------------
// Tree verification.

namespace {

std::optional<KTreeViolation> verify_at(const KFunctional& f, const ParamSeq& params, const SpecialRegistry* registry,
                                        const std::string& path, bool is_root, std::vector<KTreeNode>& nodes) {
  if (f.is_zero()) {
    if (is_root) return std::nullopt;
    return KTreeViolation{path, "zero functional below the root"};
  }
  switch (f.kind()) {
    case KFunctional::Kind::Leaf:
      if (f.coord() == 0) return KTreeViolation{path, "leaf coordinate must be positive"};
      nodes.push_back({path, "leaf", 0});
      return std::nullopt;
    case KFunctional::Kind::Even: {
      std::size_t J = f.index();
      if (J == 0 || J % 2) return KTreeViolation{path, "even node needs an even index J >= 2"};
      if (!params.defined(J)) return KTreeViolation{path, "index beyond parameter length"};
      if (Z(f.children().size()) > params.n(J))
        return KTreeViolation{path, "arity " + std::to_string(f.children().size()) + " exceeds n_" +
                                        std::to_string(J) + " = " + params.n(J).str()};
      nodes.push_back({path, "even", J});
      Coord prev = 0;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        const auto& c = f.children()[i];
        std::string cp = path + "/" + std::to_string(i);
        if (c.is_zero()) return KTreeViolation{cp, "zero child"};
        auto r = c.range();
        if (i > 0 && !(prev < r.lo)) return KTreeViolation{cp, "children not successive"};
        prev = r.hi;
        if (auto v = verify_at(c, params, registry, cp, false, nodes)) return v;
      }
      return std::nullopt;
    }
    case KFunctional::Kind::Special: {
      std::size_t J = f.index();
      if (J < 3 || J % 2 == 0) return KTreeViolation{path, "special node needs an odd index J >= 3"};
      if (!params.defined(J)) return KTreeViolation{path, "index beyond parameter length"};
      const auto& phi = f.phi();
      if (!(registry && registry->contains(phi.get()))) {
        SpecialSequence copy = *phi;
        if (auto v = check_special_sequence(copy, params, nullptr, registry))
          return KTreeViolation{path, "special sequence " + phi->id + " invalid: " + *v};
      }
      if (Z(phi->length()) != params.n(J))
        return KTreeViolation{path, "special sequence length is not n_" + std::to_string(J)};
      Z nJ = params.n(J);
      Q small = Q(Z(1), nJ * nJ);
      for (std::size_t i = 1; i <= phi->pairs(); ++i) {
        const KFunctional& r = f.replacements()[i - 1];
        std::string rp = path + "/r" + std::to_string(i);
        std::size_t s = phi->even_sigma(i);
        if (!r.is_even() || r.is_zero() || r.index() != s)
          return KTreeViolation{rp, "replacement does not carry weight m_" + std::to_string(s)};
        if (r.supp() != phi->f_at(2 * i).supp()) return KTreeViolation{rp, "replacement support differs from f_" + std::to_string(2 * i)};
        std::vector<KTreeNode> scratch;
        if (auto v = verify_at(r, params, registry, rp, false, scratch)) return v;
        Q val = r.eval(params, phi->x_at(2 * i));
        const Q& lam = f.lambdas()[i - 1];
        if (val != 0) {
          if (lam != val * Q(params.m(s)))
            return KTreeViolation{path, "lambda of pair " + std::to_string(i) + " is not f'(m_sigma x)"};
        } else if (qabs(lam) != small) {
          return KTreeViolation{path, "lambda of pair " + std::to_string(i) + " is not +-1/n_J^2"};
        }
      }
      nodes.push_back({path, "special", J});
      auto kids = f.tree_children();
      for (std::size_t i = 0; i < kids.size(); ++i)
        if (auto v = verify_at(kids[i], params, registry, path + "/" + std::to_string(i), false, nodes)) return v;
      return std::nullopt;
    }
  }
  return KTreeViolation{path, "unknown node"};
}

}  // namespace

KTreeResult verify_tree(const KFunctional& f, const ParamSeq& params, const SpecialRegistry* registry) {
  KTreeResult r;
  r.violation = verify_at(f, params, registry, "root", true, r.nodes);
  if (r.violation) r.nodes.clear();
  return r;
}

KFunctional build_special_functional(const std::shared_ptr<const SpecialSequence>& phi, const ParamSeq& params,
                                     std::optional<std::vector<KFunctional>> replacements, Interval E, int sign,
                                     std::vector<int> zero_case_signs, const SpecialRegistry* registry) {
  if (!phi) throw SpecialFunctionalError("no special sequence");
  std::size_t J = phi->J ? phi->J : find_odd_index(params, phi->length());
  if (J == 0) throw SpecialFunctionalError("length of " + phi->id + " is not n_J for an odd J");
  std::vector<KFunctional> repl;
  if (replacements) {
    repl = *replacements;
    if (repl.size() != phi->pairs()) throw SpecialFunctionalError("one replacement per pair required");
  } else {
    for (std::size_t i = 1; i <= phi->pairs(); ++i) repl.push_back(phi->f_at(2 * i));
  }
  Z nJ = params.n(J);
  std::vector<Q> lam;
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    const KFunctional& r = repl[i - 1];
    std::size_t s = phi->even_sigma(i);
    if (!r.is_even() || r.index() != s)
      throw SpecialFunctionalError("replacement " + std::to_string(i) + " must carry weight m_" + std::to_string(s));
    if (r.supp() != phi->f_at(2 * i).supp())
      throw SpecialFunctionalError("replacement " + std::to_string(i) + " support differs from f_" + std::to_string(2 * i));
    int zs = i - 1 < zero_case_signs.size() ? zero_case_signs[i - 1] : 1;
    lam.push_back(lambda_rule(*phi, i, r, params, Q(Z(zs >= 0 ? 1 : -1), nJ * nJ)));
  }
  auto f = KFunctional::special(J, phi, E, sign, std::move(repl), std::move(lam));
  auto v = verify_tree(f, params, registry);
  if (!v.ok()) throw SpecialFunctionalError("result not in K: " + v.violation->str());
  return f;
}

// ----------------------------------------------------------------------------------------------
// Enumeration.

namespace {

struct Db {
  std::vector<KFunctional> items;
  std::set<std::string> seen;
  std::size_t cap;
  bool add(const KFunctional& f) {
    if (f.is_zero()) return false;
    if (!seen.insert(f.str()).second) return false;
    if (items.size() >= cap) throw EnumerationExplosion("enumeration exceeded " + std::to_string(cap) + " functionals");
    items.push_back(f);
    return true;
  }
};

void tuples(const std::vector<std::pair<Interval, KFunctional>>& base, std::size_t from, Coord after,
            std::size_t left, std::vector<KFunctional>& cur, std::size_t J, std::vector<KFunctional>& out) {
  for (std::size_t i = from; i < base.size(); ++i) {
    if (base[i].first.lo <= after) continue;
    cur.push_back(base[i].second);
    out.push_back(KFunctional::even(J, cur));
    if (left > 1) tuples(base, i + 1, base[i].first.hi, left - 1, cur, J, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<KFunctional> enumerate_K(const ParamSeq& params, const SpecialRegistry* registry, const EnumOptions& opt) {
  Db db{{}, {}, opt.max_items};
  for (Coord c = opt.window_lo; c <= opt.window_hi; ++c) {
    db.add(KFunctional::leaf(c, 1));
    db.add(KFunctional::leaf(c, -1));
  }
  for (std::size_t round = 0; round < opt.depth; ++round) {
    std::vector<std::pair<Interval, KFunctional>> base;
    for (auto& f : db.items) base.emplace_back(f.range(), f);
    std::stable_sort(base.begin(), base.end(), [](auto& a, auto& b) { return a.first.lo < b.first.lo; });
    for (std::size_t J = 2; J <= opt.max_even_index && params.defined(J); J += 2) {
      Z nJ = params.n(J);
      std::size_t arity = nJ >= Z(opt.arity_cap) ? opt.arity_cap : static_cast<std::size_t>(nJ);
      std::vector<KFunctional> out, cur;
      tuples(base, 0, 0, arity, cur, J, out);
      for (auto& f : out) db.add(f);
    }
  }
  if (registry) {
    for (auto& phi : registry->all()) {
      if (phi->J == 0 || !params.defined(phi->J)) continue;
      auto canon = canonical_special(phi->J, phi, params);
      db.add(canon);
      db.add(canon.negate());
      auto s = canon.supp();
      std::size_t used = 0;
      for (std::size_t a = 0; a < s.size() && used < opt.special_budget; ++a)
        for (std::size_t b = a; b < s.size() && used < opt.special_budget; ++b) {
          if (a == 0 && b + 1 == s.size()) continue;
          auto r = canon.restrict(Interval::of(s[a], s[b]));
          if (db.add(r)) {
            ++used;
            db.add(r.negate());
          }
        }
    }
  }
  return db.items;
}

// ----------------------------------------------------------------------------------------------
// Bracket.

KBracket norm_K_bracket(const FinVec& x, const ParamSeq& params, const std::vector<KFunctional>& database,
                        bool even_dp, const NormOptions& opt) {
  KBracket out;
  out.upper = 0;
  out.lower = 0;
  if (x.is_zero()) return out;
  try {
    out.upper = norm_W(x, params, opt).value;
  } catch (const NormResourceError& e) {
    out.upper = e.upper;
    out.upper_from_dp = false;
  }
  std::vector<Coord> pos;
  for (auto& e : x) pos.push_back(e.first);
  const std::size_t N = pos.size();
  auto idx = [N](std::size_t a, std::size_t b) { return a * N + b; };

  // Seeds: leaves and database functionals on every sub-interval of the support.
  std::vector<Q> L(N * N, Q(0));
  std::vector<KFunctional> W(N * N);
  const bool intervals = even_dp && N <= opt.dp_ceiling;
  for (std::size_t a = 0; a < N; ++a) {
    Q v = x.at(pos[a]);
    L[idx(a, a)] = qabs(v);
    W[idx(a, a)] = KFunctional::leaf(pos[a], v < 0 ? -1 : 1);
  }
  for (auto& f : database) {
    if (intervals) {
      for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a; b < N; ++b) {
          Interval E = Interval::of(pos[a], pos[b]);
          Q v = f.eval(params, x.restrict(E));
          if (qabs(v) > L[idx(a, b)]) {
            L[idx(a, b)] = qabs(v);
            auto r = f.restrict(E);
            W[idx(a, b)] = v < 0 ? r.negate() : r;
          }
        }
    } else {
      Q v = f.eval(params, x);
      if (qabs(v) > L[idx(0, N - 1)]) {
        L[idx(0, N - 1)] = qabs(v);
        W[idx(0, N - 1)] = v < 0 ? f.negate() : f;
      }
    }
  }
  if (intervals) {
    // Even closure by length, with H[r](a,b) = best sum over <= r parts.
    std::vector<std::size_t> Js;
    for (std::size_t J = 2; params.defined(J); J += 2) {
      Js.push_back(J);
      if (params.n(J) >= Z(N)) break;
    }
    for (std::size_t len = 1; len <= N; ++len) {
      for (std::size_t a = 0; a + len <= N; ++a) {
        std::size_t b = a + len - 1;
        if (len >= 2 && L[idx(a + 1, b)] > L[idx(a, b)]) {
          L[idx(a, b)] = L[idx(a + 1, b)];
          W[idx(a, b)] = W[idx(a + 1, b)];
        }
        if (len >= 2 && L[idx(a, b - 1)] > L[idx(a, b)]) {
          L[idx(a, b)] = L[idx(a, b - 1)];
          W[idx(a, b)] = W[idx(a, b - 1)];
        }
        for (std::size_t J : Js) {
          Z nJ = params.n(J);
          std::size_t r = nJ >= Z(len) ? len : static_cast<std::size_t>(nJ);
          // best partition of [a,b] into <= r successive parts
          std::vector<std::vector<Q>> H(r + 1, std::vector<Q>(len + 1, Q(-1)));
          std::vector<std::vector<std::size_t>> cut(r + 1, std::vector<std::size_t>(len + 1, 0));
          // H[t][e]: best over [a, a+e-1] with <= t parts
          for (std::size_t t = 0; t <= r; ++t) H[t][0] = 0;
          for (std::size_t t = 1; t <= r; ++t)
            for (std::size_t e = 1; e <= len; ++e) {
              H[t][e] = H[t - 1][e];
              cut[t][e] = len + 1;  // marker: fewer parts
              for (std::size_t s = 0; s < e; ++s) {
                if (H[t - 1][s] < 0) continue;
                Q v = H[t - 1][s] + L[idx(a + s, a + e - 1)];
                if (v > H[t][e]) {
                  H[t][e] = v;
                  cut[t][e] = s;
                }
              }
            }
          Q cand = H[r][len] / Q(params.m(J));
          if (cand > L[idx(a, b)]) {
            std::vector<KFunctional> kids;
            std::size_t t = r, e = len;
            while (e > 0) {
              std::size_t s = cut[t][e];
              if (s == len + 1) {
                --t;
                continue;
              }
              const auto& w = W[idx(a + s, a + e - 1)];
              if (!w.is_zero()) kids.push_back(w);
              e = s;
              --t;
            }
            std::reverse(kids.begin(), kids.end());
            if (kids.empty()) continue;
            L[idx(a, b)] = cand;
            W[idx(a, b)] = KFunctional::even(J, std::move(kids));
          }
        }
      }
    }
  }
  out.lower = L[idx(0, N - 1)];
  out.witness = W[idx(0, N - 1)];
  return out;
}

}  // namespace xius
