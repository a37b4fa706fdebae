#include "xius/norm.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <algorithm>
#include <limits>

namespace xius {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct DPWeight {
  std::size_t j;
  Q inv_m;
  std::size_t t;  // effective arity, at most the support size
};

// Indices with 4 n_j < N, plus the least index with 4 n_j >= N.
std::vector<DPWeight> dp_weights(const ParamSeq& params, std::size_t N, std::optional<std::size_t> k) {
  std::vector<DPWeight> out;
  for (std::size_t j = 1;; ++j) {
    if (k && j > *k) break;
    if (!params.defined(j)) break;
    Z A = Z(4) * params.n(j);
    std::size_t t = A >= Z(N) ? N : static_cast<std::size_t>(A);
    out.push_back({j, Q(1) / Q(params.m(j)), t});
    if (A >= Z(N)) break;
  }
  return out;
}

struct Choice {
  std::size_t leaf_pos = kNone;  // leaf at this position, or
  std::size_t w = kNone;         // weighted by dp weight w
  std::size_t split = kNone;     // first part [a, split]
};

class IntervalDP {
 public:
  IntervalDP(const FinVec& x, const ParamSeq& params, std::optional<std::size_t> k)
      : N_(x.size()), weights_(dp_weights(params, x.size(), k)) {
    for (auto& [c, v] : x) {
      coord_.push_back(c);
      sign_.push_back(v < 0 ? -1 : 1);
      abs_.push_back(qabs(v));
    }
    best_.assign(N_ * N_, Q(0));
    choice_.assign(N_ * N_, Choice{});
    leafpos_.assign(N_ * N_, 0);
    H_.resize(weights_.size());
    Hs_.resize(weights_.size());
    for (std::size_t w = 0; w < weights_.size(); ++w) {
      std::size_t rmax = weights_[w].t >= 1 ? weights_[w].t - 1 : 0;
      H_[w].assign(rmax + 1, std::vector<Q>());
      Hs_[w].assign(rmax + 1, std::vector<std::size_t>());
      for (std::size_t r = 1; r <= rmax; ++r) {
        H_[w][r].assign(N_ * N_, Q(0));
        Hs_[w][r].assign(N_ * N_, kNone);
      }
    }
    run();
  }

  Q value() const { return N_ == 0 ? Q(0) : best_[idx(0, N_ - 1)]; }

  WFunctional witness() const {
    if (N_ == 0) return WFunctional::weighted(1, {});
    return build(0, N_ - 1);
  }

 private:
  std::size_t idx(std::size_t a, std::size_t b) const { return a * N_ + b; }

  void run() {
    for (std::size_t len = 1; len <= N_; ++len) {
      for (std::size_t a = 0; a + len <= N_; ++a) {
        std::size_t b = a + len - 1;
        Choice ch;
        Q cur;
        std::size_t leaf_here = a;
        if (len == 1) {
          cur = abs_[a];
          ch.leaf_pos = a;
        } else {
          std::size_t lp = leafpos_[idx(a, b - 1)];
          if (abs_[b] > abs_[lp]) lp = b;
          cur = abs_[lp];
          ch.leaf_pos = lp;
          leaf_here = lp;
          for (std::size_t w = 0; w < weights_.size(); ++w) {
            std::size_t r = weights_[w].t - 1;
            Q bestsum = -1;
            std::size_t bests = kNone;
            for (std::size_t c = a; c < b; ++c) {
              Q s = best_[idx(a, c)] + H_[w][r][idx(c + 1, b)];
              if (s > bestsum) {
                bestsum = s;
                bests = c;
              }
            }
            Q cand = bestsum * weights_[w].inv_m;
            if (cand > cur) {
              cur = cand;
              ch = Choice{kNone, w, bests};
            }
          }
        }
        best_[idx(a, b)] = cur;
        choice_[idx(a, b)] = ch;
        leafpos_[idx(a, b)] = len == 1 ? a : leaf_here;
        fill_h(a, b);
      }
    }
  }

  void fill_h(std::size_t a, std::size_t b) {
    for (std::size_t w = 0; w < weights_.size(); ++w) {
      std::size_t rmax = H_[w].size() - 1;
      for (std::size_t r = 1; r <= rmax; ++r) {
        Q v = best_[idx(a, b)];
        std::size_t s = kNone;
        if (r >= 2) {
          for (std::size_t c = a; c < b; ++c) {
            Q t = best_[idx(a, c)] + H_[w][r - 1][idx(c + 1, b)];
            if (t > v) {
              v = t;
              s = c;
            }
          }
        }
        H_[w][r][idx(a, b)] = v;
        Hs_[w][r][idx(a, b)] = s;
      }
    }
  }

  void parts(std::size_t w, std::size_t r, std::size_t a, std::size_t b,
             std::vector<std::pair<std::size_t, std::size_t>>& out) const {
    std::size_t s = Hs_[w][r][idx(a, b)];
    if (s == kNone) {
      out.emplace_back(a, b);
      return;
    }
    out.emplace_back(a, s);
    parts(w, r - 1, s + 1, b, out);
  }

  WFunctional build(std::size_t a, std::size_t b) const {
    const Choice& ch = choice_[idx(a, b)];
    if (ch.w == kNone) return WFunctional::leaf(coord_[ch.leaf_pos], sign_[ch.leaf_pos]);
    std::vector<std::pair<std::size_t, std::size_t>> ps{{a, ch.split}};
    parts(ch.w, weights_[ch.w].t - 1, ch.split + 1, b, ps);
    std::vector<WFunctional> kids;
    for (auto& [l, h] : ps) kids.push_back(build(l, h));
    return WFunctional::weighted(weights_[ch.w].j, std::move(kids));
  }

  std::size_t N_;
  std::vector<DPWeight> weights_;
  std::vector<Coord> coord_;
  std::vector<int> sign_;
  std::vector<Q> abs_;
  std::vector<Q> best_;
  std::vector<Choice> choice_;
  std::vector<std::size_t> leafpos_;  // position of the largest |x| on [a, b]
  std::vector<std::vector<std::vector<Q>>> H_;
  std::vector<std::vector<std::vector<std::size_t>>> Hs_;
};

Q sum_largest(std::vector<Q> abs_desc, const Z& count) {
  Q s = 0;
  for (std::size_t i = 0; i < abs_desc.size() && Z(i) < count; ++i) s += abs_desc[i];
  return s;
}

NormCertificate norm_impl(const FinVec& x, const ParamSeq& params, std::optional<std::size_t> k,
                          const NormOptions& opt) {
  if (x.is_zero()) return {Q(0), WFunctional::weighted(1, {})};
  if (k && *k == 0) {
    const FinVec::Entry* bestp = &*x.begin();
    for (auto& e : x)
      if (qabs(e.second) > qabs(bestp->second)) bestp = &e;
    return {qabs(bestp->second), WFunctional::leaf(bestp->first, bestp->second < 0 ? -1 : 1)};
  }
  if (x.size() > opt.dp_ceiling) {
    std::vector<Q> a;
    for (auto& e : x) a.push_back(qabs(e.second));
    std::sort(a.begin(), a.end(), std::greater<Q>());
    Q lo = a.front();
    Q l1 = 0;
    for (auto& v : a) l1 += v;
    if (params.defined(1) && (!k || *k >= 1)) {
      Q alt = sum_largest(a, Z(4) * params.n(1)) / Q(params.m(1));
      lo = std::max(lo, alt);
    }
    throw NormResourceError("support " + std::to_string(x.size()) + " exceeds DP ceiling " +
                                std::to_string(opt.dp_ceiling),
                            lo, l1);
  }
  IntervalDP dp(x, params, k);
  NormCertificate cert{dp.value(), dp.witness()};
  if (cert.witness.eval(params, x) != cert.value)
    throw std::logic_error("norm witness does not attain the DP value");
  return cert;
}

}  // namespace

NormCertificate norm_W(const FinVec& x, const ParamSeq& params, const NormOptions& opt) {
  return norm_impl(x, params, std::nullopt, opt);
}

NormCertificate norm_W_truncated(const FinVec& x, const ParamSeq& params, std::size_t k,
                                 const NormOptions& opt) {
  return norm_impl(x, params, k, opt);
}

Q norm_W_upper(const FinVec& x, const ParamSeq& params, const NormOptions& opt) {
  try {
    return norm_W(x, params, opt).value;
  } catch (const NormResourceError& e) {
    return e.upper;
  }
}

Q norm_tildeK(const FinVec& x, const ParamSeq& params) {
  if (x.is_zero()) return Q(0);
  std::vector<Q> a;
  for (auto& e : x) a.push_back(qabs(e.second));
  std::sort(a.begin(), a.end(), std::greater<Q>());
  std::vector<Q> prefix(a.size() + 1, Q(0));
  for (std::size_t i = 0; i < a.size(); ++i) prefix[i + 1] = prefix[i] + a[i];
  Q best = a.front();
  for (std::size_t J = 2; params.defined(J); J += 2) {
    Z nJ = params.n(J);
    std::size_t take = nJ >= Z(a.size()) ? a.size() : static_cast<std::size_t>(nJ);
    Q v = prefix[take] / Q(params.m(J));
    if (v > best) best = v;
    if (nJ >= Z(a.size())) break;
  }
  return best;
}

// ----------------------------------------------------------------------------------------------
// Oracle.

namespace {

using Vec = std::vector<Q>;

struct Bucket {
  std::vector<Vec> items;
};

bool dominated(const Vec& a, const Vec& b) {  // a <= b pointwise
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

class Oracle {
 public:
  Oracle(const FinVec& x, const ParamSeq& params, const BruteForceCaps& caps, std::optional<std::size_t> k)
      : N_(x.size()), caps_(caps) {
    for (auto& e : x) a_.push_back(qabs(e.second));
    // All indices up to the first with 4 n_j >= N, and one more when available.
    bool extra_taken = false;
    for (std::size_t j = 1;; ++j) {
      if (k && j > *k) break;
      if (!params.defined(j)) break;
      Z A = Z(4) * params.n(j);
      std::size_t arity = A >= Z(caps.arity_cap) ? caps.arity_cap : static_cast<std::size_t>(A);
      weights_.push_back({Q(1) / Q(params.m(j)), arity});
      if (A >= Z(N_)) {
        if (extra_taken) break;
        extra_taken = true;
      }
    }
    buckets_.assign(N_ * N_, Bucket{});
    for (std::size_t p = 0; p < N_; ++p) {
      Vec v(N_, Q(0));
      v[p] = 1;
      buckets_[p * N_ + p].items.push_back(v);
    }
  }

  Q run() {
    for (std::size_t depth = 0; depth < caps_.depth_cap; ++depth) {
      auto snapshot = buckets_;
      std::vector<std::pair<std::size_t, Vec>> fresh;  // (bucket, vector)
      for (auto& w : weights_) {
        Vec acc(N_, Q(0));
        dfs(snapshot, w, 0, 0, kNone, acc, fresh);
      }
      bool changed = false;
      for (auto& [b, v] : fresh) changed |= insert(b, std::move(v));
      if (!changed) break;
    }
    Q best = 0;
    for (auto& b : buckets_)
      for (auto& v : b.items) {
        Q s = 0;
        for (std::size_t i = 0; i < N_; ++i) s += v[i] * a_[i];
        if (s > best) best = s;
      }
    return best;
  }

 private:
  struct W {
    Q inv_m;
    std::size_t arity;
  };

  void dfs(const std::vector<Bucket>& snap, const W& w, std::size_t start, std::size_t count,
           std::size_t first_lo, const Vec& acc, std::vector<std::pair<std::size_t, Vec>>& out) {
    for (std::size_t lo = start; lo < N_; ++lo) {
      for (std::size_t hi = lo; hi < N_; ++hi) {
        for (auto& v : snap[lo * N_ + hi].items) {
          if (++candidates_ > caps_.max_candidates)
            throw OracleExplosion("brute-force oracle exceeded " + std::to_string(caps_.max_candidates) +
                                  " candidates");
          Vec next = acc;
          for (std::size_t i = lo; i <= hi; ++i) next[i] += v[i];
          std::size_t flo = count == 0 ? lo : first_lo;
          if (count + 1 >= 2) {
            Vec scaled = next;
            for (auto& q : scaled) q *= w.inv_m;
            out.emplace_back(flo * N_ + hi, std::move(scaled));
          }
          if (count + 1 < w.arity && hi + 1 < N_) dfs(snap, w, hi + 1, count + 1, flo, next, out);
        }
      }
    }
  }

  bool insert(std::size_t b, Vec v) {
    auto& items = buckets_[b].items;
    for (auto& u : items)
      if (dominated(v, u)) return false;
    std::erase_if(items, [&](const Vec& u) { return dominated(u, v); });
    items.push_back(std::move(v));
    return true;
  }

  std::size_t N_;
  BruteForceCaps caps_;
  Vec a_;
  std::vector<W> weights_;
  std::vector<Bucket> buckets_;
  std::size_t candidates_ = 0;
};

}  // namespace

Q brute_force_norm(const FinVec& x, const ParamSeq& params, const BruteForceCaps& caps,
                   std::optional<std::size_t> truncate_k) {
  if (x.is_zero()) return Q(0);
  Oracle o(x, params, caps, truncate_k);
  return o.run();
}

// ----------------------------------------------------------------------------------------------
// l_p bounds.

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(unsigned prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

Q to_q(const mpfr_t f) {
  Q r;
  mpfr_get_q(r.backend().data(), f);
  return r;
}

}  // namespace

LpBound lp_upper_bound(const FinVec& x, const ParamSeq& params, std::size_t k, unsigned precision_bits) {
  auto ce = conjugate_exponents(params, k, precision_bits);
  if (ce.p.infinite) throw std::invalid_argument("p_k is infinite (m_k = 4 n_k)");
  if (!(ce.q.lo > 1)) throw std::invalid_argument("p_k is not a finite exponent above 1 (m_k > 4 n_k)");
  Mpfr p(precision_bits), s(precision_bits), b(precision_bits), t(precision_bits), r(precision_bits),
      one(precision_bits), res(precision_bits);
  mpfr_set_q(p.v, ce.p.lo.backend().data(), MPFR_RNDD);
  LpBound out;
  out.p_used = to_q(p.v);
  out.p_exact = ce.p.exact;
  if (x.is_zero()) {
    out.bound = 0;
    return out;
  }
  mpfr_set_ui(s.v, 0, MPFR_RNDN);
  for (auto& e : x) {
    Q a = qabs(e.second);
    mpfr_set_q(b.v, a.backend().data(), MPFR_RNDU);
    mpfr_pow(t.v, b.v, p.v, MPFR_RNDU);
    mpfr_add(s.v, s.v, t.v, MPFR_RNDU);
  }
  mpfr_set_ui(one.v, 1, MPFR_RNDN);
  // S^(1/p): increasing in the exponent when S >= 1, decreasing otherwise.
  mpfr_rnd_t dir = mpfr_cmp_ui(s.v, 1) >= 0 ? MPFR_RNDU : MPFR_RNDD;
  mpfr_div(r.v, one.v, p.v, dir);
  mpfr_pow(res.v, s.v, r.v, MPFR_RNDU);
  out.bound = to_q(res.v);
  return out;
}

bool pow_ge(const Z& a, std::uint64_t x, const Z& b, std::uint64_t y) {
  std::uint64_t ea, eb;
  if (is_pow2(a, ea) && is_pow2(b, eb)) return Z(ea) * Z(x) >= Z(eb) * Z(y);
  if (bit_length(a) * x > 200'000'000ull || bit_length(b) * y > 200'000'000ull)
    throw std::runtime_error("power comparison too large");
  return pow_z(a, x) >= pow_z(b, y);
}

std::optional<std::string> basis_average_prerequisite(const ParamSeq& params, std::size_t j,
                                                      bool weight_avoiding) {
  if (!params.defined(j)) return "index j = " + std::to_string(j) + " beyond parameter length";
  if (params.regime() == Regime::PaperExact) return std::nullopt;
  if (j >= 2) {
    for (std::size_t i = 1; i + 1 < j; ++i) {
      auto c = compare_q(params, i, j - 1);
      if (!c || *c > 0)
        return "q_" + std::to_string(i) + " <= q_" + std::to_string(j - 1) + " not established";
    }
    auto ce = conjugate_exponents(params, j - 1);
    if (ce.q.exact) {
      Z r = num(ce.q.lo), s = den(ce.q.lo);
      if (!pow_ge(params.n(j), static_cast<std::uint64_t>(s), params.m(j), 3 * static_cast<std::uint64_t>(r)))
        return "n_j >= m_j^(3 q_{j-1}) fails at j = " + std::to_string(j);
    } else {
      Mpfr ln_n(256), ln_m(256), t(256), rhs(256), qh(256);
      mpfr_set_z(t.v, params.n(j).backend().data(), MPFR_RNDD);
      mpfr_log(ln_n.v, t.v, MPFR_RNDD);
      mpfr_set_z(t.v, params.m(j).backend().data(), MPFR_RNDU);
      mpfr_log(ln_m.v, t.v, MPFR_RNDU);
      mpfr_set_q(qh.v, ce.q.hi.backend().data(), MPFR_RNDU);
      mpfr_mul(rhs.v, ln_m.v, qh.v, MPFR_RNDU);
      mpfr_mul_ui(rhs.v, rhs.v, 3, MPFR_RNDU);
      if (mpfr_cmp(ln_n.v, rhs.v) < 0)
        return "n_j >= m_j^(3 q_{j-1}) not established at j = " + std::to_string(j);
    }
  }
  if (weight_avoiding) {
    if (!params.defined(j + 1)) return "m_{j+1} not defined for j = " + std::to_string(j);
    if (params.m(j + 1) < pow_z(params.m(j), 3))
      return "m_{j+1} >= m_j^3 fails at j = " + std::to_string(j);
  }
  return std::nullopt;
}

bool is_basis_average(const FinVec& avg, const ParamSeq& params, std::size_t j) {
  if (!params.defined(j)) return false;
  Z nj = params.n(j);
  if (Z(avg.size()) != nj) return false;
  Q v(Z(1), nj);
  for (auto& e : avg)
    if (e.second != v) return false;
  return true;
}

std::vector<Check> check_basis_average_bounds(const ParamSeq& params, std::size_t j, const FinVec& average,
                                              const WeightedValue& f) {
  if (!is_basis_average(average, params, j))
    throw std::invalid_argument("average is not (1/n_j) * sum of n_j unit vectors");
  std::vector<Check> out;
  Q mj = Q(params.m(j));
  Q av = qabs(f.value);
  if (f.leaf) {
    Check c;
    c.claim = "leaf functional on a basis average: |f(avg)| <= 1/n_j";
    c.anchor = "basis-average.leaf";
    Q bound = Q(Z(1), params.n(j));
    c.value("value", av).value("bound", bound);
    c.slack = to_string(bound - av);
    c.status = av <= bound ? Status::Pass : Status::Fail;
    out.push_back(c);
    return out;
  }
  Q w = Q(params.m(f.index));
  {
    Check c;
    c.anchor = "basis-average.weight";
    Q bound;
    std::optional<std::string> pre;
    if (w < mj) {
      c.claim = "|f(avg)| <= 2/(w(f) m_j) for w(f) < m_j";
      bound = Q(2) / (w * mj);
      pre = basis_average_prerequisite(params, j, false);
    } else {
      c.claim = "|f(avg)| <= 1/w(f) for w(f) >= m_j";
      bound = Q(1) / w;
    }
    c.value("value", av).value("bound", bound).value("w", w).value("m_j", mj);
    c.slack = to_string(bound - av);
    c.status = le_status(av, bound, !pre.has_value());
    if (pre) c.note = "prerequisite fails: " + *pre + (av <= bound ? "; holds on this instance" : "; exceeded on this instance");
    out.push_back(c);
  }
  if (f.avoids_index_j) {
    Check c;
    c.anchor = "basis-average.avoiding";
    c.claim = "|f(avg)| <= 2/m_j^3 when the tree avoids weight m_j";
    Q bound = Q(2) / (mj * mj * mj);
    auto pre = basis_average_prerequisite(params, j, true);
    c.value("value", av).value("bound", bound);
    c.slack = to_string(bound - av);
    c.status = le_status(av, bound, !pre.has_value());
    if (pre) c.note = "prerequisite fails: " + *pre + (av <= bound ? "; holds on this instance" : "; exceeded on this instance");
    out.push_back(c);
  }
  return out;
}

std::vector<Check> check_basis_average_bounds(const WFunctional& f, const ParamSeq& params, std::size_t j,
                                              const FinVec& average) {
  WeightedValue s;
  s.leaf = f.is_leaf();
  s.index = f.is_leaf() ? 0 : f.j();
  s.value = f.eval(params, average);
  s.avoids_index_j = !f.uses_index(j);
  return check_basis_average_bounds(params, j, average, s);
}

}  // namespace xius
