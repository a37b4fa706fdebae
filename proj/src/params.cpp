#include "xius/params.hpp"

#include <gmp.h>
#include <mpfr.h>

#include <limits>

namespace xius {

std::string regime_name(Regime r) { return r == Regime::PaperExact ? "PaperExact" : "Toy"; }

Regime parse_regime(const std::string& s) {
  if (s == "PaperExact" || s == "paper-exact" || s == "paper") return Regime::PaperExact;
  if (s == "Toy" || s == "toy") return Regime::Toy;
  throw ParamError("unknown regime '" + s + "'");
}

Z SeqRule::at(std::size_t j) const {
  std::int64_t e = a * static_cast<std::int64_t>(j) + b;
  if (kind == Kind::Linear) {
    if (e < 0) throw ParamError("rule yields a negative value at j = " + std::to_string(j));
    return Z(e);
  }
  if (e < 0) throw ParamError("rule exponent negative at j = " + std::to_string(j));
  return pow_z(Z(base), static_cast<std::uint64_t>(e));
}

std::string SeqRule::str() const {
  if (kind == Kind::Linear) return std::to_string(a) + "*j+" + std::to_string(b);
  return std::to_string(base) + "^(" + std::to_string(a) + "*j+" + std::to_string(b) + ")";
}

std::size_t ParamSeq::max_index() const {
  return unbounded() ? std::numeric_limits<std::size_t>::max() : length_;
}

Z ParamSeq::m(std::size_t j) const {
  if (j == 0) throw std::out_of_range("parameter indices start at 1");
  if (j <= m_.size()) return m_[j - 1];
  if (m_rule_) return m_rule_->at(j);
  throw std::out_of_range("m_" + std::to_string(j) + " beyond defined length " +
                          std::to_string(length_));
}

Z ParamSeq::n(std::size_t j) const {
  if (j == 0) throw std::out_of_range("parameter indices start at 1");
  if (j <= n_.size()) return n_[j - 1];
  if (n_rule_) return n_rule_->at(j);
  throw std::out_of_range("n_" + std::to_string(j) + " beyond defined length " +
                          std::to_string(length_));
}

std::optional<std::uint64_t> ParamSeq::s(std::size_t j) const {
  if (j >= 1 && j <= s_.size()) return s_[j - 1];
  return std::nullopt;
}

std::optional<std::size_t> ParamSeq::least_m_at_least(const Z& bound, std::size_t from,
                                                      std::size_t cap) const {
  std::size_t last = std::min(max_index(), cap);
  for (std::size_t j = std::max<std::size_t>(from, 1); j <= last; ++j)
    if (m(j) >= bound) return j;
  return std::nullopt;
}

bool ParamSeq::operator==(const ParamSeq& o) const {
  return regime_ == o.regime_ && m_ == o.m_ && n_ == o.n_ && s_ == o.s_ && m_rule_ == o.m_rule_ &&
         n_rule_ == o.n_rule_ && length_ == o.length_;
}

namespace {

void check_rule(const SeqRule& r, const char* which) {
  if (r.kind == SeqRule::Kind::Power && (r.base < 2 || r.a < 1))
    throw ParamError(std::string(which) + " rule must have base >= 2 and a >= 1");
  if (r.kind == SeqRule::Kind::Linear && r.a < 1)
    throw ParamError(std::string(which) + " rule must have a >= 1");
}

}  // namespace

ParamSeq make_param_seq(const ParamSpec& spec) {
  ParamSeq p;
  p.regime_ = spec.regime;
  p.label_ = spec.label;
  if (spec.regime == Regime::PaperExact) {
    std::size_t len = std::max(spec.length, std::max(spec.m.size(), spec.n.size()));
    if (len == 0) len = 1;
    if (len > kPaperExactMaxLength)
      throw ParamError("PaperExact length " + std::to_string(len) +
                       " exceeds the materializable limit " +
                       std::to_string(kPaperExactMaxLength) + " (n_5 has about 3.3e9 bits)");
    if (!spec.m.empty() && spec.m[0] != 2) throw ParamError("PaperExact condition m_1 = 2 violated");
    if (!spec.n.empty() && spec.n[0] != 4) throw ParamError("PaperExact condition n_1 = 4 violated");
    p.m_ = {Z(2)};
    p.n_ = {Z(4)};
    for (std::size_t j = 1; j < len; ++j) {
      Z mn = pow_z(p.m_.back(), 5);
      std::uint64_t sj = ceil_log2(pow_z(mn, 3));
      p.s_.push_back(sj);
      p.n_.push_back(pow_z(Z(4) * p.n_.back(), sj));
      p.m_.push_back(mn);
    }
    for (std::size_t j = 1; j < spec.m.size(); ++j)
      if (spec.m[j] != p.m_[j])
        throw ParamError("PaperExact condition m_{j+1} = m_j^5 violated at j = " + std::to_string(j));
    for (std::size_t j = 1; j < spec.n.size(); ++j)
      if (spec.n[j] != p.n_[j])
        throw ParamError("PaperExact condition n_{j+1} = (4 n_j)^{s_j} with s_j minimal violated at j = " +
                         std::to_string(j));
    p.length_ = len;
    if (p.label_.empty()) p.label_ = "paper-exact";
    return p;
  }

  p.m_ = spec.m;
  p.n_ = spec.n;
  p.m_rule_ = spec.m_rule;
  p.n_rule_ = spec.n_rule;
  if (p.m_rule_) check_rule(*p.m_rule_, "m");
  if (p.n_rule_) check_rule(*p.n_rule_, "n");
  if (p.m_rule_.has_value() != p.n_rule_.has_value())
    throw ParamError("m and n must both have an extension rule or neither");
  std::size_t len = std::max(spec.length, std::max(spec.m.size(), spec.n.size()));
  if (!p.m_rule_ && (spec.m.size() < len || spec.n.size() < len)) {
    if (spec.m.size() != spec.n.size())
      throw ParamError("m and n have different lengths and no extension rule");
    throw ParamError("sequence shorter than requested length " + std::to_string(len));
  }
  if (!p.m_rule_ && spec.m.size() != spec.n.size())
    throw ParamError("m and n have different lengths and no extension rule");
  if (len == 0) throw ParamError("empty parameter sequence");
  p.length_ = p.m_rule_ ? len : spec.m.size();
  // With a rule, also check the junction between the explicit prefix and the rule.
  std::size_t check_to = p.m_rule_ ? std::max(len, std::max(p.m_.size(), p.n_.size()) + 1) : len;
  if (p.m(1) < 2) throw ParamError("m_1 >= 2 violated");
  if (p.n(1) < 2) throw ParamError("n_1 >= 2 violated");
  for (std::size_t j = 1; j < check_to; ++j) {
    if (!(p.m(j) < p.m(j + 1))) throw ParamError("m not strictly increasing at j = " + std::to_string(j));
    if (!(p.n(j) < p.n(j + 1))) throw ParamError("n not strictly increasing at j = " + std::to_string(j));
  }
  if (p.label_.empty()) p.label_ = "toy";
  return p;
}

ParamSeq paper_exact(std::size_t length) {
  ParamSpec s;
  s.regime = Regime::PaperExact;
  s.length = length;
  return make_param_seq(s);
}

ParamSeq toy(std::vector<Z> m, std::vector<Z> n, std::string label) {
  ParamSpec s;
  s.regime = Regime::Toy;
  s.m = std::move(m);
  s.n = std::move(n);
  s.length = s.m.size();
  s.label = std::move(label);
  return make_param_seq(s);
}

ParamSeq toy_rule(SeqRule m, SeqRule n, std::size_t length, std::string label) {
  ParamSpec s;
  s.regime = Regime::Toy;
  s.m_rule = m;
  s.n_rule = n;
  s.length = length;
  s.label = std::move(label);
  return make_param_seq(s);
}

ParamSeq named_params(const std::string& name) {
  using K = SeqRule::Kind;
  if (name == "toyA") return toy_rule({K::Power, 2, 1, 0}, {K::Power, 2, 1, 1}, 8, "toyA");
  if (name == "toyS") return toy_rule({K::Power, 2, 2, -1}, {K::Linear, 0, 1, 1}, 8, "toyS");
  if (name == "toyD") {
    ParamSpec s;
    s.regime = Regime::Toy;
    s.n = {Z(2), Z(3), Z(4)};
    s.m_rule = SeqRule{K::Power, 2, 2, -1};
    s.n_rule = SeqRule{K::Power, 2, 1, 0};
    s.length = 12;
    s.label = "toyD";
    return make_param_seq(s);
  }
  if (name == "paper1") return paper_exact(1);
  if (name == "paper2") return paper_exact(2);
  if (name == "paper3") return paper_exact(3);
  throw ParamError("unknown parameter set '" + name + "'");
}

std::vector<std::string> named_param_list() { return {"toyA", "toyS", "toyD", "paper1", "paper2", "paper3"}; }

std::string RealBracket::str() const {
  if (infinite) return "inf";
  if (exact) return to_string(lo);
  return "[" + to_string(lo) + ", " + to_string(hi) + "]";
}

std::pair<Z, std::uint64_t> minimal_base(const Z& a) {
  if (a < 2) return {a, 1};
  std::uint64_t e;
  if (is_pow2(a, e)) return {Z(2), e};
  if (!mpz_perfect_power_p(a.backend().data())) return {a, 1};
  std::uint64_t bits = bit_length(a);
  for (std::uint64_t u = 2; u <= bits; ++u) {
    Z r;
    if (mpz_root(r.backend().data(), a.backend().data(), u)) {
      auto [c, v] = minimal_base(r);
      return {c, v * u};
    }
  }
  return {a, 1};
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(unsigned prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

Q mpfr_to_q(const mpfr_t f) {
  Q r;
  mpfr_get_q(r.backend().data(), f);
  return r;
}

void set_z(mpfr_t f, const Z& z, mpfr_rnd_t rnd) { mpfr_set_z(f, z.backend().data(), rnd); }

// Bracket of ln(A)/ln(a) for a, A >= 2.
std::pair<Q, Q> log_ratio_bracket(const Z& A, const Z& a, unsigned prec) {
  Mpfr lA_lo(prec), lA_hi(prec), la_lo(prec), la_hi(prec), t(prec), lo(prec), hi(prec);
  set_z(t.v, A, MPFR_RNDD);
  mpfr_log(lA_lo.v, t.v, MPFR_RNDD);
  set_z(t.v, A, MPFR_RNDU);
  mpfr_log(lA_hi.v, t.v, MPFR_RNDU);
  set_z(t.v, a, MPFR_RNDD);
  mpfr_log(la_lo.v, t.v, MPFR_RNDD);
  set_z(t.v, a, MPFR_RNDU);
  mpfr_log(la_hi.v, t.v, MPFR_RNDU);
  mpfr_div(lo.v, lA_lo.v, la_hi.v, MPFR_RNDD);
  mpfr_div(hi.v, lA_hi.v, la_lo.v, MPFR_RNDU);
  return {mpfr_to_q(lo.v), mpfr_to_q(hi.v)};
}

}  // namespace

ConjugateExponents conjugate_exponents(const ParamSeq& params, std::size_t k, unsigned precision_bits) {
  if (!params.defined(k)) throw std::out_of_range("index " + std::to_string(k) + " beyond defined length");
  ConjugateExponents ce;
  Z m = params.m(k);
  Z A = Z(4) * params.n(k);
  ce.log = {A, m};
  if (m == A) {
    ce.q = {true, false, Q(1), Q(1)};
    ce.p = {false, true, Q(0), Q(0)};
    return ce;
  }
  auto [cm, u] = minimal_base(m);
  auto [cA, v] = minimal_base(A);
  if (cm == cA) {
    // log_A m = u / v
    Q q{Z(v), Z(u)};
    Q p{Z(v), Z(Z(v) - Z(u))};
    ce.q = {true, false, q, q};
    ce.p = {true, false, p, p};
    return ce;
  }
  unsigned prec = precision_bits;
  for (;;) {
    auto [lo, hi] = log_ratio_bracket(A, m, prec);
    if (!(lo <= 1 && 1 <= hi)) {
      ce.q = {false, false, lo, hi};
      // p = q/(q-1) is decreasing in q on each side of 1.
      ce.p = {false, false, hi / (hi - 1), lo / (lo - 1)};
      return ce;
    }
    prec *= 2;
    if (prec > 65536) throw std::runtime_error("cannot separate q_k from 1");
  }
}

std::optional<int> compare_q(const ParamSeq& params, std::size_t j1, std::size_t j2) {
  for (unsigned prec = 128; prec <= 8192; prec *= 2) {
    auto a = conjugate_exponents(params, j1, prec).q;
    auto b = conjugate_exponents(params, j2, prec).q;
    if (a.exact && b.exact) return a.lo < b.lo ? -1 : (a.lo > b.lo ? 1 : 0);
    if (a.hi < b.lo) return -1;
    if (b.hi < a.lo) return 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_q_non_increase(const ParamSeq& params, std::size_t len) {
  for (std::size_t j = 1; j < len; ++j) {
    auto c = compare_q(params, j, j + 1);
    if (!c || *c >= 0) return j;
  }
  return std::nullopt;
}

}  // namespace xius
