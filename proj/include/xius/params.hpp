#pragma once

#include "xius/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace xius {

enum class Regime { PaperExact, Toy };

std::string regime_name(Regime r);
Regime parse_regime(const std::string& s);

struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Extension rule for toy sequences.
//   Power:  base^(a*j + b)
//   Linear: a*j + b
struct SeqRule {
  enum class Kind { Power, Linear };
  Kind kind = Kind::Power;
  std::int64_t base = 2;
  std::int64_t a = 1;
  std::int64_t b = 0;

  Z at(std::size_t j) const;
  std::string str() const;
  bool operator==(const SeqRule&) const = default;
};

struct ParamSpec {
  Regime regime = Regime::Toy;
  std::vector<Z> m;                 // explicit prefix, 1-based by position
  std::vector<Z> n;
  std::optional<SeqRule> m_rule;    // used past the explicit prefix
  std::optional<SeqRule> n_rule;
  std::size_t length = 0;           // verify at least this many terms
  std::string label;
};

// The sequences (m_j), (n_j); immutable once built.
class ParamSeq {
 public:
  Regime regime() const { return regime_; }
  const std::string& label() const { return label_; }

  // Number of terms verified at construction.
  std::size_t length() const { return length_; }
  // True when m_j, n_j exist for every j (a rule is present).
  bool unbounded() const { return m_rule_.has_value() && n_rule_.has_value(); }
  bool defined(std::size_t j) const { return j >= 1 && (unbounded() || j <= length_); }
  // Largest j for which m_j, n_j exist (SIZE_MAX when unbounded).
  std::size_t max_index() const;

  Z m(std::size_t j) const;
  Z n(std::size_t j) const;
  // PaperExact only: s_j with n_{j+1} = (4 n_j)^{s_j}.
  std::optional<std::uint64_t> s(std::size_t j) const;

  const std::vector<Z>& m_prefix() const { return m_; }
  const std::vector<Z>& n_prefix() const { return n_; }
  const std::vector<std::uint64_t>& s_values() const { return s_; }
  const std::optional<SeqRule>& m_rule() const { return m_rule_; }
  const std::optional<SeqRule>& n_rule() const { return n_rule_; }

  // Least index j >= from with m_j >= bound, if any within max_index (search capped at `cap`).
  std::optional<std::size_t> least_m_at_least(const Z& bound, std::size_t from = 1,
                                              std::size_t cap = 4096) const;

  bool operator==(const ParamSeq& o) const;

 private:
  friend ParamSeq make_param_seq(const ParamSpec& spec);
  Regime regime_ = Regime::Toy;
  std::string label_;
  std::vector<Z> m_, n_;
  std::vector<std::uint64_t> s_;
  std::optional<SeqRule> m_rule_, n_rule_;
  std::size_t length_ = 0;
};

// Validates every invariant up to spec.length; throws ParamError naming the violated condition.
ParamSeq make_param_seq(const ParamSpec& spec);

// m_1 = 2, m_{j+1} = m_j^5, n_1 = 4, n_{j+1} = (4 n_j)^{s_j}, s_j least with 2^{s_j} >= m_{j+1}^3.
// Lengths above 4 are refused: n_5 has about 3.3e9 bits.
ParamSeq paper_exact(std::size_t length);
inline constexpr std::size_t kPaperExactMaxLength = 4;

ParamSeq toy(std::vector<Z> m, std::vector<Z> n, std::string label = "toy");
ParamSeq toy_rule(SeqRule m, SeqRule n, std::size_t length, std::string label = "toy");

// Named toy sequences used across tests, suites and the CLI.
//   toyA: m_j = 2^j,      n_j = 2^(j+1)
//   toyS: m_j = 2^(2j-1), n_j = j + 1          (compact special sequences)
//   toyD: m_j = 2^(2j-1), n = 2,3,4 then 2^j   (n_j^2 >= 2 m_j from j = 4 on)
ParamSeq named_params(const std::string& name);
std::vector<std::string> named_param_list();

// log_base(arg) kept symbolically.
struct LogRatio {
  Z base;
  Z arg;
};

// A real number known either exactly (lo == hi, exact) or through a certified bracket.
struct RealBracket {
  bool exact = false;
  bool infinite = false;  // +infinity sentinel
  Q lo, hi;
  std::string str() const;
};

struct ConjugateExponents {
  LogRatio log;  // log_{4 n_k} m_k
  RealBracket q;  // 1 / log_{4n_k} m_k
  RealBracket p;  // 1 / (1 - log_{4n_k} m_k)
};

// q_k and p_k. Exact when m_k and 4 n_k are powers of a common integer,
// otherwise a bracket from directed rounding at `precision_bits`.
ConjugateExponents conjugate_exponents(const ParamSeq& params, std::size_t k,
                                       unsigned precision_bits = 256);

// Exact comparison of q_j and q_{j+1}: -1, 0, +1, or nullopt if brackets never separate.
std::optional<int> compare_q(const ParamSeq& params, std::size_t j1, std::size_t j2);

// q_1 < ... < q_len checked exactly; returns the first j with q_j >= q_{j+1}.
std::optional<std::size_t> first_q_non_increase(const ParamSeq& params, std::size_t len);

// a = c^u with c not a perfect power.
std::pair<Z, std::uint64_t> minimal_base(const Z& a);

}  // namespace xius
