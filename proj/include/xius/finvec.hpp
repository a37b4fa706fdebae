#pragma once

#include "xius/rational.hpp"

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace xius {

using Coord = std::uint64_t;

inline constexpr Coord kCoordMax = std::numeric_limits<Coord>::max();

// Closed interval [lo, hi] of positive integers; empty when lo > hi.
struct Interval {
  Coord lo = 1;
  Coord hi = 0;

  static Interval all() { return {1, kCoordMax}; }
  static Interval none() { return {1, 0}; }
  static Interval of(Coord a, Coord b) { return {a, b}; }

  bool empty() const { return lo > hi; }
  bool contains(Coord c) const { return !empty() && lo <= c && c <= hi; }
  bool contains(const Interval& o) const { return o.empty() || (!empty() && lo <= o.lo && o.hi <= hi); }
  bool meets(const Interval& o) const { return !empty() && !o.empty() && lo <= o.hi && o.lo <= hi; }
  Interval intersect(const Interval& o) const {
    if (empty() || o.empty()) return none();
    Interval r{std::max(lo, o.lo), std::min(hi, o.hi)};
    return r.empty() ? none() : r;
  }
  bool operator==(const Interval& o) const {
    return (empty() && o.empty()) || (lo == o.lo && hi == o.hi);
  }
  std::string str() const;
};

// Finitely supported rational sequence, stored sparse and sorted by coordinate.
class FinVec {
 public:
  using Entry = std::pair<Coord, Q>;

  FinVec() = default;
  FinVec(std::initializer_list<Entry> il);
  static FinVec from_entries(std::vector<Entry> entries);
  static FinVec basis(Coord c, const Q& v = Q(1));
  // (value) on each listed coordinate.
  static FinVec flat(const std::vector<Coord>& coords, const Q& value);

  const std::vector<Entry>& entries() const { return e_; }
  std::size_t size() const { return e_.size(); }
  bool is_zero() const { return e_.empty(); }
  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  Q at(Coord c) const;
  void set(Coord c, const Q& v);

  std::vector<Coord> supp() const;
  Interval range() const;
  Coord min_supp() const { return e_.front().first; }
  Coord max_supp() const { return e_.back().first; }

  FinVec restrict(const Interval& E) const;
  FinVec restrict_to(const std::vector<Coord>& sorted_coords) const;

  Q norm_inf() const;
  Q norm_1() const;
  Q dot(const FinVec& o) const;

  FinVec operator+(const FinVec& o) const;
  FinVec operator-(const FinVec& o) const;
  FinVec operator-() const;
  FinVec scaled(const Q& c) const;
  FinVec abs() const;

  bool operator==(const FinVec& o) const { return e_ == o.e_; }
  bool operator!=(const FinVec& o) const { return !(*this == o); }

  std::string str() const;

 private:
  std::vector<Entry> e_;
};

inline FinVec restrict(const FinVec& x, const Interval& E) { return x.restrict(E); }
inline FinVec operator*(const Q& c, const FinVec& x) { return x.scaled(c); }

// max supp x < min supp y (both nonzero).
inline bool precedes(const FinVec& x, const FinVec& y) {
  return !x.is_zero() && !y.is_zero() && x.max_supp() < y.min_supp();
}

// True iff xs is a block sequence: nonzero vectors with strictly increasing supports.
bool is_block_sequence(const std::vector<FinVec>& xs);

// Per-index signs, index 1..d.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<int> s);
  static SignVector parse(const std::string& pattern);  // "+-+"
  static SignVector all_plus(std::size_t d) { return SignVector(std::vector<int>(d, 1)); }

  std::size_t size() const { return s_.size(); }
  // 1-based; index 0 is the virtual +1.
  int operator()(std::size_t k) const;
  const std::vector<int>& raw() const { return s_; }
  std::string str() const;

 private:
  std::vector<int> s_;
};

}  // namespace xius
