#include "xius/finvec.hpp"

#include <algorithm>
#include <stdexcept>

namespace xius {

std::string Interval::str() const {
  if (empty()) return "[]";
  std::string h = hi == kCoordMax ? "inf" : std::to_string(hi);
  return "[" + std::to_string(lo) + "," + h + "]";
}

FinVec::FinVec(std::initializer_list<Entry> il) : FinVec(from_entries(std::vector<Entry>(il))) {}

FinVec FinVec::from_entries(std::vector<Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  FinVec r;
  for (auto& [c, v] : entries) {
    if (c == 0) throw std::invalid_argument("coordinates are positive integers");
    if (!r.e_.empty() && r.e_.back().first == c)
      r.e_.back().second += v;
    else
      r.e_.emplace_back(c, v);
  }
  std::erase_if(r.e_, [](const Entry& e) { return e.second == 0; });
  return r;
}

FinVec FinVec::basis(Coord c, const Q& v) { return from_entries({{c, v}}); }

FinVec FinVec::flat(const std::vector<Coord>& coords, const Q& value) {
  std::vector<Entry> es;
  es.reserve(coords.size());
  for (Coord c : coords) es.emplace_back(c, value);
  return from_entries(std::move(es));
}

Q FinVec::at(Coord c) const {
  auto it = std::lower_bound(e_.begin(), e_.end(), c,
                             [](const Entry& e, Coord k) { return e.first < k; });
  if (it != e_.end() && it->first == c) return it->second;
  return Q(0);
}

void FinVec::set(Coord c, const Q& v) {
  if (c == 0) throw std::invalid_argument("coordinates are positive integers");
  auto it = std::lower_bound(e_.begin(), e_.end(), c,
                             [](const Entry& e, Coord k) { return e.first < k; });
  if (it != e_.end() && it->first == c) {
    if (v == 0)
      e_.erase(it);
    else
      it->second = v;
  } else if (v != 0) {
    e_.insert(it, Entry{c, v});
  }
}

std::vector<Coord> FinVec::supp() const {
  std::vector<Coord> s;
  s.reserve(e_.size());
  for (auto& e : e_) s.push_back(e.first);
  return s;
}

Interval FinVec::range() const {
  if (e_.empty()) return Interval::none();
  return {e_.front().first, e_.back().first};
}

FinVec FinVec::restrict(const Interval& E) const {
  FinVec r;
  if (E.empty()) return r;
  auto lo = std::lower_bound(e_.begin(), e_.end(), E.lo,
                             [](const Entry& e, Coord k) { return e.first < k; });
  for (auto it = lo; it != e_.end() && it->first <= E.hi; ++it) r.e_.push_back(*it);
  return r;
}

FinVec FinVec::restrict_to(const std::vector<Coord>& sorted_coords) const {
  FinVec r;
  auto j = sorted_coords.begin();
  for (auto& e : e_) {
    while (j != sorted_coords.end() && *j < e.first) ++j;
    if (j == sorted_coords.end()) break;
    if (*j == e.first) r.e_.push_back(e);
  }
  return r;
}

Q FinVec::norm_inf() const {
  Q m = 0;
  for (auto& e : e_) m = std::max(m, qabs(e.second));
  return m;
}

Q FinVec::norm_1() const {
  Q s = 0;
  for (auto& e : e_) s += qabs(e.second);
  return s;
}

Q FinVec::dot(const FinVec& o) const {
  Q s = 0;
  auto i = e_.begin();
  auto j = o.e_.begin();
  while (i != e_.end() && j != o.e_.end()) {
    if (i->first < j->first)
      ++i;
    else if (j->first < i->first)
      ++j;
    else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

FinVec FinVec::operator+(const FinVec& o) const {
  FinVec r;
  r.e_.reserve(e_.size() + o.e_.size());
  auto i = e_.begin();
  auto j = o.e_.begin();
  while (i != e_.end() || j != o.e_.end()) {
    if (j == o.e_.end() || (i != e_.end() && i->first < j->first)) {
      r.e_.push_back(*i++);
    } else if (i == e_.end() || j->first < i->first) {
      r.e_.push_back(*j++);
    } else {
      Q v = i->second + j->second;
      if (v != 0) r.e_.emplace_back(i->first, v);
      ++i;
      ++j;
    }
  }
  return r;
}

FinVec FinVec::operator-() const {
  FinVec r = *this;
  for (auto& e : r.e_) e.second = -e.second;
  return r;
}

FinVec FinVec::operator-(const FinVec& o) const { return *this + (-o); }

FinVec FinVec::scaled(const Q& c) const {
  FinVec r;
  if (c == 0) return r;
  r.e_ = e_;
  for (auto& e : r.e_) e.second *= c;
  return r;
}

FinVec FinVec::abs() const {
  FinVec r = *this;
  for (auto& e : r.e_) e.second = qabs(e.second);
  return r;
}

std::string FinVec::str() const {
  std::string s = "{";
  bool first = true;
  for (auto& [c, v] : e_) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(c) + ":" + to_string(v);
  }
  return s + "}";
}

bool is_block_sequence(const std::vector<FinVec>& xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].is_zero()) return false;
    if (i > 0 && !precedes(xs[i - 1], xs[i])) return false;
  }
  return true;
}

SignVector::SignVector(std::vector<int> s) : s_(std::move(s)) {
  for (int v : s_)
    if (v != 1 && v != -1) throw std::invalid_argument("signs must be +1 or -1");
}

SignVector SignVector::parse(const std::string& pattern) {
  std::vector<int> s;
  for (char c : pattern) {
    if (c == '+')
      s.push_back(1);
    else if (c == '-')
      s.push_back(-1);
    else if (c != ' ' && c != ',')
      throw std::invalid_argument(std::string("bad sign character '") + c + "'");
  }
  return SignVector(std::move(s));
}

int SignVector::operator()(std::size_t k) const {
  if (k == 0) return 1;
  if (k > s_.size()) throw std::out_of_range("sign index " + std::to_string(k) + " not defined");
  return s_[k - 1];
}

std::string SignVector::str() const {
  std::string r;
  for (int v : s_) r += v > 0 ? '+' : '-';
  return r;
}

}  // namespace xius
