#include "xius/sigma.hpp"

#include <algorithm>

namespace xius {

std::string SigmaCoder::encode_pair(const FinVec& x, const FinVec& f) { return "x" + x.str() + "f" + f.str(); }

namespace {

Coord last_max(const FinVec& x, const FinVec& f) {
  Coord m = 0;
  if (!x.is_zero()) m = std::max(m, x.max_supp());
  if (!f.is_zero()) m = std::max(m, f.max_supp());
  return m;
}

// j with every entry of f equal to +-1/m_j, if any.
std::optional<std::size_t> flat_weight(const ParamSeq& params, const FinVec& f) {
  if (f.is_zero()) return std::nullopt;
  Q v = qabs(f.entries().front().second);
  for (auto& [c, q] : f.entries())
    if (qabs(q) != v) return std::nullopt;
  for (std::size_t j = 1; j < 64 && params.defined(j); ++j)
    if (Q(params.m(j)) * v == 1) return j;
  return std::nullopt;
}

}  // namespace

std::vector<std::size_t> SigmaCoder::assign(const std::vector<FinVec>& xs, const std::vector<FinVec>& fs) {
  if (xs.size() != fs.size()) throw std::invalid_argument("sigma: unequal numbers of vectors and functionals");
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::size_t> out;
  std::string key, parent;
  std::size_t prev = 0;
  if (!fs.empty() && !by_key_.count(encode_pair(xs[0], fs[0]))) {
    if (auto w = flat_weight(params_, fs[0])) {
      if (by_sigma_.count(*w))
        throw SigmaError("weight of the first functional equals an assigned value " + std::to_string(*w), Z(0));
      reserved_.insert(*w);
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    parent = key;
    key += (i ? "|" : "") + encode_pair(xs[i], fs[i]);
    auto it = by_key_.find(key);
    if (it != by_key_.end()) {
      prev = it->second.sigma;
      out.push_back(prev);
      continue;
    }
    Coord mr = last_max(xs[i], fs[i]);
    Z need = Z(mr) * Z(mr);
    std::size_t s = (prev / 2 + 1) * 2;
    for (;; s += 2) {
      if (!params_.defined(s))
        throw SigmaError("parameter sequence too short to satisfy the range bound: need m_sigma >= " + need.str() +
                             " at an even index above " + std::to_string(prev),
                         need);
      if (s > 4096)
        throw SigmaError("no admissible index up to 4096; need m_sigma >= " + need.str(), need);
      if (params_.m(s) >= need && !by_sigma_.count(s) && !reserved_.count(s)) break;
    }
    by_key_[key] = Entry{key, parent, s, mr};
    by_sigma_[s] = key;
    prev = s;
    out.push_back(s);
  }
  return out;
}

std::optional<std::size_t> SigmaCoder::lookup(const std::vector<FinVec>& xs, const std::vector<FinVec>& fs) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::string key;
  for (std::size_t i = 0; i < xs.size() && i < fs.size(); ++i) key += (i ? "|" : "") + encode_pair(xs[i], fs[i]);
  auto it = by_key_.find(key);
  if (it == by_key_.end()) return std::nullopt;
  return it->second.sigma;
}

std::vector<SigmaCoder::Entry> SigmaCoder::table() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Entry> out;
  for (auto& [k, e] : by_key_) out.push_back(e);
  return out;
}

std::size_t SigmaCoder::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return by_key_.size();
}

SigmaCoder::AuditResult SigmaCoder::audit() const {
  std::lock_guard<std::mutex> lock(mu_);
  AuditResult r;
  r.entries = by_key_.size();
  std::map<std::size_t, std::size_t> seen;
  for (auto& [k, e] : by_key_) {
    if (e.sigma % 2) r.problems.push_back("value " + std::to_string(e.sigma) + " is odd");
    if (reserved_.count(e.sigma))
      r.problems.push_back("value " + std::to_string(e.sigma) + " equals a first-functional weight");
    if (++seen[e.sigma] > 1) r.problems.push_back("value " + std::to_string(e.sigma) + " assigned twice");
    if (!e.parent.empty()) {
      auto p = by_key_.find(e.parent);
      if (p == by_key_.end())
        r.problems.push_back("prefix of an entry with value " + std::to_string(e.sigma) + " is missing");
      else if (!(p->second.sigma < e.sigma))
        r.problems.push_back("extension does not increase: " + std::to_string(p->second.sigma) + " -> " +
                             std::to_string(e.sigma));
    }
    Z need = Z(e.max_range) * Z(e.max_range);
    if (params_.m(e.sigma) < need)
      r.problems.push_back("range bound fails at value " + std::to_string(e.sigma));
  }
  if (by_sigma_.size() != by_key_.size()) r.problems.push_back("value index out of step with the table");
  r.ok = r.problems.empty();
  return r;
}

}  // namespace xius
