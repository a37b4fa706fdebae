#pragma once

#include "xius/finvec.hpp"
#include "xius/params.hpp"

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace xius {

struct SigmaError : std::runtime_error {
  SigmaError(const std::string& what, Z required) : std::runtime_error(what), required_m(std::move(required)) {}
  Z required_m;  // least m_sigma the range bound asks for
};

// Injective assignment of even indices to prefixes (x_1, f_1, ..., x_n, f_n), where each f_i is
// given as a vector. A new prefix gets the least unused index above the value of its parent
// prefix with m_sigma >= (max of the last ranges)^2. Values skip the weight of every flat first
// functional f_1 seen so far, and a new f_1 whose weight is already a value is rejected. Thread safe.
class SigmaCoder {
 public:
  struct Entry {
    std::string key;
    std::string parent;  // empty for length-1 prefixes
    std::size_t sigma = 0;
    Coord max_range = 0;
  };

  explicit SigmaCoder(ParamSeq params) : params_(std::move(params)) {}

  const ParamSeq& params() const { return params_; }

  // sigma of every prefix of (xs[0], fs[0], ..., xs[n-1], fs[n-1]); entry i is sigma(phi_{i+1}).
  std::vector<std::size_t> assign(const std::vector<FinVec>& xs, const std::vector<FinVec>& fs);

  // Already assigned value, if any.
  std::optional<std::size_t> lookup(const std::vector<FinVec>& xs, const std::vector<FinVec>& fs) const;

  std::vector<Entry> table() const;
  std::size_t size() const;

  struct AuditResult {
    bool ok = true;
    std::size_t entries = 0;
    std::vector<std::string> problems;
  };
  // Injectivity, extension monotonicity and the range bound over the whole table.
  AuditResult audit() const;

  static std::string encode_pair(const FinVec& x, const FinVec& f);

 private:
  ParamSeq params_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> by_key_;
  std::map<std::size_t, std::string> by_sigma_;
  std::set<std::size_t> reserved_;
};

}  // namespace xius
