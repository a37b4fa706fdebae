#pragma once

#include "xius/check.hpp"
#include "xius/kset.hpp"
#include "xius/ris.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace xius {

struct SequenceWindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Data of the even step 2i of a depended sequence.
struct EvenStep {
  std::size_t sigma = 0;  // j_{2i}
  Q c;                    // (1/6)(1 - m/n^2)
  std::vector<L1AverageWitness> parts;
  std::vector<KFunctional> part_functionals;  // f_l with f_l(x_l) >= (2/3)||x_l||
  RISWitness ris;
  FinVec x;           // x_{2i}
  FinVec y;           // decimal rounding of x_{2i}
  int decimals = 0;   // y has denominators dividing 10^decimals
  Q approx_upper;     // upper bracket of ||y - x||
  std::vector<Coord> free_coords;  // supp x_{2i} minus supp f_{2i}
};

struct DependedSequence {
  std::string id;
  std::size_t J = 0;            // n_J = length
  std::vector<FinVec> x;        // chi: x_1 .. x_n
  std::vector<KFunctional> f;   // f_1 .. f_n
  std::shared_ptr<const SpecialSequence> phi;  // same entries with y_{2i} at even places
  std::vector<EvenStep> even;   // pair i at index i-1
  std::size_t length() const { return x.size(); }
};

// Alternating construction: odd steps are basis averages over the next coordinates of M with the
// sigma-determined size, even steps are averages (c/n) sum x_l of normalized 2-l1^2 averages found
// in ys, with f_{2i} = (1/m) sum f_l and a decimal rounding y_{2i}. The associated special sequence
// is registered. Throws SequenceWindowError when M or ys run out.
DependedSequence build_depended_sequence(SpecialRegistry& reg, const std::vector<Coord>& M,
                                         const std::vector<FinVec>& ys, std::size_t J, const std::string& id);

// Re-verifies the three defining clauses and the step estimates from scratch.
std::vector<Check> verify_depended(const DependedSequence& ds, const ParamSeq& params);

// Smallest decimal rounding y of x with supp y = supp x and ||y - x|| upper bracket <= bound.
struct DecimalRounding {
  FinVec y;
  int decimals = 0;
  Q upper;
};
DecimalRounding decimal_rounding(const FinVec& x, const Q& bound, const ParamSeq& params, int max_decimals = 40);

// |sum_k lambda_{2k-1} h_{2k-1}(t) + h_{2k}(t)| against 1/n_J, with the hypotheses evaluated:
// n_J < m_{j_1} < ... < m_{j_2r}, 2r <= n_J, n_J^2 < m_{j_1}, m_{j0} outside the weights,
// n_J^2 < m_{j0}, and the basis-average prerequisites at j0. `strict` for the basis-vector target.
Check check_pd1_estimates(const std::vector<KFunctional>& hs, const std::vector<Q>& lambdas, const FinVec& target,
                          std::size_t J, std::size_t j0, const ParamSeq& params, bool strict);

// Cancellation identities on K_phi for the associated special sequence: the odd/even term
// difference vanishes when f'_{2i}(y_{2i}) != 0 and has modulus 1/n_J^2 otherwise; then the
// alternating average against the canonical, the cancelling and `samples` random functionals of K_phi.
std::vector<Check> check_alternating_sum(const DependedSequence& ds, const SpecialRegistry& reg,
                                         std::uint64_t seed, std::size_t samples = 24);

// f(avg) = 0 on K_phi for avg = (1/n_J) sum y_{2i}, y_{2i} = (m/n) sum e_{k_l} off supp f_{2i} and
// between f_{2i-1} and f_{2i+1}; foreign functionals of the registry audited against 8/m_J^3.
std::vector<Check> check_offset_average(const std::shared_ptr<const SpecialSequence>& phi,
                                        const std::vector<FinVec>& ys, const SpecialRegistry& reg,
                                        std::uint64_t seed, std::size_t samples = 24);

// y_{2i} = (m/n) sum of e_k over the listed coordinates (one list per pair).
std::vector<FinVec> offset_family(const SpecialSequence& phi, const ParamSeq& params,
                                  const std::vector<std::vector<Coord>>& coords);

struct ExperimentRecord {
  std::string id;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<Check> checks;
  Status status() const { return combine(checks); }
};

// Builds chi from M and ys, forms e and y and evaluates the canonical functional of the
// associated special sequence on them.
ExperimentRecord distance_experiment(SpecialRegistry& reg, const std::vector<Coord>& M,
                                     const std::vector<FinVec>& ys, std::size_t J, const std::string& id);
ExperimentRecord distance_experiment(const DependedSequence& ds, const ParamSeq& params);

// Columns T e_n on a window. Selects x_n^* with x^*(T e_n) >= delta, n outside its range and range
// inside I(e_n) from the database and signed leaves, builds the special sequence on T e_n and the
// vector x, and reports the lower bracket of ||T x|| against the upper bracket of ||x||.
ExperimentRecord operator_probe(const std::map<Coord, FinVec>& columns, const Q& delta, std::size_t J,
                                SpecialRegistry& reg, const std::vector<KFunctional>& database,
                                const std::string& id);

}  // namespace xius
