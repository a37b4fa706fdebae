#pragma once

#include "xius/kset.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace xius {

using Rng = std::mt19937_64;

// Uniform in [0, n).
inline std::uint64_t draw(Rng& rng, std::uint64_t n) { return n ? rng() % n : 0; }
inline int draw_sign(Rng& rng) { return (rng() & 1) ? 1 : -1; }

// Smallest even length n_J (J odd >= 3) for which some even j1 has m_{j1} > n_J^2.
std::size_t default_special_length(const ParamSeq& params);

// Builds and registers a special sequence starting at coordinate `start`: flat averages at the
// odd steps, short signed averages of at most `even_arity` coordinates at the even steps.
// With `offset_room` the n_sigma coordinates right after each even entry are left unused.
std::shared_ptr<const SpecialSequence> build_random_special(SpecialRegistry& reg, Coord start, Rng& rng,
                                                            const std::string& id, std::size_t even_arity = 3,
                                                            bool offset_room = false);

// Random element of K without special nodes, supported in [lo, hi].
KFunctional random_even_tree(const ParamSeq& params, Coord lo, Coord hi, std::size_t depth, Rng& rng);

// Element of K_phi with random replacements (same supports, random signs, sometimes grouped),
// random interval E meeting the support and random sign.
KFunctional random_special_functional(const std::shared_ptr<const SpecialSequence>& phi, const ParamSeq& params,
                                      Rng& rng, const SpecialRegistry* registry);

// Block sequence covering [1, hi] with cut points after the listed coordinates (and random ones
// up to d blocks). Entries are small signed rationals.
std::vector<FinVec> random_blocks(Coord hi, std::vector<Coord> cuts, std::size_t d, Rng& rng);

struct UncondInstance {
  std::string label;
  KFunctional f;
  std::vector<FinVec> xs;
  SignVector signs;
  bool has_special = false;
};

// Instance family for the sign-flip transform. `kind` cycles through: even tree, root special,
// special nested in an even node, special with straddling cuts.
UncondInstance random_uncond_instance(const SpecialRegistry& reg, Rng& rng, std::size_t kind);

struct BasicInstance {
  std::string label;
  KFunctional f;
  std::vector<FinVec> xs;  // ||x_k||_1 = C = 1
  std::vector<std::size_t> js;
  Q eps;
  std::vector<Q> bs;
  std::optional<std::size_t> j0;
};

// Instance family for the basic inequality: even trees or special functionals of the registry
// against l1-normalized blocks, indices j_k chosen just large enough for the support condition
// (sometimes one step more). With `with_j0` a weight index in {2, 4} is designated and
// eps >= 1/m_{j0}.
BasicInstance random_basic_instance(const SpecialRegistry& reg, Rng& rng, std::size_t kind, bool with_j0);

}  // namespace xius
