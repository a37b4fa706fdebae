#include "xius/instances.hpp"

#include <algorithm>
#include <set>

namespace xius {

std::size_t default_special_length(const ParamSeq& params) {
  for (std::size_t J = 3; J < 64 && params.defined(J); J += 2) {
    Z n = params.n(J);
    if (n % 2 != 0) continue;
    for (std::size_t j = 2; j < 64 && params.defined(j); j += 2)
      if (params.m(j) > n * n) return static_cast<std::size_t>(n);
  }
  throw std::invalid_argument("no admissible special sequence length for " + params.label());
}

namespace {

std::size_t even_index_for_length(const ParamSeq& params, std::size_t len) {
  for (std::size_t j = 2; j < 64 && params.defined(j); j += 2)
    if (params.m(j) > Z(len) * Z(len)) return j;
  throw std::invalid_argument("no even index with m_j > length^2");
}

std::vector<Coord> run(Coord from, std::size_t count) {
  std::vector<Coord> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(from + i);
  return out;
}

std::vector<FinVec> vectors_of(const std::vector<KFunctional>& fs, const ParamSeq& params) {
  std::vector<FinVec> out;
  for (auto& f : fs) out.push_back(f.to_vector(params));
  return out;
}

}  // namespace

std::shared_ptr<const SpecialSequence> build_random_special(SpecialRegistry& reg, Coord start, Rng& rng,
                                                            const std::string& id, std::size_t even_arity,
                                                            bool offset_room) {
  const ParamSeq& params = reg.params();
  std::size_t len = default_special_length(params);
  SpecialSequence phi;
  phi.id = id;
  phi.j1 = even_index_for_length(params, len);
  Coord c = start;
  auto push_flat = [&](std::size_t j) {
    std::size_t n = static_cast<std::size_t>(params.n(j));
    auto coords = run(c, n);
    phi.x.push_back(FinVec::flat(coords, Q(Z(1), Z(n))));
    phi.f.push_back(KFunctional::flat(j, coords));
    c += n + draw(rng, 2);
  };
  push_flat(phi.j1);
  for (std::size_t i = 1; i <= len / 2; ++i) {
    std::size_t s = reg.coder().assign(phi.x, vectors_of(phi.f, params)).back();
    std::size_t cap = std::min<std::size_t>(even_arity, static_cast<std::size_t>(params.n(s)));
    std::size_t d = 1 + draw(rng, cap);
    auto coords = run(c, d);
    std::vector<FinVec::Entry> xe;
    std::vector<KFunctional> leaves;
    for (Coord k : coords) {
      xe.emplace_back(k, Q(draw_sign(rng)) / Q(Z(d)));
      leaves.push_back(KFunctional::leaf(k, draw_sign(rng)));
    }
    phi.x.push_back(FinVec::from_entries(std::move(xe)));
    phi.f.push_back(KFunctional::even(s, std::move(leaves)));
    c += d + (offset_room ? static_cast<Coord>(params.n(s)) : draw(rng, 2));
    if (i < len / 2) push_flat(reg.coder().assign(phi.x, vectors_of(phi.f, params)).back());
  }
  return reg.add(std::move(phi));
}

KFunctional random_even_tree(const ParamSeq& params, Coord lo, Coord hi, std::size_t depth, Rng& rng) {
  if (lo > hi) throw std::invalid_argument("empty window");
  if (depth == 0 || hi == lo || draw(rng, 4) == 0) return KFunctional::leaf(lo + draw(rng, hi - lo + 1), draw_sign(rng));
  std::size_t J = 2 * (1 + draw(rng, 2));
  std::size_t width = static_cast<std::size_t>(hi - lo + 1);
  std::size_t a = 1 + draw(rng, std::min<std::size_t>({static_cast<std::size_t>(params.n(J)), 3, width}));
  std::set<Coord> cut_set;
  while (cut_set.size() + 1 < a) cut_set.insert(lo + draw(rng, hi - lo));  // cut after this coordinate
  std::vector<Coord> cuts(cut_set.begin(), cut_set.end());
  std::vector<KFunctional> kids;
  Coord from = lo;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    Coord to = i < cuts.size() ? cuts[i] : hi;
    kids.push_back(random_even_tree(params, from, to, depth - 1, rng));
    from = to + 1;
  }
  return KFunctional::even(J, std::move(kids));
}

KFunctional random_special_functional(const std::shared_ptr<const SpecialSequence>& phi, const ParamSeq& params,
                                      Rng& rng, const SpecialRegistry* registry) {
  std::vector<KFunctional> repl;
  std::vector<int> zs;
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    const KFunctional& orig = phi->f_at(2 * i);
    auto supp = orig.supp();
    std::size_t mode = draw(rng, 3);
    if (mode == 0) {
      repl.push_back(orig);
    } else if (mode == 1 || supp.size() < 2) {
      std::vector<KFunctional> leaves;
      for (Coord k : supp) leaves.push_back(KFunctional::leaf(k, draw_sign(rng)));
      repl.push_back(KFunctional::even(orig.index(), std::move(leaves)));
    } else {
      // first two coordinates grouped under weight m_2
      std::vector<KFunctional> kids;
      kids.push_back(KFunctional::even(2, {KFunctional::leaf(supp[0], draw_sign(rng)),
                                           KFunctional::leaf(supp[1], draw_sign(rng))}));
      for (std::size_t k = 2; k < supp.size(); ++k) kids.push_back(KFunctional::leaf(supp[k], draw_sign(rng)));
      repl.push_back(KFunctional::even(orig.index(), std::move(kids)));
    }
    zs.push_back(draw_sign(rng));
  }
  Coord lo = phi->x_at(1).min_supp();
  Coord hi = phi->x_at(phi->length()).max_supp();
  Interval E = Interval::all();
  if (draw(rng, 3) == 0) {
    Coord a = lo + draw(rng, hi - lo + 1);
    Coord b = a + draw(rng, hi - a + 1);
    E = Interval::of(a, b);
  }
  auto f = build_special_functional(phi, params, repl, E, draw_sign(rng), zs, registry);
  if (f.is_zero()) return build_special_functional(phi, params, repl, Interval::all(), 1, zs, registry);
  return f;
}

std::vector<FinVec> random_blocks(Coord hi, std::vector<Coord> cuts, std::size_t d, Rng& rng) {
  std::set<Coord> cs;
  for (Coord c : cuts)
    if (c >= 1 && c < hi) cs.insert(c);
  std::size_t guard = 0;
  while (cs.size() + 1 < d && ++guard < 1000) cs.insert(1 + draw(rng, hi - 1));
  static const Q values[] = {Q(1), Q(-1), Q(1, 2), Q(-1, 2), Q(1, 3), Q(-2, 3), Q(3, 4), Q(-1, 4)};
  std::vector<FinVec> out;
  Coord from = 1;
  std::vector<Coord> ends(cs.begin(), cs.end());
  ends.push_back(hi);
  for (Coord to : ends) {
    std::vector<FinVec::Entry> es;
    for (Coord c = from; c <= to; ++c)
      if (draw(rng, 10) < 8) es.emplace_back(c, values[draw(rng, 8)]);
    if (es.empty()) es.emplace_back(from + draw(rng, to - from + 1), values[draw(rng, 8)]);
    out.push_back(FinVec::from_entries(std::move(es)));
    from = to + 1;
  }
  return out;
}

namespace {

SignVector random_signs(std::size_t d, Rng& rng) {
  std::vector<int> s;
  bool all_plus = draw(rng, 8) == 0;
  for (std::size_t i = 0; i < d; ++i) s.push_back(all_plus ? 1 : draw_sign(rng));
  return SignVector(std::move(s));
}

// Cut points straddling couples: one inside each odd member (or between it and its partner).
std::vector<Coord> couple_cuts(const SpecialSequence& phi, Rng& rng) {
  std::vector<Coord> cuts;
  for (std::size_t i = 1; i <= phi.pairs(); ++i) {
    if (draw(rng, 3) == 0) continue;
    auto odd = phi.f_at(2 * i - 1).supp();
    auto ev = phi.f_at(2 * i).supp();
    Coord lo = odd.front(), hi = ev.front() - 1;  // a cut after c in [lo, hi] separates them
    cuts.push_back(lo + draw(rng, hi - lo + 1));
    if (draw(rng, 2) == 0) cuts.push_back(lo > 1 ? lo - 1 : lo);
  }
  return cuts;
}

}  // namespace

UncondInstance random_uncond_instance(const SpecialRegistry& reg, Rng& rng, std::size_t kind) {
  const ParamSeq& params = reg.params();
  auto seqs = reg.all();
  UncondInstance in;
  kind %= 4;
  if (kind == 0 || seqs.empty()) {
    Coord hi = 6 + draw(rng, 10);
    in.label = "even-tree";
    in.f = random_even_tree(params, 1, hi, 3, rng);
    in.xs = random_blocks(hi + 2, {}, 1 + draw(rng, 4), rng);
  } else {
    const auto& phi = seqs[draw(rng, seqs.size())];
    Coord hi = phi->x_at(phi->length()).max_supp() + 3;
    in.has_special = true;
    KFunctional s = random_special_functional(phi, params, rng, &reg);
    if (kind == 1) {
      in.label = "special";
      in.f = s;
    } else if (kind == 2) {
      in.label = "nested-special";
      std::vector<KFunctional> kids;
      Coord lo = s.range().lo, top = s.range().hi;
      if (lo > 1) kids.push_back(KFunctional::leaf(1 + draw(rng, lo - 1), draw_sign(rng)));
      kids.push_back(s);
      kids.push_back(KFunctional::leaf(top + 1 + draw(rng, 2), draw_sign(rng)));
      in.f = KFunctional::even(2, std::move(kids));
    } else {
      in.label = "special-straddling";
      in.f = s;
    }
    auto cuts = couple_cuts(*phi, rng);
    in.xs = random_blocks(hi, cuts, kind == 3 ? 4 + draw(rng, 3) : 2 + draw(rng, 4), rng);
  }
  in.signs = random_signs(in.xs.size(), rng);
  return in;
}

BasicInstance random_basic_instance(const SpecialRegistry& reg, Rng& rng, std::size_t kind, bool with_j0) {
  const ParamSeq& params = reg.params();
  auto seqs = reg.all();
  BasicInstance in;
  Coord hi;
  if (kind % 2 == 0 || seqs.empty()) {
    hi = 6 + draw(rng, 12);
    in.label = "even-tree";
    in.f = random_even_tree(params, 1, hi, 3, rng);
  } else {
    const auto& phi = seqs[draw(rng, seqs.size())];
    hi = phi->x_at(phi->length()).max_supp() + 2;
    in.label = "special";
    in.f = random_special_functional(phi, params, rng, &reg);
  }
  if (with_j0) in.j0 = 2 + 2 * draw(rng, 2);
  static const Q eps_choices[] = {Q(1, 8), Q(1, 4), Q(1, 32)};
  in.eps = with_j0 ? Q(1, 8) : eps_choices[draw(rng, 3)];
  std::size_t d = 2 + draw(rng, 5);
  for (auto& x : random_blocks(hi, {}, d, rng)) in.xs.push_back(x.scaled(Q(1) / x.norm_1()));
  std::size_t j = 1 + draw(rng, 3);
  for (std::size_t k = 0; k < in.xs.size(); ++k) {
    in.js.push_back(j);
    Q width(Z(in.xs[k].max_supp() - in.xs[k].min_supp() + 1));
    ++j;
    while (!(width < in.eps * Q(params.m(j)))) ++j;
    j += draw(rng, 2);
  }
  static const Q values[] = {Q(1), Q(-1), Q(1, 2), Q(-3, 4), Q(2), Q(0), Q(-1, 3), Q(5, 2)};
  for (std::size_t k = 0; k < in.xs.size(); ++k) in.bs.push_back(values[draw(rng, 8)]);
  return in;
}

}  // namespace xius
