#include "xius/suites.hpp"

#include "xius/analysis.hpp"
#include "xius/instances.hpp"
#include "xius/ris.hpp"
#include "xius/uncond.hpp"

#include <map>
#include <set>
#include <sstream>

namespace xius {

namespace {

Check make(const std::string& anchor, const std::string& claim) {
  Check c;
  c.anchor = anchor;
  c.claim = claim;
  return c;
}

Q count_q(std::size_t n) { return Q(Z(n)); }

std::vector<FinVec> basis_run(Coord lo, Coord hi) {
  std::vector<FinVec> out;
  for (Coord c = lo; c <= hi; ++c) out.push_back(FinVec::basis(c));
  return out;
}

FinVec transform_entries(const FinVec& x, std::size_t mask, bool zero) {
  std::vector<FinVec::Entry> es;
  std::size_t i = 0;
  for (auto& [c, v] : x) {
    bool hit = (mask >> i++) & 1;
    if (hit && zero) continue;
    es.emplace_back(c, hit ? Q(-v) : v);
  }
  return FinVec::from_entries(std::move(es));
}

void ensure_specials(SpecialRegistry& reg, Rng& rng, std::size_t count) {
  for (std::size_t i = reg.all().size(); i < count; ++i)
    build_random_special(reg, i == 0 ? 1 : 80 + 60 * (i - 1), rng, "r" + std::to_string(i));
}

void require_random_specials(const ParamSeq& p) {
  std::size_t len = 0;
  try {
    len = default_special_length(p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (len > 8) throw ConfigError("special sequences of length " + std::to_string(len) + " are beyond desk scale");
  for (std::size_t j = 1; j <= 24 && p.defined(j); ++j)
    if (p.n(j) > Z(1 << 16))
      throw ConfigError("n_" + std::to_string(j) + " = " + to_string(p.n(j)) +
                        " grows too fast for random special sequences");
}

std::size_t depended_J(const ParamSeq& p) {
  for (std::size_t J = 3; J < 16 && p.defined(J); J += 2)
    if (p.n(J) % 2 == 0 && p.n(J) <= 8) return J;
  throw ConfigError("no odd J with n_J even and at most 8");
}

void require_depended(const ParamSeq& p) {
  depended_J(p);
  for (std::size_t j = 4; j <= 12 && p.defined(j); j += 2)
    if (!(p.m(j) < p.n(j) * p.n(j)))
      throw ConfigError("m_" + std::to_string(j) + " >= n_" + std::to_string(j) +
                        "^2 makes the even-step constant nonpositive");
}

}  // namespace

Budget parse_budget(const std::string& s, Budget b) {
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("budget item '" + item + "' is not key=value");
    std::string k = item.substr(0, eq);
    std::size_t v = 0;
    try {
      v = std::stoull(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("budget value in '" + item + "' is not a count");
    }
    if (v == 0) throw ConfigError("budget '" + k + "' must be positive");
    if (k == "instances") b.instances = v;
    else if (k == "random_vectors") b.random_vectors = v;
    else if (k == "enum_depth") b.enum_depth = v;
    else if (k == "dp_ceiling") b.dp_ceiling = v;
    else if (k == "window") b.window = v;
    else if (k == "samples") b.samples = v;
    else throw ConfigError("unknown budget key '" + k + "'");
  }
  return b;
}

std::vector<std::string> suite_names() { return {"norm-oracle", "uncond-transform", "basic-inequality", "sequences-audit"}; }

std::string default_params(const std::string& suite) {
  if (suite == "norm-oracle") return "toyA";
  if (suite == "sequences-audit") return "toyD";
  return "toyS";
}

Check aggregate(const std::string& anchor, const std::string& claim, const std::vector<Check>& cs) {
  Check a = make(anchor, claim);
  std::size_t pass = 0, fail = 0, inc = 0;
  for (auto& c : cs) {
    pass += c.passed();
    fail += c.failed();
    inc += c.status == Status::Inconclusive;
    if (c.failed() && a.note.empty()) a.note = "first failure: " + c.note;
  }
  a.value("pass", count_q(pass)).value("fail", count_q(fail)).value("inconclusive", count_q(inc));
  a.status = fail ? Status::Fail : pass ? Status::Pass : Status::Inconclusive;
  if (!fail && inc) a.note = std::to_string(inc) + " instances outside the verified hypotheses";
  return a;
}

std::vector<FinVec> norm_corpus(std::uint64_t seed, std::size_t random) {
  std::vector<FinVec> out;
  for (int code = 1; code < 243; ++code) {
    std::vector<FinVec::Entry> es;
    int c = code;
    for (Coord k = 1; k <= 5; ++k, c /= 3)
      if (c % 3) es.emplace_back(k, Q(c % 3 == 1 ? 1 : -1));
    out.push_back(FinVec::from_entries(std::move(es)));
  }
  Rng rng(seed);
  for (std::size_t r = 0; r < random; ++r) {
    std::size_t s = 1 + draw(rng, 6);
    std::set<Coord> cs;
    while (cs.size() < s) cs.insert(1 + draw(rng, 12));
    std::vector<FinVec::Entry> es;
    for (Coord c : cs) {
      std::int64_t num = 1 + static_cast<std::int64_t>(draw(rng, 9));
      std::int64_t den = 1 + static_cast<std::int64_t>(draw(rng, 6));
      es.emplace_back(c, Q(draw_sign(rng) * num) / Q(den));
    }
    out.push_back(FinVec::from_entries(std::move(es)));
  }
  return out;
}

ReportSection norm_oracle_section(const ParamSeq& p, std::uint64_t seed, const Budget& b) {
  ReportSection sec{"norm-oracle", {}};
  auto corpus = norm_corpus(seed, b.random_vectors);
  NormOptions opt;
  opt.dp_ceiling = b.dp_ceiling;
  Check ex = make("oracle.exhaustive", "norm_W = brute force on every nonzero {-1,0,1} vector on 5 coordinates");
  Check rn = make("oracle.random", "norm_W = brute force on seeded random rational vectors with support <= 6");
  Check wt = make("oracle.witness", "the DP witness lies in W and attains the value");
  std::size_t counts[2] = {0, 0}, bad[2] = {0, 0}, blown[2] = {0, 0}, wbad = 0;
  std::string first[2];
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    int part = i < 242 ? 0 : 1;
    const FinVec& x = corpus[i];
    auto cert = norm_W(x, p, opt);
    if (cert.witness.eval(p, x) != cert.value || verify_w(cert.witness, p)) ++wbad;
    ++counts[part];
    try {
      Q bf = brute_force_norm(x, p);
      if (bf != cert.value) {
        if (!bad[part]++) first[part] = x.str() + ": dp " + to_string(cert.value) + ", oracle " + to_string(bf);
      }
    } catch (const OracleExplosion&) {
      ++blown[part];
    }
  }
  Check* cs[2] = {&ex, &rn};
  for (int k = 0; k < 2; ++k) {
    cs[k]->value("vectors", count_q(counts[k])).value("mismatches", count_q(bad[k])).value("oracle over budget", count_q(blown[k]));
    cs[k]->status = bad[k] ? Status::Fail : blown[k] ? Status::Inconclusive : Status::Pass;
    cs[k]->note = first[k];
    sec.checks.push_back(*cs[k]);
  }
  wt.value("vectors", count_q(corpus.size())).value("bad witnesses", count_q(wbad));
  wt.status = wbad ? Status::Fail : Status::Pass;
  sec.checks.push_back(wt);
  return sec;
}

ReportSection norm_monotonicity_section(const ParamSeq& p, std::uint64_t seed, const Budget& b) {
  ReportSection sec{"monotonicity", {}};
  auto corpus = norm_corpus(seed, b.random_vectors);
  NormOptions opt;
  opt.dp_ceiling = b.dp_ceiling;
  struct Tally {
    std::size_t cases = 0, increases = 0, equal = 0;
    std::string first;
  };
  std::map<std::string, Tally> t;
  for (auto& x : corpus) {
    Q w = norm_W(x, p, opt).value, k = norm_tildeK(x, p);
    std::size_t masks = std::size_t(1) << x.size();
    for (std::size_t mask = 1; mask < masks; ++mask)
      for (bool zero : {false, true}) {
        FinVec y = transform_entries(x, mask, zero);
        Q wy = y.is_zero() ? Q(0) : norm_W(y, p, opt).value;
        Q ky = y.is_zero() ? Q(0) : norm_tildeK(y, p);
        std::string kind = zero ? "zeroing" : "signs";
        for (auto [name, before, after] : {std::tuple{"W", w, wy}, std::tuple{"tildeK", k, ky}}) {
          auto& e = t[std::string(name) + "." + kind];
          ++e.cases;
          e.equal += after == before;
          if (after > before && !e.increases++) e.first = x.str() + " -> " + y.str();
        }
      }
  }
  for (auto& [key, e] : t) {
    Check c = make("uncond." + key, (key.find("signs") != std::string::npos ? "sign flips" : "coordinate zeroing") +
                                        std::string(" never increase norm_") + key.substr(0, key.find('.')));
    c.value("cases", count_q(e.cases)).value("increases", count_q(e.increases)).value("unchanged", count_q(e.equal));
    c.status = e.increases ? Status::Fail : Status::Pass;
    c.note = e.first;
    sec.checks.push_back(c);
  }
  return sec;
}

ReportSection uncond_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg) {
  ReportSection sec{"uncond-transform", {}};
  Rng rng(seed);
  ensure_specials(reg, rng, 4);
  Check gen = make("uncond.generator", "every generated f passes verify_tree");
  Check ids = make("uncond.identities", "f(x_k - y_k) = g(eps_k (x_k - y_k)) for every k");
  Check sup = make("uncond.supports", "supp f_alpha = supp g_alpha on the analysis trees");
  Check cpl = make("uncond.couples", "F_{f,x_k} = F_{g,x_k}");
  Check mem = make("uncond.membership", "g passes verify_tree");
  for (Check* c : {&gen, &ids, &sup, &cpl, &mem}) c->status = Status::Pass;
  std::size_t done = 0, gaps = 0, with_couples = 0, specials = 0;
  for (std::size_t n = 0; n < b.instances; ++n) {
    auto in = random_uncond_instance(reg, rng, n);
    specials += in.has_special;
    if (!verify_tree(in.f, p, &reg).ok()) {
      gen.status = Status::Fail;
      gen.note = in.f.str();
      continue;
    }
    TransformReport r;
    try {
      r = sign_flip_transform(in.f, in.xs, in.signs, p, &reg);
    } catch (const TransformGap&) {
      ++gaps;
      continue;
    }
    ++done;
    auto fail = [&](Check& c) {
      if (!c.failed()) c.note = in.label + ": " + in.f.str();
      c.status = Status::Fail;
    };
    for (auto& e : r.equalities)
      if (!e.holds()) fail(ids);
    if (!r.supports_match) fail(sup);
    if (!r.index_match) fail(cpl);
    if (r.g_violation) fail(mem);
    auto t = AnalysisTree::build(in.f);
    if (!index_depended_couples(t, in.xs).all.empty()) ++with_couples;
  }
  for (Check* c : {&gen, &ids, &sup, &cpl, &mem}) {
    c->value("transformed", count_q(done));
    sec.checks.push_back(*c);
  }
  Check cov = make("uncond.coverage", "at least 100 transformed instances, at least 20 with depended couples");
  cov.value("instances", count_q(b.instances)).value("transformed", count_q(done)).value("with special nodes", count_q(specials))
      .value("with depended couples", count_q(with_couples)).value("outside the transform's scope", count_q(gaps));
  cov.status = done >= 100 && with_couples >= 20 ? Status::Pass : Status::Inconclusive;
  if (!cov.passed()) cov.note = "raise the instances budget";
  sec.checks.push_back(cov);
  return sec;
}

ReportSection basic_inequality_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg) {
  ReportSection sec{"basic-inequality", {}};
  Rng rng(seed);
  ensure_specials(reg, rng, 2);
  std::map<std::string, std::vector<Check>> by;
  std::size_t hyp = 0, with_j0 = 0, j0_hyp = 0, case2 = 0;
  for (std::size_t n = 0; n < b.instances; ++n) {
    auto in = random_basic_instance(reg, rng, n, n % 3 == 0);
    RISWitness ris;
    try {
      ris = build_ris(in.xs, in.js, Q(1), in.eps, p, {});
    } catch (const RISError& e) {
      Check c = make("bi.generator", "generated blocks form a R.I.S.");
      c.status = Status::Fail;
      c.note = in.label + ": " + e.what();
      by["bi.generator"].push_back(c);
      continue;
    }
    auto out = basic_inequality_transform(in.f, ris, in.bs, p, in.j0);
    bool master = false;
    for (auto c : out.checks) {
      if (c.failed()) c.note = in.label + ": " + in.f.str() + " " + c.note;
      if (c.anchor == "bi.master") master = c.passed();
      by[c.anchor].push_back(c);
    }
    hyp += master;
    if (in.j0) {
      ++with_j0;
      j0_hyp += master;
    }
    for (auto& t : out.trace) case2 += t.rule == "case2";
  }
  for (auto& [anchor, cs] : by) sec.checks.push_back(aggregate(anchor, cs.front().claim, cs));
  Check cov = make("bi.coverage", "at least 100 instances with the master inequality verified, at least 20 with j0");
  cov.value("instances", count_q(b.instances)).value("master verified", count_q(hyp)).value("with j0", count_q(with_j0))
      .value("with j0 and master verified", count_q(j0_hyp)).value("collapsed nodes", count_q(case2));
  cov.status = hyp >= 100 && j0_hyp >= 20 ? Status::Pass : Status::Inconclusive;
  if (!cov.passed()) cov.note = "raise the instances budget";
  sec.checks.push_back(cov);
  return sec;
}

ReportSection sequences_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg) {
  ReportSection sec{"sequences", {}};
  std::size_t J = depended_J(p);
  std::vector<Coord> M;
  for (Coord c = 1; c <= b.window; ++c) M.push_back(c);
  DependedSequence ds;
  try {
    ds = build_depended_sequence(reg, M, basis_run(1, b.window), J, "chi");
  } catch (const SequenceWindowError& e) {
    Check c = make("seq.window", "the coordinate window carries a depended sequence");
    c.status = Status::Inconclusive;
    c.note = e.what();
    sec.checks.push_back(c);
    return sec;
  }
  auto add = [&](const std::vector<Check>& cs) { sec.checks.insert(sec.checks.end(), cs.begin(), cs.end()); };
  add(verify_depended(ds, p));
  add(check_alternating_sum(ds, reg, seed, b.samples));
  add(distance_experiment(ds, p).checks);
  std::vector<std::vector<Coord>> free;
  for (auto& st : ds.even) free.push_back(st.free_coords);
  add(check_offset_average(ds.phi, offset_family(*ds.phi, p, free), reg, seed, b.samples));

  // the functionals of phi against a basis vector, j0 the next even index above every weight
  std::size_t j0 = 2;
  for (auto& f : ds.f) j0 = std::max(j0, f.index());
  j0 += j0 % 2 ? 1 : 2;
  auto canon = canonical_special(J, ds.phi, p);
  if (p.defined(j0))
    sec.checks.push_back(check_pd1_estimates(ds.f, canon.lambdas(), FinVec::basis(ds.x[0].min_supp()), J, j0, p, true));
  return sec;
}

ReportSection probe_section(const ParamSeq& p, const Budget& b, SpecialRegistry& reg) {
  ReportSection sec{"operator-probe", {}};
  std::map<Coord, FinVec> id, shift;
  for (Coord n = 1; n <= 64; ++n) id[n] = FinVec::basis(n, Q(Z(n % 3 + 1), Z(2)));
  for (Coord n = 1; n <= b.window; ++n) shift[n] = FinVec::basis(n + 1);
  auto diag = operator_probe(id, Q(1, 3), depended_J(p), reg, {}, "diagonal");
  for (auto c : diag.checks) {
    c.anchor = "probe.diagonal." + c.anchor.substr(c.anchor.find('.') + 1);
    sec.checks.push_back(c);
  }
  auto rec = operator_probe(shift, Q(1, 3), depended_J(p), reg, {}, "shift");
  sec.checks.insert(sec.checks.end(), rec.checks.begin(), rec.checks.end());
  return sec;
}

ReportSection sigma_section(const std::vector<const SpecialRegistry*>& regs) {
  ReportSection sec{"sigma", {}};
  Check au = make("sigma.audit", "the coding table is injective, monotone under extension and above the range bound");
  Check co = make("sigma.coincidences", "at most one weight coincidence past the first difference of two sequences");
  au.status = Status::Pass;
  co.status = Status::Pass;
  std::size_t entries = 0, pairs = 0;
  for (auto* r : regs) {
    auto a = r->coder().audit();
    entries += a.entries;
    if (!a.ok) {
      au.status = Status::Fail;
      for (auto& s : a.problems) au.note += (au.note.empty() ? "" : "; ") + s;
    }
    for (auto& c : r->weight_coincidences()) {
      ++pairs;
      if (c.weight_coincidences > 1) {
        co.status = Status::Fail;
        co.note = c.a + " / " + c.b;
      }
    }
  }
  au.value("registries", count_q(regs.size())).value("entries", count_q(entries));
  co.value("ordered pairs", count_q(pairs));
  sec.checks.push_back(au);
  sec.checks.push_back(co);
  return sec;
}

ReportSection norming_set_section(const ParamSeq& p, std::uint64_t seed, const Budget& b, SpecialRegistry& reg) {
  ReportSection sec{"norming-set", {}};
  EnumOptions opt;
  opt.depth = b.enum_depth;
  opt.special_budget = 16;
  auto db = enumerate_K(p, &reg, opt);
  Check ver = make("kset.verify", "every enumerated functional passes verify_tree");
  Check res = make("kset.restrict", "interval restrictions of enumerated functionals re-verify");
  Check br = make("kset.bracket", "lower <= upper for the K bracket, with a verified witness attaining lower");
  Check avg = make("kset.basis-average", "(1/m_j) sum e_i^* attains 1/m_j on the n_j basis average for each even j");
  for (Check* c : {&ver, &res, &br, &avg}) c->status = Status::Pass;
  std::size_t nres = 0;
  for (auto& f : db) {
    auto v = verify_tree(f, p, &reg);
    if (!v.ok()) {
      ver.status = Status::Fail;
      ver.note = f.str() + ": " + v.violation->str();
    }
    auto s = f.supp();
    std::vector<Coord> ends = s;
    if (ends.size() > 6) ends = {s[0], s[1], s[s.size() / 2], s[s.size() - 2], s.back()};
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t k = i; k < ends.size(); ++k) {
        ++nres;
        auto g = f.restrict(Interval::of(ends[i], ends[k]));
        if (g.is_zero()) continue;
        auto w = verify_tree(g, p, &reg);
        if (!w.ok()) {
          res.status = Status::Fail;
          res.note = g.str() + ": " + w.violation->str();
        }
      }
  }
  ver.value("functionals", count_q(db.size()));
  res.value("restrictions", count_q(nres));
  auto corpus = norm_corpus(seed, b.random_vectors / 4);
  for (auto& x : corpus) {
    auto k = norm_K_bracket(x, p, db);
    if (!(k.lower <= k.upper) || k.witness.eval(p, x) != k.lower || !verify_tree(k.witness, p, &reg).ok()) {
      br.status = Status::Fail;
      br.note = x.str();
    }
  }
  br.value("vectors", count_q(corpus.size()));
  std::size_t js = 0;
  for (std::size_t j = 2; j <= p.length() && p.n(j) <= Z(1 << 12); j += 2) {
    ++js;
    std::size_t n = static_cast<std::size_t>(p.n(j));
    std::vector<Coord> c;
    for (std::size_t i = 1; i <= n; ++i) c.push_back(i);
    auto a = FinVec::flat(c, Q(Z(1), Z(n)));
    auto w = KFunctional::flat(j, c);
    Q v = w.eval(p, a);
    avg.value("j = " + std::to_string(j), v);
    if (v != Q(Z(1), p.m(j)) || !verify_tree(w, p).ok() || !is_basis_average(a, p, j)) avg.status = Status::Fail;
  }
  if (!js) {
    avg.status = Status::Inconclusive;
    avg.note = "no even j with n_j <= 4096";
  }
  for (Check* c : {&ver, &res, &br, &avg}) sec.checks.push_back(*c);
  return sec;
}

Report run_suite(const RunConfig& cfg, const std::string& suite) {
  auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) throw ConfigError("unknown suite '" + suite + "'");
  std::string source = cfg.params_source.value_or(default_params(suite));
  ParamSeq p;
  try {
    p = load_params(source);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (suite == "uncond-transform" || suite == "basic-inequality") require_random_specials(p);
  if (suite == "sequences-audit") require_depended(p);

  Report r;
  const Budget& b = cfg.budget;
  r.config = {{"suite", suite},
              {"params", source},
              {"params label", p.label()},
              {"regime", regime_name(p.regime())},
              {"seed", std::to_string(cfg.seed)},
              {"instances", std::to_string(b.instances)},
              {"random_vectors", std::to_string(b.random_vectors)},
              {"enum_depth", std::to_string(b.enum_depth)},
              {"dp_ceiling", std::to_string(b.dp_ceiling)},
              {"window", std::to_string(b.window)},
              {"samples", std::to_string(b.samples)}};
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  if (suite == "norm-oracle") {
    r.sections.push_back(norm_oracle_section(p, cfg.seed, b));
    r.sections.push_back(norm_monotonicity_section(p, cfg.seed, b));
  } else if (suite == "uncond-transform") {
    r.sections.push_back(uncond_section(p, cfg.seed, b, reg));
    r.sections.push_back(sigma_section({&reg}));
  } else if (suite == "basic-inequality") {
    r.sections.push_back(basic_inequality_section(p, cfg.seed, b, reg));
    r.sections.push_back(sigma_section({&reg}));
  } else {
    SigmaCoder coder2(p);
    SpecialRegistry probe_reg(coder2);
    r.sections.push_back(sequences_section(p, cfg.seed, b, reg));
    r.sections.push_back(probe_section(p, b, probe_reg));
    r.sections.push_back(norming_set_section(p, cfg.seed, b, reg));
    r.sections.push_back(sigma_section({&reg, &probe_reg}));
  }
  return r;
}

}  // namespace xius
