// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include "xius/instances.hpp"
#include "xius/suites.hpp"

#include <chrono>
#include <iostream>
#include <map>

using namespace xius;

namespace {

// Pinned thresholds. Exact comparisons everywhere else.
constexpr double kOracleSeconds = 60.0;
constexpr std::size_t kMinInstances = 100;
constexpr std::size_t kMinSpecial = 20;
constexpr std::uint64_t kSeed = 1;

struct Tally {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

const Check* find(const ReportSection& s, const std::string& anchor) {
  for (auto& c : s.checks)
    if (c.anchor == anchor) return &c;
  return nullptr;
}

std::string value_of(const Check& c, const std::string& name) {
  for (auto& [k, v] : c.values)
    if (k == name) return v;
  return "";
}

std::size_t count_of(const Check& c, const std::string& name) {
  auto v = value_of(c, name);
  return v.empty() ? 0 : static_cast<std::size_t>(std::stoull(v));
}

void require_pass(Tally& t, const ReportSection& s, const std::string& anchor) {
  auto* c = find(s, anchor);
  t.require(c && c->passed(), anchor + (c ? " " + status_name(c->status) + " " + c->note : " missing"));
}

void require_no_fail_any(Tally& t, const ReportSection& s) {
  for (auto& c : s.checks) t.require(!c.failed(), c.anchor + " failed: " + c.note);
}

int report(int n, const std::string& name, const Tally& t, const std::string& summary) {
  std::cout << "CRITERION " << n << " " << (t.ok ? "PASS" : "FAIL") << "  " << name << "  [" << summary << "]";
  if (!t.ok) std::cout << "  " << t.detail;
  std::cout << std::endl;
  return t.ok ? 0 : 1;
}

}  // namespace

int main() {
  int failures = 0;
  Budget b;
  std::vector<std::string> toys = {"toyA", "toyS", "toyD"};

  // 1. norm oracle
  {
    Tally t;
    auto start = std::chrono::steady_clock::now();
    std::size_t vectors = 0;
    for (auto& name : toys) {
      auto s = norm_oracle_section(named_params(name), kSeed, b);
      for (auto a : {"oracle.exhaustive", "oracle.random", "oracle.witness"}) require_pass(t, s, a);
      vectors += count_of(*find(s, "oracle.exhaustive"), "vectors") + count_of(*find(s, "oracle.random"), "vectors");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.require(secs < kOracleSeconds, "runtime " + std::to_string(secs) + " s");
    failures += report(1, "norm_W = brute force (exact)", t,
                       std::to_string(vectors) + " vectors on toyA/toyS/toyD, " + std::to_string(int(secs)) + " s");
  }

  // 2. unconditionality of the auxiliary norms
  {
    Tally t;
    std::size_t cases = 0;
    for (auto& name : toys) {
      auto s = norm_monotonicity_section(named_params(name), kSeed, b);
      for (auto a : {"uncond.W.signs", "uncond.W.zeroing", "uncond.tildeK.signs", "uncond.tildeK.zeroing"}) {
        require_pass(t, s, a);
        if (auto* c = find(s, a)) cases += count_of(*c, "cases");
      }
    }
    failures += report(2, "sign flips and zeroing never increase norm_W, norm_tildeK", t,
                       std::to_string(cases) + " comparisons");
  }

  auto pS = named_params("toyS");
  SigmaCoder coder_u(pS), coder_b(pS);
  SpecialRegistry reg_u(coder_u), reg_b(coder_b);

  // 3. sign-flip transform
  {
    Tally t;
    auto s = uncond_section(pS, kSeed, b, reg_u);
    for (auto a : {"uncond.generator", "uncond.identities", "uncond.supports", "uncond.couples", "uncond.membership"})
      require_pass(t, s, a);
    auto* cov = find(s, "uncond.coverage");
    std::size_t done = cov ? count_of(*cov, "transformed") : 0, couples = cov ? count_of(*cov, "with depended couples") : 0;
    t.require(done >= kMinInstances, "transformed " + std::to_string(done));
    t.require(couples >= kMinSpecial, "with couples " + std::to_string(couples));
    failures += report(3, "sign-flip transform identities", t,
                       std::to_string(done) + " instances, " + std::to_string(couples) + " with depended couples");
  }

  // 4. basic inequality
  {
    Tally t;
    auto s = basic_inequality_section(pS, kSeed, b, reg_b);
    require_no_fail_any(t, s);
    for (auto a : {"bi.master", "bi.h1", "bi.j0-free", "bi.g2"}) {
      auto* c = find(s, a);
      t.require(c && !c->failed() && count_of(*c, "pass") > 0, std::string(a) + " not exercised");
    }
    auto* cov = find(s, "bi.coverage");
    std::size_t hyp = cov ? count_of(*cov, "master verified") : 0, j0 = cov ? count_of(*cov, "with j0 and master verified") : 0;
    t.require(hyp >= kMinInstances, "master verified " + std::to_string(hyp));
    t.require(j0 >= kMinSpecial, "with j0 " + std::to_string(j0));
    failures += report(4, "basic inequality transform", t,
                       std::to_string(hyp) + " instances verified, " + std::to_string(j0) + " with j0");
  }

  // 5, 6. depended sequences
  auto pD = named_params("toyD");
  SigmaCoder coder_d(pD), coder_d2(pD), coder_p(pD);
  SpecialRegistry reg_d(coder_d), reg_d2(coder_d2), reg_p(coder_p);
  ReportSection seq = sequences_section(pD, kSeed, b, reg_d);
  {
    Tally t;
    std::size_t built = 0;
    auto check = [&](const std::vector<Check>& cs, const std::string& tag) {
      ++built;
      ReportSection s{tag, cs};
      require_pass(t, s, "depest.A");
      require_pass(t, s, "depest.B");
      auto* B = find(s, "depest.B");
      if (B) t.require(!value_of(*B, "term 1").empty(), tag + ": no B term");
    };
    check(seq.checks, "window 1");
    {
      std::vector<Coord> M;
      std::vector<FinVec> ys;
      for (Coord k = 1; k <= b.window; ++k) {
        M.push_back(k);
        ys.push_back(FinVec::basis(k, Q(k % 2 ? 1 : -1)));
      }
      auto ds = build_depended_sequence(reg_d2, M, ys, 3, "chi-signed");
      check(check_alternating_sum(ds, reg_d2, kSeed + 1, b.samples), "signed blocks");
    }
    failures += report(5, "K_phi cancellation: A-terms = 0, B-terms = 1/n_J^2", t,
                       std::to_string(built) + " depended sequences on toyD");
  }
  {
    Tally t;
    for (auto a : {"pd.lambda", "pd.f(e)", "pd.f(y)"}) require_pass(t, seq, a);
    auto* d = find(seq, "pd.distance");
    t.require(d && !d->failed(), "pd.distance");
    std::string fy = find(seq, "pd.f(y)") ? value_of(*find(seq, "pd.f(y)"), "f(y)") : "?";
    std::string fe = find(seq, "pd.f(e)") ? value_of(*find(seq, "pd.f(e)"), "f(e)") : "?";
    failures += report(6, "distance chain lambda > 1/24, f(e) >= 1/48, f(y) >= 1/24", t,
                       "f(e) = " + fe + ", f(y) = " + fy + ", ||e - y|| " + (d ? status_name(d->status) : "?"));
  }

  probe_section(pD, b, reg_p);  // fills reg_p for the audit below

  // 7. sigma audit over every registry used above
  {
    Tally t;
    auto s = sigma_section({&reg_u, &reg_b, &reg_d, &reg_d2, &reg_p});
    require_pass(t, s, "sigma.audit");
    require_pass(t, s, "sigma.coincidences");
    failures += report(7, "sigma table injective and within the range bound", t,
                       value_of(*find(s, "sigma.audit"), "entries") + " assignments in 5 registries");
  }

  // 8. norming-set structural audit
  {
    Tally t;
    std::size_t fs = 0;
    SigmaCoder coder_k(pS);
    SpecialRegistry reg_k(coder_k);
    Rng rng(kSeed);
    build_random_special(reg_k, 1, rng, "k1");
    build_random_special(reg_k, 3, rng, "k2");
    std::vector<std::pair<std::string, ReportSection>> runs;
    runs.emplace_back("toyS", norming_set_section(pS, kSeed, b, reg_k));
    {
      auto pA = named_params("toyA");
      SigmaCoder ca(pA);
      SpecialRegistry ra(ca);
      runs.emplace_back("toyA", norming_set_section(pA, kSeed, b, ra));
    }
    runs.emplace_back("toyD", norming_set_section(pD, kSeed, b, reg_d));
    for (auto& [name, s] : runs) {
      for (auto a : {"kset.verify", "kset.restrict", "kset.bracket", "kset.basis-average"}) require_pass(t, s, a);
      if (auto* c = find(s, "kset.verify")) fs += count_of(*c, "functionals");
    }
    failures += report(8, "norming-set structural audit and basis-average witness", t,
                       std::to_string(fs) + " functionals on toyS/toyA/toyD");
  }

  // 9. determinism
  {
    Tally t;
    for (auto& suite : suite_names()) {
      RunConfig cfg;
      cfg.seed = kSeed;
      auto a = emit_json(run_suite(cfg, suite));
      auto c = emit_json(run_suite(cfg, suite));
      t.require(a == c, suite + " differs between runs");
    }
    failures += report(9, "byte-identical reports for a fixed seed", t, "4 suites run twice");
  }

  std::cout << (failures ? "ACCEPTANCE FAIL" : "ACCEPTANCE PASS") << " (" << 9 - failures << "/9)" << std::endl;
  return failures ? 1 : 0;
}
