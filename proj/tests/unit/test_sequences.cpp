#include "xius/instances.hpp"
#include "xius/norm.hpp"
#include "xius/sequences.hpp"

#include <gtest/gtest.h>

using namespace xius;

namespace {

const Check& by_anchor(const std::vector<Check>& cs, const std::string& a) {
  for (auto& c : cs)
    if (c.anchor == a) return c;
  throw std::runtime_error("no check " + a);
}

std::vector<Coord> coords(Coord lo, Coord hi) {
  std::vector<Coord> out;
  for (Coord c = lo; c <= hi; ++c) out.push_back(c);
  return out;
}

std::vector<FinVec> basis_run(Coord lo, Coord hi) {
  std::vector<FinVec> out;
  for (Coord c = lo; c <= hi; ++c) out.push_back(FinVec::basis(c));
  return out;
}

// One depended sequence on toyD with J = 3 (length 4), shared by the tests below.
struct Built {
  ParamSeq p = named_params("toyD");
  SigmaCoder coder{p};
  SpecialRegistry reg{coder};
  DependedSequence ds;
  Built() { ds = build_depended_sequence(reg, coords(1, 3000), basis_run(1, 3000), 3, "chi"); }
};

Built& built() {
  static Built b;
  return b;
}

}  // namespace

TEST(DecimalRounding, SmallestPlaces) {
  auto p = named_params("toyA");
  auto r = decimal_rounding(FinVec{{1, Q(1, 3)}}, Q(1, 100), p);
  EXPECT_EQ(r.decimals, 2);
  EXPECT_EQ(r.y, (FinVec{{1, Q(33, 100)}}));
  // 1/2000 rounds to 0 at three places; the support must survive
  auto s = decimal_rounding(FinVec{{1, Q(-1, 2000)}}, Q(1, 1000), p);
  EXPECT_EQ(s.decimals, 4);
  EXPECT_EQ(s.y, (FinVec{{1, Q(-5, 10000)}}));
}

TEST(Pd1, EmptySumAndHypotheses) {
  auto p = named_params("toyS");  // n_3 = 4
  auto c = check_pd1_estimates({}, {}, FinVec::basis(1), 3, 6, p, true);
  EXPECT_EQ(parse_q(c.slack), Q(1, 4));
  EXPECT_NE(c.status, Status::Fail);
  // weight m_{j0} among the h's is rejected as a hypothesis failure, never as a failed bound
  std::vector<KFunctional> hs = {KFunctional::flat(6, {1, 2}), KFunctional::flat(8, {3})};
  auto d = check_pd1_estimates(hs, {Q(1)}, FinVec::basis(9), 3, 6, p, true);
  EXPECT_EQ(d.status, Status::Inconclusive);
  EXPECT_NE(d.note.find("m_{j0}"), std::string::npos);
  EXPECT_THROW(check_pd1_estimates(hs, {}, FinVec::basis(9), 3, 6, p, true), std::invalid_argument);
}

TEST(Pd1, DisjointTargetIsZero) {
  auto p = named_params("toyS");
  std::vector<KFunctional> hs = {KFunctional::flat(6, {1, 2}), KFunctional::flat(8, {3})};
  auto c = check_pd1_estimates(hs, {Q(1, 2)}, FinVec::basis(20), 3, 10, p, false);
  EXPECT_EQ(parse_q(c.slack), Q(1, 4));
}

TEST(DependedSequence, ClausesHold) {
  auto& b = built();
  const auto& p = b.p;
  ASSERT_EQ(b.ds.length(), 4u);
  EXPECT_EQ(b.ds.f[0].index(), 4u);  // least even j with m_j > n_3^2 = 16
  for (auto& st : b.ds.even) {
    EXPECT_EQ(st.sigma % 2, 0u);
    EXPECT_EQ(st.c, Q(1, 12));
    EXPECT_EQ(Z(st.parts.size()), p.n(st.sigma));
    EXPECT_EQ(st.free_coords.size(), st.parts.size());
  }
  auto cs = verify_depended(b.ds, p);
  for (auto& c : cs) {
    if (c.anchor == "seq.step-constant") {
      EXPECT_EQ(c.status, Status::Inconclusive);  // c = 1/12 < 1/8 on toyD
    } else {
      EXPECT_TRUE(c.passed()) << c.anchor << " " << c.note;
    }
  }
  // f_{2i}(x_{2i}) = c/m exactly
  Q m = Q(p.m(b.ds.even[0].sigma));
  EXPECT_EQ(b.ds.f[1].eval(p, b.ds.x[1]), Q(1, 12) / m);
  EXPECT_TRUE(b.reg.coder().audit().ok);
}

TEST(DependedSequence, CancellationIdentities) {
  auto& b = built();
  auto cs = check_alternating_sum(b.ds, b.reg, 3, 8);
  EXPECT_EQ(by_anchor(cs, "depest.A").status, Status::Pass);
  EXPECT_EQ(by_anchor(cs, "depest.B").status, Status::Pass);
  EXPECT_EQ(by_anchor(cs, "depest.composite").status, Status::Pass);
  EXPECT_NE(by_anchor(cs, "depest.composite.sampled").status, Status::Fail);
  EXPECT_NE(by_anchor(cs, "depest.norm").status, Status::Fail);
}

TEST(DependedSequence, DistanceChain) {
  auto& b = built();
  auto rec = distance_experiment(b.ds, b.p);
  EXPECT_EQ(by_anchor(rec.checks, "pd.lambda").status, Status::Pass);
  EXPECT_EQ(by_anchor(rec.checks, "pd.f(e)").status, Status::Pass);
  const auto& fy = by_anchor(rec.checks, "pd.f(y)");
  EXPECT_EQ(fy.status, Status::Pass);
  EXPECT_EQ(parse_q(fy.slack), Q(0));  // f(y) = 1/24 exactly
  EXPECT_NE(by_anchor(rec.checks, "pd.distance").status, Status::Fail);
}

TEST(DependedSequence, WindowErrors) {
  auto p = named_params("toyD");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  EXPECT_THROW(build_depended_sequence(reg, coords(1, 10), basis_run(1, 3000), 3, "short"), SequenceWindowError);
  EXPECT_THROW(build_depended_sequence(reg, coords(1, 3000), basis_run(1, 100), 3, "short"), SequenceWindowError);
  EXPECT_THROW(build_depended_sequence(reg, coords(1, 3000), basis_run(1, 3000), 4, "even"), std::invalid_argument);
}

TEST(OffsetAverage, AnnihilatedOnKphi) {
  auto p = named_params("toyS");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  Rng rng(11);
  auto phi = build_random_special(reg, 1, rng, "phi", 3, true);
  build_random_special(reg, 400, rng, "other");
  std::vector<std::vector<Coord>> cs;
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    Coord lo = phi->f_at(2 * i).range().hi + 1;
    cs.push_back(coords(lo, lo + static_cast<Coord>(p.n(phi->even_sigma(i))) - 1));
  }
  auto ys = offset_family(*phi, p, cs);
  auto out = check_offset_average(phi, ys, reg, 2, 12);
  EXPECT_EQ(by_anchor(out, "ld.annihilation").status, Status::Pass);
  EXPECT_NE(by_anchor(out, "ld.foreign").status, Status::Fail);
  EXPECT_NE(by_anchor(out, "ld.norm").status, Status::Fail);

  auto empty = check_offset_average(phi, {}, reg, 2, 12);
  EXPECT_EQ(empty[0].status, Status::Pass);

  // an offset on supp f_2 is rejected
  auto bad = cs;
  bad[0][0] = phi->f_at(2).supp().front();
  std::sort(bad[0].begin(), bad[0].end());
  EXPECT_THROW(check_offset_average(phi, offset_family(*phi, p, bad), reg, 2, 12), std::invalid_argument);
}

TEST(OperatorProbe, IdentityAndDiagonalHaveNothingToExploit) {
  auto p = named_params("toyD");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  std::map<Coord, FinVec> id, diag;
  for (Coord n = 1; n <= 64; ++n) {
    id[n] = FinVec::basis(n);
    diag[n] = FinVec::basis(n, Q(Z(n % 5 + 1), Z(3)));
  }
  for (auto* cols : {&id, &diag}) {
    auto rec = operator_probe(*cols, Q(1), 3, reg, {}, "probe");
    ASSERT_EQ(rec.checks.size(), 1u);
    EXPECT_EQ(rec.checks[0].status, Status::Pass);
    EXPECT_NE(rec.checks[0].note.find("no violation"), std::string::npos);
  }
}

TEST(OperatorProbe, ShiftSelectsAndReportsWindow) {
  auto p = named_params("toyD");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  std::map<Coord, FinVec> shift;
  for (Coord n = 1; n <= 200; ++n) shift[n] = FinVec::basis(n + 1);
  auto rec = operator_probe(shift, Q(1, 3), 3, reg, {}, "shift");
  EXPECT_EQ(by_anchor(rec.checks, "probe.dist").status, Status::Pass);
  EXPECT_EQ(by_anchor(rec.checks, "probe.selection").status, Status::Pass);
  EXPECT_EQ(by_anchor(rec.checks, "probe.window").status, Status::Inconclusive);
}

TEST(OperatorProbe, ShiftFullRun) {
  auto p = named_params("toyD");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  std::map<Coord, FinVec> shift;
  for (Coord n = 1; n <= 2800; ++n) shift[n] = FinVec::basis(n + 1);
  auto rec = operator_probe(shift, Q(1, 3), 3, reg, {}, "shift");
  for (auto& c : rec.checks) EXPECT_FALSE(c.failed()) << c.anchor << " " << c.note;
  EXPECT_EQ(by_anchor(rec.checks, "probe.special").status, Status::Pass);
  EXPECT_EQ(by_anchor(rec.checks, "probe.Tx").status, Status::Pass);
  EXPECT_EQ(by_anchor(rec.checks, "ld.annihilation").status, Status::Pass);
}

TEST(Registry, CoincidencesStayBelowTwo) {
  // toyD weights grow too fast for several random sequences; toyS keeps them small
  auto p = named_params("toyS");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  Rng rng(4);
  for (int k = 0; k < 4; ++k) build_random_special(reg, 1 + 300 * k, rng, "r" + std::to_string(k));
  auto cs = reg.weight_coincidences();
  EXPECT_EQ(cs.size(), 12u);  // ordered pairs
  for (auto& c : cs) EXPECT_LE(c.weight_coincidences, 1u) << c.a << " " << c.b;
  EXPECT_TRUE(coder.audit().ok);
}
