#include "xius/instances.hpp"
#include "xius/norm.hpp"
#include "xius/ris.hpp"

#include <gtest/gtest.h>

using namespace xius;

namespace {

std::vector<KFunctional> small_db(const ParamSeq& p, Coord hi = 4) {
  EnumOptions opt;
  opt.window_hi = hi;
  return enumerate_K(p, nullptr, opt);
}

const Check& by_anchor(const std::vector<Check>& cs, const std::string& a) {
  for (auto& c : cs)
    if (c.anchor == a) return c;
  throw std::runtime_error("no check " + a);
}

}  // namespace

TEST(L1Average, TwoBasisVectors) {
  auto p = named_params("toyA");
  auto db = small_db(p);
  auto w = find_l1_average({FinVec::basis(1), FinVec::basis(2)}, 2, Q(2), p, db);
  ASSERT_TRUE(w.has_value());
  // (e_1 + e_2)/2 has norm exactly 1/2, so the witness is rescaled to e_1 + e_2
  EXPECT_TRUE(w->normalized);
  EXPECT_EQ(w->x, (FinVec{{1, Q(1)}, {2, Q(1)}}));
  EXPECT_EQ(w->part_norms[0].upper, Q(2));
  EXPECT_TRUE(verify_l1_average(*w).passed());
}

TEST(L1Average, NoneWithinWindow) {
  auto p = named_params("toyA");
  auto db = small_db(p);
  EXPECT_FALSE(find_l1_average({FinVec::basis(1), FinVec::basis(2)}, 2, Q(1), p, db).has_value());
  EXPECT_THROW(find_l1_average({FinVec::basis(1), FinVec::basis(2)}, 3, Q(2), p, db), L1SearchWindowError);
}

TEST(L1Average, LeftmostFirst) {
  auto p = named_params("toyA");
  auto db = small_db(p);
  std::vector<FinVec> ys = {FinVec::basis(1), FinVec::basis(2), FinVec::basis(3)};
  auto w = find_l1_average(ys, 2, Q(2), p, db);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->parts[0].supp(), std::vector<Coord>{1});
  EXPECT_EQ(w->parts[1].supp(), std::vector<Coord>{2});
}

TEST(SplitBound, PartBoundaryAndScan) {
  auto p = named_params("toyD");  // n_1 = 2
  auto db = small_db(p);
  auto w = find_l1_average({FinVec::basis(1), FinVec::basis(2)}, 2, Q(2), p, db);
  ASSERT_TRUE(w.has_value());
  auto c = check_split_bound(*w, {Interval::of(1, 1), Interval::of(2, 2)}, 1, p, db);
  EXPECT_EQ(c.status, Status::Pass);
  auto s = split_bound_scan(*w, 1, 2, p, db);
  EXPECT_EQ(s.status, Status::Pass);
  EXPECT_THROW(check_split_bound(*w, {Interval::of(2, 2), Interval::of(1, 1)}, 1, p, db), std::invalid_argument);
}

TEST(BuildRis, ConditionsAndErrors) {
  auto p = named_params("toyS");
  auto single = build_ris({FinVec{{1, Q(1, 2)}, {2, Q(1, 2)}}}, {1}, Q(1), Q(1, 8), p, {});
  EXPECT_TRUE(single.ok());
  EXPECT_EQ(single.scope, "all of K (l1 route)");
  std::vector<FinVec> xs = {FinVec{{1, Q(1, 2)}, {3, Q(1, 2)}}, FinVec::basis(5)};
  EXPECT_TRUE(build_ris(xs, {1, 3}, Q(1), Q(1, 8), p, {}).ok());  // 3 < 32/8
  try {
    build_ris(xs, {1, 2}, Q(1), Q(1, 8), p, {});  // 3 < 8/8 fails
    FAIL();
  } catch (const RISError& e) {
    EXPECT_EQ(e.index, 1u);
  }
  // above the l1 route condition (c) is audited; (1/8)(e_1^* + e_2^*) sees 1/4 > (3/2)/8
  auto db = small_db(p);
  EXPECT_THROW(build_ris({FinVec{{1, Q(1)}, {2, Q(1)}}}, {3}, Q(3, 2), Q(1, 8), p, db), RISError);
  auto w = build_ris({FinVec{{1, Q(1)}, {9, Q(1)}}}, {3}, Q(3, 2), Q(1, 8), p, db);
  EXPECT_TRUE(w.ok());
  EXPECT_NE(w.scope.find("audit"), std::string::npos);
}

TEST(BasicInequality, LeafRoot) {
  auto p = named_params("toyS");
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec{{2, Q(1, 2)}, {3, Q(-1, 2)}}};
  auto ris = build_ris(xs, {1, 3}, Q(1), Q(1, 8), p, {});
  auto out = basic_inequality_transform(KFunctional::leaf(3), ris, {Q(2), Q(-3)}, p);
  EXPECT_EQ(out.g1, FinVec::basis(2));
  EXPECT_TRUE(out.g2.is_zero());
  EXPECT_EQ(out.lhs, Q(3, 2));
  EXPECT_EQ(out.rhs, Q(3));
  EXPECT_EQ(out.status(), Status::Pass);
}

TEST(BasicInequality, FlatOverTwoBlocks) {
  auto p = named_params("toyS");
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec::basis(2)};
  auto ris = build_ris(xs, {3, 4}, Q(1), Q(1, 8), p, {});
  auto f = KFunctional::flat(2, {1, 2});
  auto out = basic_inequality_transform(f, ris, {Q(1), Q(-1, 2)}, p);
  ASSERT_TRUE(out.h1.has_value());
  EXPECT_EQ(*out.h1, WFunctional::weighted(2, {WFunctional::leaf(1), WFunctional::leaf(2)}));
  EXPECT_FALSE(out.head.has_value());
  EXPECT_EQ(out.rhs, Q(3, 16));
  EXPECT_EQ(out.status(), Status::Pass);
}

TEST(BasicInequality, StraddlingBlockBecomesHead) {
  auto p = named_params("toyS");
  auto ris = build_ris({FinVec{{1, Q(1, 2)}, {2, Q(1, 2)}}}, {1}, Q(1), Q(1, 8), p, {});
  auto out = basic_inequality_transform(KFunctional::flat(2, {1, 2}), ris, {Q(-2)}, p);
  EXPECT_EQ(out.head, std::optional<std::size_t>(1));
  EXPECT_EQ(out.trace[0].T1, std::vector<std::size_t>{1});
  EXPECT_EQ(out.g1, FinVec::basis(1));
  EXPECT_EQ(out.lhs, Q(1, 4));
  EXPECT_EQ(out.rhs, Q(2));
  EXPECT_EQ(out.status(), Status::Pass);
}

TEST(BasicInequality, WeightJ0Collapses) {
  auto p = named_params("toyS");
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec::basis(2), FinVec::basis(5)};
  auto ris = build_ris(xs, {2, 3, 4}, Q(1), Q(1, 8), p, {});
  auto f = KFunctional::even(4, {KFunctional::flat(2, {1, 2}), KFunctional::leaf(5, -1)});
  auto out = basic_inequality_transform(f, ris, {Q(1, 2), Q(-1), Q(1)}, p, 2);
  EXPECT_EQ(out.trace[1].rule, "case2");
  EXPECT_EQ(out.trace[1].head, std::optional<std::size_t>(2));
  EXPECT_EQ(out.g2, (FinVec{{1, Q(1, 8)}, {2, Q(1, 8)}}));
  ASSERT_TRUE(out.h1.has_value());
  EXPECT_EQ(*out.h1, WFunctional::weighted(4, {WFunctional::leaf(2), WFunctional::leaf(3)}));
  EXPECT_EQ(out.status(), Status::Pass);
  EXPECT_TRUE(by_anchor(out.checks, "bi.j0-free").passed());
}

TEST(BasicInequality, RandomInstances) {
  auto p = named_params("toyS");
  SigmaCoder coder(p);
  SpecialRegistry reg(coder);
  Rng rng(5);
  build_random_special(reg, 1, rng, "a");
  build_random_special(reg, 3, rng, "b");
  int hyp = 0, with_j0 = 0, case2 = 0;
  for (std::size_t n = 0; n < 160; ++n) {
    auto in = random_basic_instance(reg, rng, n, n % 3 == 0);
    auto ris = build_ris(in.xs, in.js, Q(1), in.eps, p, {});
    ASSERT_TRUE(ris.ok());
    auto out = basic_inequality_transform(in.f, ris, in.bs, p, in.j0);
    for (auto& c : out.checks) EXPECT_FALSE(c.failed()) << c.anchor << " " << c.note << " " << in.f.str();
    if (by_anchor(out.checks, "bi.hypotheses").passed()) {
      ++hyp;
      EXPECT_LE(out.lhs, out.rhs);
    }
    if (in.j0) ++with_j0;
    for (auto& t : out.trace) case2 += t.rule == "case2";
  }
  EXPECT_GE(hyp, 100);
  EXPECT_GE(with_j0, 20);
  EXPECT_GE(case2, 10);
}

TEST(RisEstimates, BasisAverageWitness) {
  auto p = named_params("toyA");
  std::vector<FinVec> xs;
  std::vector<KFunctional> units;
  std::vector<std::size_t> js;
  for (Coord c = 1; c <= 8; ++c) {
    xs.push_back(FinVec::basis(c));
    units.push_back(KFunctional::leaf(c));
    js.push_back(c + 3);
  }
  auto ris = build_ris(xs, js, Q(3), Q(1, 8), p, {});
  auto cs = ris_average_estimates(ris, 2, 3, p, {}, units);
  EXPECT_EQ(by_anchor(cs, "ris.estimate.3.lower").status, Status::Pass);
  EXPECT_EQ(by_anchor(cs, "ris.estimate.3.upper").status, Status::Pass);
  auto v1 = ris_average_estimates(ris, 2, 1, p, {KFunctional::leaf(1)});
  EXPECT_NE(v1[0].status, Status::Fail);
  EXPECT_EQ(parse_q(v1[0].slack), Q(3, 8) - Q(1, 8));
}
