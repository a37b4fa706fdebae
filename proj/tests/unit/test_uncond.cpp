#include "xius/instances.hpp"
#include "xius/norm.hpp"
#include "xius/uncond.hpp"

#include <gtest/gtest.h>

using namespace xius;

namespace {

FinVec span(Coord from, Coord to, const Q& v = Q(1)) {
  std::vector<FinVec::Entry> es;
  for (Coord c = from; c <= to; ++c) es.emplace_back(c, v);
  return FinVec::from_entries(es);
}

}  // namespace

TEST(SignFlip, TwoLeavesNoSpecial) {
  auto p = named_params("toyA");
  auto f = KFunctional::flat(2, {1, 2});
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec::basis(2)};
  auto r = sign_flip_transform(f, xs, SignVector::parse("+-"), p);
  EXPECT_EQ(r.g, KFunctional::even(2, {KFunctional::leaf(1), KFunctional::leaf(2, -1)}));
  ASSERT_EQ(r.equalities.size(), 2u);
  EXPECT_EQ(r.equalities[0].lhs, Q(1, 4));
  EXPECT_EQ(r.equalities[1].rhs, Q(1, 4));
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.couples_f.empty());
}

TEST(SignFlip, AllPlusIsIdentity) {
  auto p = named_params("toyA");
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    auto f = random_even_tree(p, 1, 12, 3, rng);
    auto xs = random_blocks(14, {}, 1 + i % 4, rng);
    auto r = sign_flip_transform(f, xs, SignVector::all_plus(xs.size()), p);
    EXPECT_EQ(r.g, f) << f.str();
  }
}

class CoupleFixture : public ::testing::Test {
 protected:
  ParamSeq p = named_params("toyS");
  SigmaCoder coder{p};
  SpecialRegistry reg{coder};
  Rng rng{11};
  std::shared_ptr<const SpecialSequence> phi;
  KFunctional f;
  void SetUp() override {
    phi = build_random_special(reg, 1, rng, "a");
    f = canonical_special(phi->J, phi, p);
  }
  Coord hi() const { return phi->x_at(phi->length()).max_supp(); }
};

TEST_F(CoupleFixture, StraddlingPairIsIndexed) {
  Coord cut = phi->f_at(1).supp()[2];  // x_1 ends inside f_1
  std::vector<FinVec> xs = {span(1, cut), span(cut + 1, hi())};
  auto t = AnalysisTree::build(f);
  auto idx = index_depended_couples(t, xs);
  EXPECT_EQ(idx.addresses(t, 1), std::vector<std::string>{"0.0"});
  EXPECT_TRUE(idx.addresses(t, 2).empty());
  EXPECT_FALSE(idx.invariant_problem(t).has_value());
  auto ys = project_y(xs, t, idx);
  EXPECT_EQ(ys[0], span(1, cut));
  EXPECT_EQ(ys[1], xs[1].restrict_to(phi->f_at(1).supp()));
}

TEST_F(CoupleFixture, NoWindowNoCouples) {
  Coord cut = phi->f_at(2).range().hi;
  std::vector<FinVec> xs = {span(1, cut), span(cut + 1, hi())};
  auto t = AnalysisTree::build(f);
  auto idx = index_depended_couples(t, xs);
  EXPECT_TRUE(idx.all.empty());
  for (auto& y : project_y(xs, t, idx)) EXPECT_TRUE(y.is_zero());
}

TEST_F(CoupleFixture, NonBlockRejected) {
  auto t = AnalysisTree::build(f);
  EXPECT_THROW(index_depended_couples(t, {span(1, 5), span(5, 8)}), NotBlockSequence);
}

TEST_F(CoupleFixture, TransformKeepsOddMembers) {
  Coord cut = phi->f_at(1).supp()[2];
  std::vector<FinVec> xs = {span(1, cut), span(cut + 1, hi())};
  auto r = sign_flip_transform(f, xs, SignVector::parse("-+"), p, &reg);
  ASSERT_TRUE(r.ok());
  ASSERT_TRUE(r.g.is_special());
  EXPECT_EQ(r.g.phi(), phi);
  // second block carries sign +, so the whole functional is unchanged
  EXPECT_EQ(r.g, f);
  auto r2 = sign_flip_transform(f, xs, SignVector::parse("+-"), p, &reg);
  ASSERT_TRUE(r2.ok());
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    Q v = r2.g.replacements()[i - 1].eval(p, phi->x_at(2 * i));
    if (v != 0) EXPECT_EQ(r2.g.lambdas()[i - 1], v * Q(p.m(phi->even_sigma(i))));
  }
  // direct evaluation of both sides of the per-block identity
  auto t = AnalysisTree::build(f);
  auto ys = project_y(xs, t, index_depended_couples(t, xs));
  Q lhs = f.to_vector(p).dot(xs[1] - ys[1]);
  Q rhs = r2.g.to_vector(p).dot((xs[1] - ys[1]).scaled(Q(-1)));
  EXPECT_EQ(lhs, rhs);
}

TEST_F(CoupleFixture, RandomInstancesSound) {
  for (int i = 0; i < 3; ++i) build_random_special(reg, 80 + 60 * i, rng, "b" + std::to_string(i));
  int with_couples = 0, gaps = 0, done = 0;
  for (std::size_t n = 0; n < 240; ++n) {
    auto in = random_uncond_instance(reg, rng, n);
    ASSERT_TRUE(verify_tree(in.f, p, &reg).ok()) << in.f.str();
    TransformReport r;
    try {
      r = sign_flip_transform(in.f, in.xs, in.signs, p, &reg);
    } catch (const TransformGap&) {
      ++gaps;
      continue;
    }
    ++done;
    for (auto& e : r.equalities) EXPECT_EQ(e.lhs, e.rhs) << in.f.str();
    EXPECT_TRUE(r.supports_match) << in.f.str();
    EXPECT_TRUE(r.index_match) << in.f.str();
    EXPECT_FALSE(r.g_violation.has_value()) << r.g_violation->str() << " " << r.g.str();
    auto t = AnalysisTree::build(in.f);
    auto idx = index_depended_couples(t, in.xs);
    EXPECT_FALSE(idx.invariant_problem(t).has_value());
    if (!idx.all.empty()) ++with_couples;
    // applying the transform again with the same signs restores f off the couples
    auto r2 = sign_flip_transform(r.g, in.xs, in.signs, p, &reg);
    auto ys = project_y(in.xs, t, idx);
    for (std::size_t k = 0; k < in.xs.size(); ++k) {
      FinVec z = in.xs[k] - ys[k];
      EXPECT_EQ(r2.g.eval(p, z), in.f.eval(p, z));
    }
  }
  EXPECT_GE(with_couples, 20);
  EXPECT_GE(done, 200);
  RecordProperty("gaps", gaps);
}

TEST(SmallProjection, ZeroProjection) {
  auto p = named_params("toyA");
  auto f = KFunctional::flat(2, {1, 2});
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec::basis(2)};
  auto cs = check_small_projection(f, xs, {Q(1), Q(1)}, p);
  ASSERT_EQ(cs.size(), 2u);
  for (auto& c : cs) EXPECT_EQ(c.status, Status::Pass);
}

TEST_F(CoupleFixture, SmallProjectionAtBoundary) {
  Coord cut = phi->f_at(1).supp()[2];
  std::vector<FinVec> xs = {span(1, cut, Q(1, 8)), span(cut + 1, hi(), Q(1, 8))};
  std::vector<Q> sig = {norm_tildeK(xs[0], p), norm_tildeK(xs[1], p)};
  auto cs = check_small_projection(f, xs, sig, p);
  for (auto& c : cs) EXPECT_EQ(c.status, Status::Pass) << c.claim;
  auto low = check_small_projection(f, xs, {Q(0), Q(0)}, p);
  for (auto& c : low) EXPECT_EQ(c.status, Status::Inconclusive);
}

TEST(Certificate, TwoVectorChain) {
  auto p = named_params("toyA");
  auto f = KFunctional::flat(2, {1, 2});
  std::vector<FinVec> xs = {FinVec::basis(1), FinVec::basis(2)};
  auto c = unconditionality_certificate(xs, {Q(1), Q(1)}, SignVector::parse("+-"), f, {Q(1), Q(1)}, p);
  EXPECT_EQ(c.f_value, Q(1, 2));
  EXPECT_EQ(c.g_value, Q(1, 2));
  EXPECT_EQ(c.f_terms, Q(0));
  EXPECT_NE(c.status(), Status::Fail);
}

TEST(Certificate, HypothesesHoldOnSpreadBlocks) {
  auto p = named_params("toyA");
  std::vector<FinVec> xs = {span(1, 64, Q(1, 64)), span(65, 128, Q(1, 64))};
  EXPECT_EQ(norm_tildeK(xs[0], p), Q(1, 32));
  std::vector<Coord> a, b;
  for (Coord c = 1; c <= 32; ++c) a.push_back(c);
  for (Coord c = 65; c <= 96; ++c) b.push_back(c);
  auto f = KFunctional::even(2, {KFunctional::flat(4, a), KFunctional::flat(4, b)});
  auto c = unconditionality_certificate(xs, {Q(1), Q(-1, 2)}, SignVector::parse("+-"), f, {Q(1, 32), Q(1, 32)}, p);
  EXPECT_EQ(c.status(), Status::Pass);
  EXPECT_EQ(c.sigma_sum, Q(1, 16));
  // the closing arithmetic: 3/4 - 4 * (1/8) = 1/4
  EXPECT_EQ(Q(3, 4) - Q(4) * Q(1, 8), Q(1, 4));
}
