#include "xius/instances.hpp"
#include "xius/kset.hpp"

#include <gtest/gtest.h>

using namespace xius;

TEST(Sigma, RangeSixteenOnToyA) {
  SigmaCoder coder(named_params("toyA"));
  auto s = coder.assign({FinVec::basis(16)}, {FinVec::basis(3)});
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], 8u);  // least even s with 2^s >= 256
  EXPECT_EQ(coder.assign({FinVec::basis(16)}, {FinVec::basis(3)}), s);
  auto t = coder.assign({FinVec::basis(2)}, {FinVec::basis(3)});
  EXPECT_EQ(t[0], 4u);  // 2^4 >= 9
  EXPECT_TRUE(coder.audit().ok);
}

TEST(Sigma, FirstWeightsAreKeptApart) {
  SigmaCoder coder(named_params("toyA"));
  // f_1 of weight m_8 blocks the value 8
  auto s = coder.assign({FinVec::basis(16)}, {FinVec::flat({1, 2}, Q(1, 256))});
  EXPECT_EQ(s[0], 10u);
  coder.assign({FinVec::basis(16)}, {FinVec::basis(3)});
  EXPECT_THROW(coder.assign({FinVec::basis(16)}, {FinVec::flat({1, 2}, Q(1, 1024))}), SigmaError);
  EXPECT_TRUE(coder.audit().ok);
}

TEST(KFunctional, FlatEval) {
  auto p = named_params("toyA");
  auto f = KFunctional::flat(2, {1, 2});
  EXPECT_EQ(f.eval(p, FinVec{{1, Q(3)}, {2, Q(-1)}}), Q(1, 2));
  EXPECT_EQ(f.to_vector(p), (FinVec{{1, Q(1, 4)}, {2, Q(1, 4)}}));
  EXPECT_EQ(f.negate().eval(p, FinVec::basis(1)), Q(-1, 4));
}

TEST(VerifyTree, ArityViolation) {
  auto p = named_params("toyA");
  std::vector<Coord> c;
  for (Coord i = 1; i <= 9; ++i) c.push_back(i);
  auto r = verify_tree(KFunctional::flat(2, c), p);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.violation->clause.find("arity"), std::string::npos);
  c.pop_back();
  EXPECT_TRUE(verify_tree(KFunctional::flat(2, c), p).ok());
}

TEST(VerifyTree, NotSuccessive) {
  auto p = named_params("toyA");
  auto f = KFunctional::even(2, {KFunctional::leaf(3), KFunctional::leaf(2)});
  EXPECT_FALSE(verify_tree(f, p).ok());
}

class SpecialFixture : public ::testing::Test {
 protected:
  ParamSeq p = named_params("toyS");
  SigmaCoder coder{p};
  SpecialRegistry reg{coder};
  Rng rng{7};
};

TEST_F(SpecialFixture, CanonicalSpecialVerifies) {
  auto phi = build_random_special(reg, 1, rng, "a");
  EXPECT_EQ(phi->length(), 4u);
  EXPECT_EQ(phi->J, 3u);
  EXPECT_EQ(phi->j1, 4u);
  auto f = canonical_special(phi->J, phi, p);
  ASSERT_TRUE(verify_tree(f, p, &reg).ok()) << verify_tree(f, p, &reg).violation->str();
  for (std::size_t i = 1; i <= phi->pairs(); ++i) {
    // lambda from the dot product of vectors, independent of the tree evaluation
    Q v = phi->f_at(2 * i).to_vector(p).dot(phi->x_at(2 * i)) * Q(p.m(phi->even_sigma(i)));
    Q expect = v != 0 ? v : Q(1, 16);
    EXPECT_EQ(f.lambdas()[i - 1], expect);
  }
  EXPECT_TRUE(coder.audit().ok);
}

TEST_F(SpecialFixture, LambdaViolation) {
  auto phi = build_random_special(reg, 1, rng, "a");
  auto f = canonical_special(phi->J, phi, p);
  auto lam = f.lambdas();
  lam[0] += Q(1, 1000);
  auto bad = KFunctional::special(phi->J, phi, Interval::all(), 1, f.replacements(), lam);
  auto r = verify_tree(bad, p, &reg);
  ASSERT_FALSE(r.ok());
  EXPECT_NE(r.violation->clause.find("lambda"), std::string::npos);
}

TEST_F(SpecialFixture, RestrictionStaysInK) {
  auto phi = build_random_special(reg, 1, rng, "a");
  auto f = canonical_special(phi->J, phi, p);
  auto s = f.supp();
  for (std::size_t a = 0; a < s.size(); a += 3)
    for (std::size_t b = a; b < s.size(); b += 4) {
      auto g = f.restrict(Interval::of(s[a], s[b]));
      EXPECT_TRUE(verify_tree(g, p, &reg).ok()) << g.str();
      EXPECT_EQ(g.to_vector(p), f.to_vector(p).restrict(Interval::of(s[a], s[b])));
    }
}

TEST_F(SpecialFixture, RegistryRejectsDuplicateId) {
  build_random_special(reg, 1, rng, "a");
  EXPECT_THROW(build_random_special(reg, 200, rng, "a"), SpecialSequenceError);
}

TEST_F(SpecialFixture, WeightCoincidencesAtMostOne) {
  for (int i = 0; i < 4; ++i) build_random_special(reg, 1 + 60 * i, rng, "s" + std::to_string(i));
  for (auto& c : reg.weight_coincidences()) EXPECT_LE(c.weight_coincidences, 1u) << c.a << " " << c.b;
}

TEST_F(SpecialFixture, EnumerationAndBracket) {
  build_random_special(reg, 1, rng, "a");
  EnumOptions opt;
  opt.special_budget = 16;
  auto db = enumerate_K(p, &reg, opt);
  ASSERT_FALSE(db.empty());
  for (auto& f : db) ASSERT_TRUE(verify_tree(f, p, &reg).ok()) << f.str();
  std::vector<FinVec> xs = {FinVec{{1, Q(1)}, {2, Q(-1, 2)}, {3, Q(1, 3)}},
                            FinVec{{1, Q(1, 5)}, {2, Q(1, 5)}, {3, Q(1, 5)}, {4, Q(1, 5)}, {5, Q(1, 5)}}};
  for (auto& x : xs) {
    auto b = norm_K_bracket(x, p, db);
    EXPECT_LE(b.lower, b.upper);
    EXPECT_EQ(b.witness.eval(p, x), b.lower);
    EXPECT_TRUE(verify_tree(b.witness, p, &reg).ok());
  }
}

TEST(BasisAverage, EvenWitnessAttainsLowerBound) {
  auto p = named_params("toyA");
  for (std::size_t j = 2; j <= 6; j += 2) {
    std::size_t n = static_cast<std::size_t>(p.n(j));
    std::vector<Coord> c;
    for (std::size_t i = 1; i <= n; ++i) c.push_back(i);
    auto avg = FinVec::flat(c, Q(Z(1), Z(n)));
    EXPECT_EQ(KFunctional::flat(j, c).eval(p, avg), Q(Z(1), p.m(j)));
  }
}
