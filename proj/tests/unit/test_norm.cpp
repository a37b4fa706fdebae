#include "xius/norm.hpp"

#include <gtest/gtest.h>

using namespace xius;

namespace {

FinVec ones(Coord from, Coord to, const Q& v = Q(1)) {
  std::vector<FinVec::Entry> es;
  for (Coord c = from; c <= to; ++c) es.emplace_back(c, v);
  return FinVec::from_entries(es);
}

}  // namespace

TEST(NormW, SingletonIsOne) {
  auto p = named_params("toyA");
  auto c = norm_W(FinVec::basis(5), p);
  EXPECT_EQ(c.value, Q(1));
  EXPECT_EQ(c.witness, WFunctional::leaf(5));
}

TEST(NormW, FlatFourIsTwo) {
  auto p = named_params("toyA");
  auto c = norm_W(ones(1, 4), p);
  EXPECT_EQ(c.value, Q(2));
  EXPECT_EQ(c.witness.eval(p, ones(1, 4)), Q(2));
  EXPECT_FALSE(verify_w(c.witness, p).has_value());
  EXPECT_EQ(norm_W(ones(1, 4, Q(1, 4)), p).value, Q(1, 2));
  EXPECT_EQ(norm_W_truncated(ones(1, 4), p, 1).value, Q(2));
}

TEST(NormW, TruncatedZeroIsSupNorm) {
  auto p = named_params("toyA");
  FinVec x{{1, Q(1, 3)}, {4, Q(-3, 4)}, {9, Q(1, 2)}};
  EXPECT_EQ(norm_W_truncated(x, p, 0).value, Q(3, 4));
}

TEST(NormW, TieBetweenLeafAndPair) {
  auto p = named_params("toyA");
  EXPECT_EQ(norm_W(ones(1, 2), p).value, Q(1));
  EXPECT_EQ(brute_force_norm(ones(1, 2), p), Q(1));
}

TEST(NormW, DpMatchesOracleBeyondArity) {
  auto p = named_params("toyA");
  for (Coord n = 1; n <= 12; ++n) {
    auto x = ones(1, n);
    EXPECT_EQ(norm_W(x, p).value, brute_force_norm(x, p)) << n;
  }
}

TEST(NormTildeK, ClosedForm) {
  auto p = named_params("toyA");
  EXPECT_EQ(norm_tildeK(FinVec::basis(7), p), Q(1));
  EXPECT_EQ(norm_tildeK(ones(1, 4), p), Q(1));
  EXPECT_EQ(norm_tildeK(ones(1, 8), p), Q(2));
}

TEST(LpBound, FlatVectorAtExactExponent) {
  auto p = toy({Z(4)}, {Z(8)});
  auto b = lp_upper_bound(ones(1, 32), p, 1);
  EXPECT_GE(b.bound, Q(8));
  EXPECT_LE(b.bound, Q(8) + Q(1, 1000000));
  EXPECT_LE(b.p_used, Q(5, 3));
  EXPECT_GT(b.p_used, Q(5, 3) - Q(1, 1000000));
  EXPECT_TRUE(b.p_exact);
}
