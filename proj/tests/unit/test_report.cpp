#include "xius/report.hpp"
#include "xius/suites.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace xius;

TEST(Report, JsonRoundTrip) {
  Report r;
  r.config = {{"suite", "x"}, {"seed", "3"}};
  Check c;
  c.anchor = "a.b";
  c.claim = "1/3 <= 1/2";
  c.status = Status::Inconclusive;
  c.value("lhs", Q(1, 3)).text("scope", "all, \"quoted\"");
  c.slack = "1/6";
  c.note = "why";
  r.sections.push_back({"s", {c}});
  auto text = emit_json(r);
  auto back = report_from_json(Json::parse(text));
  EXPECT_EQ(back, r);
  EXPECT_EQ(emit_json(back), text);
  EXPECT_EQ(exit_code(r, false), 0);
  EXPECT_EQ(exit_code(r, true), kExitInconclusive);
}

TEST(Report, EmptyReportIsValid) {
  Report r;
  auto j = Json::parse(emit_json(r));
  EXPECT_EQ(j["status"], "pass");
  EXPECT_TRUE(j["sections"].empty());
  EXPECT_EQ(emit_csv(r), "section,anchor,status,name,exact,decimal,decimal_flag,slack,note\n");
}

TEST(Report, CsvDecimalAndExactColumns) {
  Report r;
  Check c;
  c.anchor = "norm.W";
  c.status = Status::Pass;
  c.value("value", Q(1, 3)).value("half", Q(1, 2)).text("scope", "a,b");
  r.sections.push_back({"norm", {c}});
  auto csv = emit_csv(r);
  EXPECT_NE(csv.find("value,1/3,0.333333333333,approx"), std::string::npos);
  EXPECT_NE(csv.find("half,1/2,0.500000000000,exact"), std::string::npos);
  EXPECT_NE(csv.find("scope,\"a,b\",,text"), std::string::npos);
}

TEST(Report, FailWins) {
  Report r;
  Check a, b;
  a.status = Status::Inconclusive;
  b.status = Status::Fail;
  r.sections.push_back({"s", {a, b}});
  EXPECT_EQ(r.status(), Status::Fail);
  EXPECT_EQ(exit_code(r, false), kExitFail);
}

TEST(Json, VectorsAndTrees) {
  auto x = parse_finvec("3:-1/2,1:1");
  EXPECT_EQ(x, (FinVec{{1, Q(1)}, {3, Q(-1, 2)}}));
  EXPECT_EQ(finvec_from_json(to_json(x)), x);
  EXPECT_THROW(parse_finvec("0:1"), JsonFormatError);
  EXPECT_THROW(parse_finvec("1"), JsonFormatError);

  auto w = WFunctional::weighted(2, {WFunctional::leaf(1), WFunctional::leaf(3, -1)});
  EXPECT_EQ(wfunc_from_json(to_json(w)), w);
  auto f = KFunctional::even(2, {KFunctional::leaf(1), KFunctional::flat(4, {2, 3})});
  EXPECT_EQ(kfunc_from_json(to_json(f), nullptr), f);
  EXPECT_THROW(kfunc_from_json(Json{{"kind", "special"}, {"sequence", "none"}}, nullptr), JsonFormatError);
}

TEST(Json, ParamsRoundTrip) {
  for (auto name : {"toyA", "toyS", "toyD"}) {
    auto p = named_params(name);
    EXPECT_TRUE(params_from_json(to_json(p)) == p) << name;
  }
  EXPECT_THROW(load_params("no-such-file.json"), JsonFormatError);
}

TEST(Json, ParamsFromDataFiles) {
  for (auto name : {"toyA", "toyS", "toyD"}) {
    auto p = load_params(std::string(XIUS_DATA_DIR) + "/" + name + ".json");
    EXPECT_TRUE(p == named_params(name)) << name;
  }
}

TEST(Suites, ConfigErrorsBeforeWork) {
  RunConfig cfg;
  EXPECT_THROW(run_suite(cfg, "nope"), ConfigError);
  cfg.params_source = "toyA";
  EXPECT_THROW(run_suite(cfg, "uncond-transform"), ConfigError);
  EXPECT_THROW(run_suite(cfg, "sequences-audit"), ConfigError);
  EXPECT_THROW(parse_budget("instances=0"), ConfigError);
  EXPECT_THROW(parse_budget("colour=3"), ConfigError);
  EXPECT_EQ(parse_budget("instances=7,window=9").window, 9u);
}

TEST(Suites, NormOracleDeterministic) {
  RunConfig cfg;
  cfg.seed = 9;
  cfg.budget.random_vectors = 20;
  auto a = emit_json(run_suite(cfg, "norm-oracle"));
  auto b = emit_json(run_suite(cfg, "norm-oracle"));
  EXPECT_EQ(a, b);
  auto r = report_from_json(Json::parse(a));
  EXPECT_EQ(r.count(Status::Fail), 0u);
  cfg.seed = 10;
  EXPECT_NE(emit_json(run_suite(cfg, "norm-oracle")), a);
}

TEST(Suites, CorpusShape) {
  auto c = norm_corpus(1, 30);
  ASSERT_EQ(c.size(), 272u);
  for (std::size_t i = 0; i < 242; ++i) EXPECT_LE(c[i].size(), 5u);
  for (auto& x : c) {
    EXPECT_FALSE(x.is_zero());
    EXPECT_LE(x.size(), 6u);
  }
}

TEST(Rational, LeadingZerosAreDecimal) {
  EXPECT_EQ(parse_z("010"), Z(10));
  EXPECT_EQ(parse_z("-08"), Z(-8));
  EXPECT_EQ(parse_q("0.083328"), Q(83328, 1000000));
  EXPECT_EQ(parse_q("-0.05"), Q(-1, 20));
  EXPECT_EQ(parse_q("09/012"), Q(3, 4));
  EXPECT_THROW(parse_z("1e3"), std::invalid_argument);
}
