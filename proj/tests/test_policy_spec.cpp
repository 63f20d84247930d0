#include <gtest/gtest.h>

#include "ocf/access_graph.hpp"
#include "ocf/policy_spec.hpp"

namespace ocf {
namespace {

TEST(PolicySpec, ParsesNamesNumbersAndNesting) {
  PolicySpec a = PolicySpec::Parse("bpexp");
  EXPECT_EQ(a.name, "bpexp");
  EXPECT_TRUE(a.numbers.empty());
  EXPECT_FALSE(a.sub);

  PolicySpec b = PolicySpec::Parse(" degree_power( -0.5 ) ");
  EXPECT_EQ(b.name, "degree_power");
  EXPECT_EQ(b.numbers, (std::vector<double>{-0.5}));

  PolicySpec c = PolicySpec::Parse("exploit_above_threshold(0.5, degree_power(0))");
  EXPECT_EQ(c.numbers, (std::vector<double>{0.5}));
  ASSERT_TRUE(c.sub);
  EXPECT_EQ(c.sub->name, "degree_power");

  PolicySpec d = PolicySpec::Parse("ulexp_f(2, 0.1)");
  EXPECT_EQ(d.numbers, (std::vector<double>{2.0, 0.1}));
}

TEST(PolicySpec, RoundTrips) {
  for (const char* text :
       {"bpexp", "idexp", "uniform_explore", "genie", "ulexp", "degree_power(-1.5)",
        "exploit_when_possible(uniform_explore)", "exploit_above_threshold(0.25, idexp)",
        "ulexp_f(3)", "ulexp_f(2, 0.1)", "exploit_when_possible(bpexp)"}) {
    PolicySpec s = PolicySpec::Parse(text);
    EXPECT_EQ(s.ToString(), text);
    EXPECT_EQ(PolicySpec::Parse(s.ToString()).ToString(), s.ToString());
  }
}

TEST(PolicySpec, RejectsMalformedText) {
  for (const char* text :
       {"", "nope", "bpexp(1)", "degree_power", "degree_power(x)", "degree_power(1", "bpexp)",
        "exploit_when_possible", "exploit_when_possible(genie)", "exploit_above_threshold(-1, idexp)",
        "ulexp_f(0)", "ulexp_f(1.5)", "ulexp_f(2, 0.5)", "exploit_when_possible(idexp, 1)",
        "degree_power(inf)"}) {
    EXPECT_THROW(PolicySpec::Parse(text), PolicySpecError) << text;
  }
}

TEST(PolicySpec, ErrorNamesColumn) {
  try {
    PolicySpec::Parse("degree_power(1 2)");
    FAIL();
  } catch (const PolicySpecError& e) {
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
}

TEST(PolicySpec, SettingCapabilities) {
  EXPECT_TRUE(PolicySpec::Parse("bpexp").finite_capable());
  EXPECT_FALSE(PolicySpec::Parse("bpexp").infinite_capable());
  EXPECT_FALSE(PolicySpec::Parse("ulexp").finite_capable());
  EXPECT_TRUE(PolicySpec::Parse("ulexp_f(2)").infinite_capable());
  EXPECT_TRUE(PolicySpec::Parse("genie").finite_capable());
  EXPECT_TRUE(PolicySpec::Parse("genie").infinite_capable());
  EXPECT_EQ(KnownPolicies().size(), 9u);
}

TEST(PolicySpec, MakersBuildFreshInstances) {
  AccessGraph g = HatGraph(3);
  FinitePolicyMaker maker = MakeFinitePolicyMaker(PolicySpec::Parse("bpexp"), g);
  auto p1 = maker();
  auto p2 = maker();
  EXPECT_NE(p1.get(), p2.get());
  EXPECT_THROW(MakeFinitePolicyMaker(PolicySpec::Parse("ulexp"), g), PolicySpecError);
  EXPECT_TRUE(MakeVisitPolicyMaker(PolicySpec::Parse("ulexp"))());
  EXPECT_THROW(MakeVisitPolicyMaker(PolicySpec::Parse("idexp")), PolicySpecError);
}

TEST(PolicySpec, AppliesInfiniteParameters) {
  InfiniteConfig cfg;
  ApplyPolicyParameters(PolicySpec::Parse("ulexp_f(3, 0.2)"), cfg);
  EXPECT_EQ(cfg.views_needed, 3u);
  EXPECT_DOUBLE_EQ(cfg.delta, 0.2);
  InfiniteConfig plain;
  plain.views_needed = 4;
  ApplyPolicyParameters(PolicySpec::Parse("ulexp"), plain);
  EXPECT_EQ(plain.views_needed, 4u);
}

}  // namespace
}  // namespace ocf
