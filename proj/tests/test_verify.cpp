#include "amms/amms.hpp"
#include "support/brute.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace amms;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return Rational(BigInt(p), BigInt(d)); }

}  // namespace

TEST(VerifyAllocation, TightExampleRatios) {
  const Instance inst = gen_paper_example();
  const std::vector<ItemSet> bundles = {ItemSet{2, 3, 4}, ItemSet{0, 1}, ItemSet{5, 6, 7}};
  VerificationReport r = verify_allocation(inst, bundles, q(9, 8));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.flexible_agent, std::optional<AgentId>(0));
  EXPECT_EQ(r.agents_within_mms, 2u);
  EXPECT_EQ(r.ratios[0], std::optional<Rational>(q(9, 8)));
  EXPECT_EQ(r.ratios[1], std::optional<Rational>(q(3, 4)));
  EXPECT_EQ(r.ratios[2], std::optional<Rational>(Rational(1)));
  EXPECT_EQ(r.proportional, (std::vector<bool>{false, true, true}));
  EXPECT_FALSE(verify_allocation(inst, bundles, Rational(1)).passed);
}

TEST(VerifyAllocation, TwoAgentsAboveFails) {
  const Instance inst(2, 2, {{Rational(1), Rational(1)}, {Rational(1), Rational(1)}});
  VerificationReport r = verify_allocation(inst, std::vector<ItemSet>{ItemSet{0, 1}, ItemSet{}}, Rational(2));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.ratios[0], std::optional<Rational>(Rational(2)));
  EXPECT_FALSE(verify_allocation(inst, std::vector<ItemSet>{ItemSet{0, 1}, ItemSet{}}, q(3, 2)).passed);
  const Instance three(3, 6, std::vector<std::vector<Rational>>(3, std::vector<Rational>(6, Rational(1))));
  VerificationReport bad = verify_allocation(three, std::vector<ItemSet>{ItemSet{0, 1, 2}, ItemSet{3, 4, 5}, ItemSet{}}, Rational(10));
  EXPECT_FALSE(bad.passed);
  EXPECT_FALSE(bad.flexible_agent.has_value());
  EXPECT_EQ(bad.reason, "2 agents exceed their MMS");
}

TEST(VerifyAllocation, ZeroMmsAgentWithZeroCost) {
  const Instance inst(2, 2, {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}});
  VerificationReport ok = verify_allocation(inst, std::vector<ItemSet>{ItemSet{0, 1}, ItemSet{}}, Rational(1));
  EXPECT_TRUE(ok.passed);
  EXPECT_EQ(ok.ratios[0], std::optional<Rational>(Rational(0)));
}

TEST(VerifyAllocation, RejectsMalformedInput) {
  const Instance inst = gen_paper_example();
  EXPECT_THROW(verify_allocation(inst, std::vector<ItemSet>{ItemSet::range(8)}, Rational(1)), InvalidArgument);
  EXPECT_THROW(verify_allocation(inst, std::vector<ItemSet>{ItemSet{0, 1}, ItemSet{1}, ItemSet{2, 3, 4, 5, 6, 7}}, Rational(1)), InvalidArgument);
  EXPECT_THROW(verify_allocation(inst, std::vector<ItemSet>{ItemSet{0}, ItemSet{1}, ItemSet{2}}, Rational(1)), InvalidArgument);
}

TEST(VerifyAllocation, AgreesWithDefinition) {
  std::mt19937_64 rng(89);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t m = rng() % 8;
    const Instance inst = gen_random(n, m, t % 2 ? CostModel::Uniform : CostModel::PaperLike, rng());
    std::vector<ItemSet> bundles(n);
    for (ItemId e = 0; e < m; ++e) bundles[rng() % n].insert(e);
    const Rational alpha(BigInt(static_cast<std::int64_t>(8 + rng() % 8)), BigInt(8));
    EXPECT_EQ(verify_allocation(inst, bundles, alpha).passed, brute::is_amms(inst, bundles, alpha));
  }
}

TEST(VerifyPartitionShape, OneRelaxedBundle) {
  const NormalizedInstance norm = normalize(gen_paper_example());
  const auto view = ReducedInstanceView::full(norm);
  // Agent 0 pays 9/8, 7/8 and 1.
  Partition p({ItemSet{0, 1, 2}, ItemSet{3, 5, 6}, ItemSet{4, 7}}, ItemSet::range(8));
  EXPECT_TRUE(verify_partition_shape(view, p, 0, q(9, 8)));
  EXPECT_FALSE(verify_partition_shape(view, p, 0, Rational(1)));
  EXPECT_TRUE(verify_partition_shape(view, norm.witness(2), 2, Rational(1)));
  // Agent 0 pays 9/8, 11/8 and 1/2.
  Partition two_heavy({ItemSet{0, 1, 2}, ItemSet{3, 4, 7}, ItemSet{5, 6}}, ItemSet::range(8));
  EXPECT_FALSE(verify_partition_shape(view, two_heavy, 0, Rational(2)));
}

TEST(NaiveMms, BudgetAndValues) {
  std::vector<Rational> costs = {Rational(3), Rational(3), Rational(2), Rational(2), Rational(2)};
  EXPECT_EQ(naive_mms_value(costs, ItemSet::range(5), 2), Rational(6));
  EXPECT_EQ(naive_mms_value(costs, ItemSet{}, 3), Rational(0));
  EXPECT_THROW(naive_mms_value(costs, ItemSet::range(5), 0), InvalidArgument);
  EXPECT_THROW(naive_mms_value(costs, ItemSet::range(5), 4, 100), BudgetExceeded);
}

TEST(BestAlpha, SmallCases) {
  EXPECT_EQ(brute_force_best_alpha(gen_paper_example()), Rational(1));
  const Instance two(2, 3, {{Rational(1), Rational(2), Rational(3)}, {Rational(3), Rational(2), Rational(1)}});
  EXPECT_EQ(brute_force_best_alpha(two), Rational(1));
  EXPECT_THROW(brute_force_best_alpha(gen_random(5, 12, CostModel::Uniform, 1)), BudgetExceeded);
}
