#include "amms/amms.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace amms;

namespace {

Rational q(std::int64_t p, std::int64_t d) { return Rational(BigInt(p), BigInt(d)); }

std::vector<Rational> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Rational> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

Instance repeated(std::size_t n, const std::vector<Rational>& row) {
  return Instance(n, row.size(), std::vector<std::vector<Rational>>(n, row));
}

}  // namespace

TEST(DivideAndChoose, SplitsByDividerPartition) {
  const NormalizedInstance norm = normalize(repeated(2, ints({4, 3, 3, 2})));
  DivideAndChoose dc = divide_and_choose(ReducedInstanceView::full(norm), ItemSet::range(4), 0, 1);
  // Both halves cost 6 to the chooser, who takes the first one.
  EXPECT_EQ(dc.chooser_bundle, (ItemSet{0, 3}));
  EXPECT_EQ(dc.divider_bundle, (ItemSet{1, 2}));
  EXPECT_EQ(bundle_cost(norm.base(), 1, dc.chooser_bundle), Rational(6));
}

TEST(DivideAndChoose, ChooserTakesEmptyHalf) {
  const NormalizedInstance norm = normalize(repeated(2, ints({5})));
  DivideAndChoose dc = divide_and_choose(ReducedInstanceView::full(norm), ItemSet{0}, 0, 1);
  EXPECT_TRUE(dc.chooser_bundle.empty());
  EXPECT_EQ(dc.divider_bundle, ItemSet{0});
}

TEST(DivideAndChoose, EqualItems) {
  const NormalizedInstance norm = normalize(repeated(2, ints({1, 1})));
  DivideAndChoose dc = divide_and_choose(ReducedInstanceView::full(norm), ItemSet::range(2), 1, 0);
  EXPECT_EQ(dc.divider_bundle.size(), 1u);
  EXPECT_EQ(dc.chooser_bundle.size(), 1u);
}

TEST(DivideAndChoose, BothWithinShareProperty) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 150; ++t) {
    const Instance inst = gen_random(2, rng() % 10, t % 2 ? CostModel::Uniform : CostModel::PaperLike, rng());
    const NormalizedInstance norm = normalize(inst);
    DivideAndChoose dc = divide_and_choose(ReducedInstanceView::full(norm), inst.items(), 0, 1);
    EXPECT_LE(bundle_cost(norm, 0, dc.divider_bundle), Rational(1));
    EXPECT_LE(bundle_cost(norm, 1, dc.chooser_bundle), bundle_cost(norm, 1, dc.divider_bundle));
    EXPECT_EQ(dc.divider_bundle | dc.chooser_bundle, inst.items());
  }
}

TEST(DivideAndChoose, RejectsAgentsOutsideView) {
  const NormalizedInstance norm = normalize(repeated(3, ints({1, 2, 3})));
  ReducedInstanceView view(norm, {0, 1}, ItemSet::range(3));
  EXPECT_THROW(divide_and_choose(view, ItemSet::range(3), 0, 2), InvalidArgument);
}

TEST(LoadBalancing, FiveEqualItemsIntoTwo) {
  const std::vector<Rational> costs(5, q(3, 8));
  Partition p = load_balancing(ItemSet::range(5), 2, costs);
  EXPECT_EQ(p[0], (ItemSet{0, 2, 4}));
  EXPECT_EQ(p[1], (ItemSet{1, 3}));
  EXPECT_EQ(sum_costs(costs, p[0]), q(9, 8));
  EXPECT_EQ(sum_costs(costs, p[1]), q(3, 4));
}

TEST(LoadBalancing, GreedyOrder) {
  const auto costs = ints({5, 4, 3, 3, 2});
  Partition p = load_balancing(ItemSet::range(5), 3, costs);
  EXPECT_EQ(p.bundles(), (std::vector<ItemSet>{ItemSet{0}, ItemSet{1, 4}, ItemSet{2, 3}}));
}

TEST(LoadBalancing, EmptyAndErrors) {
  const auto costs = ints({1});
  Partition p = load_balancing(ItemSet{}, 3, costs);
  EXPECT_EQ(p.size(), 3u);
  for (ItemSet b : p.bundles()) EXPECT_TRUE(b.empty());
  EXPECT_THROW(load_balancing(ItemSet{0}, 0, costs), InvalidArgument);
  EXPECT_THROW(load_balancing(ItemSet{3}, 2, costs), std::out_of_range);
}

TEST(LoadBalancing, SpreadAtMostLargestItem) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = rng() % 12;
    std::vector<Rational> costs;
    for (std::size_t e = 0; e < m; ++e) costs.emplace_back(static_cast<std::int64_t>(rng() % 50));
    const std::size_t k = rng() % 5 + 1;
    Partition p = load_balancing(ItemSet::range(m), k, costs);
    Rational lo = sum_costs(costs, p[0]);
    Rational hi = lo;
    Rational largest;
    for (ItemSet b : p.bundles()) {
      lo = min(lo, sum_costs(costs, b));
      hi = max(hi, sum_costs(costs, b));
    }
    for (const auto& c : costs) largest = max(largest, c);
    EXPECT_LE(hi - lo, largest);
  }
}

TEST(HeavyPair, AbsentInTightExampleLastBundle) {
  const NormalizedInstance norm = normalize(gen_paper_example());
  const std::vector<AgentId> agents = {0, 1};
  EXPECT_FALSE(find_heavy_pair(ReducedInstanceView::full(norm), norm.witness(2)[2], agents).has_value());
}

TEST(HeavyPair, TwoHalves) {
  const NormalizedInstance norm = normalize(Instance(1, 2, {ints({1, 1})}));
  const std::vector<AgentId> agents = {0};
  auto hp = find_heavy_pair(ReducedInstanceView::full(norm), ItemSet::range(2), agents);
  ASSERT_TRUE(hp.has_value());
  EXPECT_EQ(hp->agent, 0u);
  EXPECT_EQ(hp->first, 0u);
  EXPECT_EQ(hp->second, 1u);
}

TEST(HeavyPair, AgreesWithPairScan) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = gen_random(3, 8, CostModel::PaperLike, rng());
    const NormalizedInstance norm = normalize(inst);
    ItemSet bundle(rng() & ItemSet::range(8).bits());
    const std::vector<AgentId> agents = {2, 0};
    bool any = false;
    for (AgentId a : agents)
      for (ItemId x : bundle.to_vector())
        for (ItemId y : bundle.to_vector())
          if (x < y && norm.cost(a, x) + norm.cost(a, y) >= Rational(1)) any = true;
    auto hp = find_heavy_pair(ReducedInstanceView::full(norm), bundle, agents);
    ASSERT_EQ(hp.has_value(), any);
    if (hp) EXPECT_GE(norm.cost(hp->agent, hp->first) + norm.cost(hp->agent, hp->second), Rational(1));
  }
}

TEST(CappedBagFilling, TwoBundleExample) {
  // The agent's MMS over all six items is 10; the view keeps the first three.
  const NormalizedInstance norm = normalize(repeated(3, ints({9, 8, 3, 1, 2, 7})));
  ASSERT_EQ(norm.mms(0), Rational(10));
  ReducedInstanceView view(norm, {0, 1}, ItemSet{0, 1, 2});
  CappedBagFilling r = capped_bag_filling_detailed(view, 0);
  EXPECT_EQ(r.partition.bundles(), (std::vector<ItemSet>{ItemSet{0}, ItemSet{1, 2}}));
  EXPECT_EQ(r.leftovers, ItemSet{2});
  EXPECT_EQ(bundle_cost(view, 0, r.partition[0]), q(9, 10));
  EXPECT_EQ(bundle_cost(view, 0, r.partition[1]), q(11, 10));
  EXPECT_LE(q(11, 10), q(4, 3));
}

TEST(CappedBagFilling, SingleBundleAndErrors) {
  const NormalizedInstance norm = normalize(repeated(3, ints({9, 8, 3, 1, 2, 7})));
  ReducedInstanceView one(norm, {1}, ItemSet{0});
  EXPECT_EQ(capped_bag_filling(one, 1).bundles(), (std::vector<ItemSet>{ItemSet{0}}));
  ReducedInstanceView heavy(norm, {0}, ItemSet{0, 1, 2});
  EXPECT_THROW(capped_bag_filling(heavy, 0), InvalidArgument);
  EXPECT_THROW(capped_bag_filling(one, 0), InvalidArgument);
}

TEST(PartitionMerging, FullViewKeepsWitness) {
  const NormalizedInstance norm = normalize(gen_paper_example());
  EXPECT_EQ(partition_merging(norm, ReducedInstanceView::full(norm), 2), norm.witness(2));
}

TEST(PartitionMerging, MergesTwoCheapestPieces) {
  // Witness {e0},{e1,e2},{e3,e4},{e5,e6},{e7,e8}; dropping the small fillers
  // leaves pieces of cost 1, 9/10, 8/10, 7/10 and 6/10.
  const NormalizedInstance norm = normalize(repeated(5, ints({10, 9, 1, 8, 2, 7, 3, 6, 4})));
  ASSERT_EQ(norm.witness(0).bundles(),
            (std::vector<ItemSet>{ItemSet{0}, ItemSet{1, 2}, ItemSet{3, 4}, ItemSet{5, 6}, ItemSet{7, 8}}));
  ReducedInstanceView view(norm, {0, 1, 2, 3}, ItemSet{0, 1, 3, 5, 7});
  Partition p = partition_merging(norm, view, 0);
  EXPECT_EQ(p.bundles(), (std::vector<ItemSet>{ItemSet{0}, ItemSet{1}, ItemSet{3}, ItemSet{5, 7}}));
  EXPECT_EQ(bundle_cost(view, 0, p[3]), q(13, 10));
  EXPECT_LT(bundle_cost(view, 0, p[3]), q(8, 5));
}

TEST(GammaPartition, DispatchRule) {
  EXPECT_TRUE(uses_partition_merging(5, 5));
  EXPECT_TRUE(uses_partition_merging(5, 4));
  EXPECT_FALSE(uses_partition_merging(5, 3));
  EXPECT_FALSE(uses_partition_merging(5, 2));
  EXPECT_FALSE(uses_partition_merging(6, 3));
  EXPECT_TRUE(uses_partition_merging(6, 4));
  EXPECT_TRUE(uses_partition_merging(8, 5));
  EXPECT_FALSE(uses_partition_merging(8, 4));
}

TEST(GammaPartition, MatchesChosenConstruction) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 40; ++t) {
    const Instance inst = gen_random(5, 9, CostModel::Uniform, rng());
    const NormalizedInstance norm = normalize(inst);
    ReducedInstanceView full = ReducedInstanceView::full(norm);
    EXPECT_EQ(gamma_partition(norm, full, 0), partition_merging(norm, full, 0));
    ItemSet items = detail::shrink_to_budget(norm, 1, 2, false, rng);
    ReducedInstanceView small(norm, {1, 3}, items);
    EXPECT_EQ(gamma_partition(norm, small, 1), capped_bag_filling(small, 1));
    EXPECT_TRUE(verify_partition_shape(small, gamma_partition(norm, small, 1), 1, guarantee_for(5)));
  }
}

class LemmaProperty : public ::testing::TestWithParam<std::size_t> {};

TEST_P(LemmaProperty, HoldsOnRandomCases) {
  const auto& [name, gen] = lemma_generators()[GetParam()];
  auto rng = detail::make_rng(2024, GetParam());
  for (int t = 0; t < 150; ++t) {
    LemmaCase c = gen(rng);
    EXPECT_EQ(c.lemma, name);
    ASSERT_FALSE(c.failure.has_value()) << name << ": " << *c.failure;
  }
}

INSTANTIATE_TEST_SUITE_P(AllLemmas, LemmaProperty, ::testing::Range<std::size_t>(0, 5));
