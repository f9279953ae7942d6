#include "amms/amms.hpp"
#include "support/brute.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace amms;

namespace {

std::vector<Rational> ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Rational> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

Rational max_bundle(std::span<const Rational> costs, const Partition& p) {
  Rational worst;
  for (ItemSet b : p.bundles()) worst = max(worst, sum_costs(costs, b));
  return worst;
}

}  // namespace

TEST(Mms, TightExampleWitness) {
  const Instance inst = gen_paper_example();
  MmsResult r = mms(inst, 2, inst.items(), 3);
  EXPECT_EQ(r.value, Rational(1));
  EXPECT_EQ(r.witness.bundles(), (std::vector<ItemSet>{ItemSet{0, 1}, ItemSet{2, 3, 4}, ItemSet{5, 6, 7}}));
  for (AgentId i = 0; i < 3; ++i) EXPECT_EQ(mms(inst, i, inst.items(), 3).value, Rational(1));
}

TEST(Mms, SingleBundleIsTotal) {
  const auto costs = ints({4, 0, 7, 1});
  MmsResult r = mms(costs, ItemSet::range(4), 1);
  EXPECT_EQ(r.value, Rational(12));
  ASSERT_EQ(r.witness.size(), 1u);
  EXPECT_EQ(r.witness[0], ItemSet::range(4));
}

TEST(Mms, SmallDerivedValue) {
  // Brute force over all 2-partitions of {3,3,2,2,2}: best split is 6/6.
  const auto costs = ints({3, 3, 2, 2, 2});
  EXPECT_EQ(brute::mms(costs, 2), Rational(6));
  MmsResult r = mms(costs, ItemSet::range(5), 2);
  EXPECT_EQ(r.value, Rational(6));
  EXPECT_EQ(max_bundle(costs, r.witness), Rational(6));
}

TEST(Mms, FewerItemsThanBundles) {
  const auto costs = ints({5, 9, 2});
  MmsResult r = mms(costs, ItemSet{0, 1}, 4);
  EXPECT_EQ(r.value, Rational(9));
  EXPECT_EQ(r.witness.size(), 4u);
  EXPECT_EQ(mms(costs, ItemSet{}, 3).value, Rational(0));
}

TEST(Mms, Errors) {
  const auto costs = ints({1, 2});
  EXPECT_THROW(mms(costs, ItemSet::range(2), 0), InvalidArgument);
  EXPECT_THROW(mms(costs, ItemSet{2}, 1), std::out_of_range);
  std::vector<Rational> many(30, Rational(1));
  try {
    mms(many, ItemSet::range(30), 3);
    FAIL() << "expected a budget error";
  } catch (const BudgetExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("oracle budget exceeded"), std::string::npos);
  }
  EXPECT_NO_THROW(mms(many, ItemSet::range(30), 3, OracleOptions{30}));
}

TEST(Mms, AgreesWithBruteForce) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = rng() % 9;
    std::vector<Rational> costs;
    for (std::size_t e = 0; e < m; ++e) costs.emplace_back(BigInt(static_cast<std::int64_t>(rng() % 40)), BigInt(static_cast<std::int64_t>(rng() % 6 + 1)));
    ItemSet items(rng() & ItemSet::range(m).bits());
    const std::size_t k = rng() % 4 + 1;
    MmsResult r = mms(costs, items, k);
    EXPECT_EQ(r.value, brute::mms(costs, items.to_vector(), k));
    EXPECT_EQ(r.value, naive_mms_value(costs, items, k));
    EXPECT_EQ(r.witness.size(), k);
    EXPECT_EQ(r.witness.ground(), items);
    EXPECT_EQ(max_bundle(costs, r.witness), r.value);
  }
}

TEST(Mms, BigIntegerPathMatchesScaledCopy) {
  // Totals above 2^61 take the arbitrary-precision path; scaling down must
  // give the same answer scaled back.
  const BigInt huge = BigInt(1) << 70;
  std::vector<Rational> small = ints({7, 5, 4, 4, 3, 1});
  std::vector<Rational> large;
  for (const auto& c : small) large.push_back(c * Rational(huge, BigInt(1)));
  EXPECT_EQ(mms(large, ItemSet::range(6), 3).value, mms(small, ItemSet::range(6), 3).value * Rational(huge, BigInt(1)));
}

TEST(Mms, MonotoneInKAndItems) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    const Instance inst = gen_random(1, 8, CostModel::PaperLike, rng());
    ItemSet items(rng() & ItemSet::range(8).bits());
    for (std::size_t k = 1; k < 5; ++k) EXPECT_LE(mms(inst, 0, items, k + 1).value, mms(inst, 0, items, k).value);
    ItemSet bigger = items | ItemSet{static_cast<ItemId>(rng() % 8)};
    EXPECT_LE(mms(inst, 0, items, 3).value, mms(inst, 0, bigger, 3).value);
  }
}

TEST(Mms, TwoItemReductionMonotonicity) {
  std::mt19937_64 rng(29);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const Instance inst = gen_random(1, 8, CostModel::Uniform, rng());
    const std::size_t n = rng() % 3 + 2;
    const Rational value = mms(inst, 0, inst.items(), n).value;
    for (ItemId a = 0; a < 8; ++a)
      for (ItemId b = a + 1; b < 8; ++b)
        if (inst.cost(0, a) + inst.cost(0, b) >= value) {
          EXPECT_LE(mms(inst, 0, inst.items() - ItemSet{a, b}, n - 1).value, value);
          ++checked;
        }
  }
  EXPECT_GT(checked, 100);
}

TEST(Mms, DeterministicWitness) {
  const Instance inst = gen_random(1, 10, CostModel::PaperLike, 99);
  EXPECT_EQ(mms(inst, 0, inst.items(), 3).witness, mms(inst, 0, inst.items(), 3).witness);
}

TEST(Normalize, TightExampleIsAlreadyNormalized) {
  const Instance inst = gen_paper_example();
  const NormalizedInstance norm = normalize(inst);
  for (AgentId i = 0; i < 3; ++i) {
    EXPECT_EQ(norm.mms(i), Rational(1));
    for (ItemId e = 0; e < 8; ++e) EXPECT_EQ(norm.cost(i, e), inst.cost(i, e));
  }
}

TEST(Normalize, SingleAgentSingleItem) {
  const NormalizedInstance norm = normalize(Instance(1, 1, {{7}}));
  EXPECT_EQ(norm.mms(0), Rational(7));
  EXPECT_EQ(norm.cost(0, 0), Rational(1));
}

TEST(Normalize, ScaleInvariant) {
  const Instance inst = gen_random(3, 7, CostModel::Uniform, 4);
  const Rational lambda(BigInt(7), BigInt(3));
  std::vector<std::vector<Rational>> scaled = inst.matrix();
  for (auto& row : scaled)
    for (auto& c : row) c = c * lambda;
  const NormalizedInstance a = normalize(inst);
  const NormalizedInstance b = normalize(Instance(3, 7, scaled));
  for (AgentId i = 0; i < 3; ++i)
    for (ItemId e = 0; e < 7; ++e) EXPECT_EQ(a.cost(i, e), b.cost(i, e));
}
