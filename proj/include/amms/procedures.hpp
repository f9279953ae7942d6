#pragma once

// Allocation subroutines shared by the solvers. Tie-breaking is fixed
// everywhere: items by non-increasing cost then ascending index, bundles by
// ascending index.

#include "amms/core.hpp"
#include "amms/mms_oracle.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace amms {

namespace detail {

inline std::vector<ItemId> by_cost_descending(std::span<const Rational> cost, ItemSet items) {
  std::vector<ItemId> order = items.to_vector();
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) { return cost[a] > cost[b]; });
  return order;
}

/// Bundle indices sorted by non-increasing cost, ties by index.
inline std::vector<std::size_t> bundles_by_cost_descending(std::span<const Rational> cost, const std::vector<ItemSet>& bundles) {
  std::vector<Rational> c;
  c.reserve(bundles.size());
  for (ItemSet b : bundles) c.push_back(sum_costs(cost, b));
  std::vector<std::size_t> order(bundles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c[a] > c[b]; });
  return order;
}

inline void require_in_view(const ReducedInstanceView& view, AgentId agent) {
  if (!view.has_agent(agent)) throw InvalidArgument("agent " + std::to_string(agent) + " is not part of the view");
}

}  // namespace detail

struct DivideAndChoose {
  ItemSet divider_bundle;
  ItemSet chooser_bundle;
};

/// The divider splits `items` by her exact optimal 2-partition; the chooser
/// takes the cheaper half for her (the first half on ties).
inline DivideAndChoose divide_and_choose(const ReducedInstanceView& view, ItemSet items, AgentId divider, AgentId chooser,
                                         const OracleOptions& options = {}) {
  if (!items.is_subset_of(view.items())) throw InvalidArgument("divide-and-choose items outside the view");
  detail::require_in_view(view, divider);
  detail::require_in_view(view, chooser);
  Partition split = mms_partition(view.normalized().costs(divider), items, 2, options);
  const bool take_first = bundle_cost(view, chooser, split[0]) <= bundle_cost(view, chooser, split[1]);
  return take_first ? DivideAndChoose{split[1], split[0]} : DivideAndChoose{split[0], split[1]};
}

/// Greedy longest-processing-time split into `bundle_count` bundles: items in
/// non-increasing cost order, each onto the currently cheapest bundle.
inline Partition load_balancing(ItemSet items, std::size_t bundle_count, std::span<const Rational> cost) {
  if (bundle_count < 1) throw InvalidArgument("load balancing needs at least one bundle");
  if (items.span_end() > cost.size()) throw std::out_of_range("load balancing item out of range");
  std::vector<ItemSet> bundles(bundle_count);
  std::vector<Rational> loads(bundle_count);
  for (ItemId e : detail::by_cost_descending(cost, items)) {
    auto target = static_cast<std::size_t>(std::min_element(loads.begin(), loads.end()) - loads.begin());
    bundles[target].insert(e);
    loads[target] += cost[e];
  }
  return Partition(std::move(bundles), items);
}

struct HeavyPair {
  AgentId agent;
  ItemId first;
  ItemId second;
};

/// First (agent, e1 < e2) in scan order with c(e1) + c(e2) >= 1.
inline std::optional<HeavyPair> find_heavy_pair(const ReducedInstanceView& view, ItemSet bundle, std::span<const AgentId> agents) {
  if (!bundle.is_subset_of(view.items())) throw InvalidArgument("heavy-pair bundle outside the view");
  const std::vector<ItemId> items = bundle.to_vector();
  const Rational one(1);
  for (AgentId a : agents) {
    detail::require_in_view(view, a);
    auto c = view.normalized().costs(a);
    for (std::size_t x = 0; x < items.size(); ++x)
      for (std::size_t y = x + 1; y < items.size(); ++y)
        if (c[items[x]] + c[items[y]] >= one) return HeavyPair{a, items[x], items[y]};
  }
  return std::nullopt;
}

struct CappedBagFilling {
  Partition partition;
  /// Items that fit under the unit cap nowhere and went to the last bundle.
  ItemSet leftovers;
};

/// Fill k = |view agents| bundles in non-increasing item order, each item into
/// the first bundle that stays within cost 1; then order bundles by
/// non-increasing cost and append whatever did not fit to the last one.
inline CappedBagFilling capped_bag_filling_detailed(const ReducedInstanceView& view, AgentId agent) {
  detail::require_in_view(view, agent);
  const std::size_t k = view.k();
  const auto cost = view.normalized().costs(agent);
  if (sum_costs(cost, view.items()) > Rational(static_cast<std::int64_t>(k)))
    throw InvalidArgument("capped bag filling needs a valid reduced instance");
  const Rational one(1);
  std::vector<ItemSet> bundles(k);
  std::vector<Rational> loads(k);
  ItemSet leftovers;
  for (ItemId e : detail::by_cost_descending(cost, view.items())) {
    bool placed = false;
    for (std::size_t j = 0; j < k && !placed; ++j) {
      if (loads[j] + cost[e] <= one) {
        bundles[j].insert(e);
        loads[j] += cost[e];
        placed = true;
      }
    }
    if (!placed) leftovers.insert(e);
  }
  require(leftovers.size() + 1 <= k, "capped bag filling left " + std::to_string(leftovers.size()) + " items for " + std::to_string(k) + " bundles");
  std::vector<ItemSet> sorted;
  sorted.reserve(k);
  for (std::size_t j : detail::bundles_by_cost_descending(cost, bundles)) sorted.push_back(bundles[j]);
  sorted.back() |= leftovers;
  return CappedBagFilling{Partition(std::move(sorted), view.items()), leftovers};
}

inline Partition capped_bag_filling(const ReducedInstanceView& view, AgentId agent) {
  return capped_bag_filling_detailed(view, agent).partition;
}

/// Restrict the agent's original MMS partition to the remaining items, keep
/// the k-1 most expensive pieces and merge the other n-k+1 into the last
/// bundle. Equal-cost pieces keep their original order.
inline Partition partition_merging(const NormalizedInstance& normalized, const ReducedInstanceView& view, AgentId agent) {
  detail::require_in_view(view, agent);
  const std::size_t k = view.k();
  const Partition& original = normalized.witness(agent);
  std::vector<ItemSet> restricted;
  restricted.reserve(original.size());
  for (ItemSet b : original.bundles()) restricted.push_back(b & view.items());
  const auto order = detail::bundles_by_cost_descending(normalized.costs(agent), restricted);
  std::vector<ItemSet> out;
  out.reserve(k);
  for (std::size_t r = 0; r + 1 < k; ++r) out.push_back(restricted[order[r]]);
  ItemSet merged;
  for (std::size_t r = k - 1; r < order.size(); ++r) merged |= restricted[order[r]];
  out.push_back(merged);
  return Partition(std::move(out), view.items());
}

/// Which construction the (gamma,1,...,1)-partition uses for k remaining
/// agents out of n.
inline bool uses_partition_merging(std::size_t n, std::size_t k) { return k > (n + 1) / 2; }

/// A k-partition of the view's items whose first k-1 bundles cost at most 1
/// to the agent and whose last bundle costs at most (n+1)^2 / 4n.
inline Partition gamma_partition(const NormalizedInstance& normalized, const ReducedInstanceView& view, AgentId agent) {
  if (uses_partition_merging(normalized.n(), view.k())) return partition_merging(normalized, view, agent);
  return capped_bag_filling(view, agent);
}

}  // namespace amms
