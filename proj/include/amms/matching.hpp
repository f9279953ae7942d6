#pragma once

// MMS-feasibility graphs between agents and the bundles of a partition, with
// left-saturating matchings and maximum Hall violators.

#include "amms/core.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amms {

/// Bipartite graph: agents on the left, bundle indices of some partition on
/// the right. Adjacency is a bitmask over right positions per left position.
struct FeasibilityGraph {
  std::vector<AgentId> left;
  std::vector<std::size_t> right;
  std::vector<std::uint64_t> adjacency;

  static FeasibilityGraph from_adjacency(std::vector<AgentId> left, std::vector<std::size_t> right, std::vector<std::uint64_t> adjacency) {
    if (right.size() > 64) throw InvalidArgument("feasibility graph supports at most 64 bundles");
    if (adjacency.size() != left.size()) throw InvalidArgument("adjacency size does not match left side");
    const std::uint64_t valid = right.size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << right.size()) - 1);
    for (auto row : adjacency)
      if ((row & ~valid) != 0) throw InvalidArgument("adjacency refers to a missing right vertex");
    return FeasibilityGraph{std::move(left), std::move(right), std::move(adjacency)};
  }

  std::optional<std::size_t> left_position(AgentId agent) const {
    auto it = std::find(left.begin(), left.end(), agent);
    if (it == left.end()) return std::nullopt;
    return static_cast<std::size_t>(it - left.begin());
  }
  std::optional<std::size_t> right_position(std::size_t bundle) const {
    auto it = std::find(right.begin(), right.end(), bundle);
    if (it == right.end()) return std::nullopt;
    return static_cast<std::size_t>(it - right.begin());
  }

  bool has_edge(AgentId agent, std::size_t bundle) const {
    auto l = left_position(agent);
    auto r = right_position(bundle);
    return l && r && ((adjacency[*l] >> *r) & 1U);
  }

  /// Bundles adjacent to the agent, ascending.
  std::vector<std::size_t> neighbors(AgentId agent) const {
    std::vector<std::size_t> out;
    auto l = left_position(agent);
    if (!l) return out;
    for (std::uint64_t b = adjacency[*l]; b != 0; b &= b - 1) out.push_back(right[static_cast<std::size_t>(std::countr_zero(b))]);
    return out;
  }

  std::vector<std::pair<AgentId, std::size_t>> edges() const {
    std::vector<std::pair<AgentId, std::size_t>> out;
    for (std::size_t l = 0; l < left.size(); ++l)
      for (std::uint64_t b = adjacency[l]; b != 0; b &= b - 1) out.emplace_back(left[l], right[static_cast<std::size_t>(std::countr_zero(b))]);
    return out;
  }
};

/// Agent -> bundle pairs, ordered by agent.
using Assignment = std::vector<std::pair<AgentId, std::size_t>>;

struct Violator {
  std::vector<AgentId> agents;
  std::vector<std::size_t> neighborhood;
};

/// Edge (i, j) iff agent i's normalized cost of bundle j is at most 1.
inline FeasibilityGraph build_graph(const ReducedInstanceView& view, const Partition& partition,
                                    std::optional<AgentId> excluded_agent = std::nullopt,
                                    std::optional<std::size_t> excluded_bundle = std::nullopt) {
  if (!partition.ground().is_subset_of(view.items())) throw InvalidArgument("partition covers items outside the view");
  if (partition.size() > 64) throw InvalidArgument("feasibility graph supports at most 64 bundles");
  if (excluded_bundle && *excluded_bundle >= partition.size()) throw std::out_of_range("excluded bundle out of range");
  if (excluded_agent && !view.has_agent(*excluded_agent)) throw std::out_of_range("excluded agent not in view");
  FeasibilityGraph g;
  for (AgentId a : view.agents())
    if (a != excluded_agent) g.left.push_back(a);
  for (std::size_t j = 0; j < partition.size(); ++j)
    if (j != excluded_bundle) g.right.push_back(j);
  const Rational one(1);
  for (AgentId a : g.left) {
    std::uint64_t row = 0;
    for (std::size_t r = 0; r < g.right.size(); ++r)
      if (bundle_cost(view, a, partition[g.right[r]]) <= one) row |= std::uint64_t{1} << r;
    g.adjacency.push_back(row);
  }
  return g;
}

namespace detail {

/// Augmenting-path maximum matching restricted to the given left/right
/// position masks. Left vertices and right candidates are tried in ascending
/// order. Returns the right position matched to each left position (or -1).
inline std::vector<int> restricted_matching(const FeasibilityGraph& g, std::uint64_t left_mask, std::uint64_t right_mask) {
  std::vector<int> match_left(g.left.size(), -1);
  std::vector<int> match_right(g.right.size(), -1);
  std::uint64_t visited = 0;
  auto augment = [&](auto&& self, std::size_t l) -> bool {
    for (std::uint64_t b = g.adjacency[l] & right_mask; b != 0; b &= b - 1) {
      auto r = static_cast<std::size_t>(std::countr_zero(b));
      if ((visited >> r) & 1U) continue;
      visited |= std::uint64_t{1} << r;
      if (match_right[r] < 0 || self(self, static_cast<std::size_t>(match_right[r]))) {
        match_right[r] = static_cast<int>(l);
        match_left[l] = static_cast<int>(r);
        return true;
      }
    }
    return false;
  };
  for (std::size_t l = 0; l < g.left.size(); ++l) {
    if (((left_mask >> l) & 1U) == 0) continue;
    visited = 0;
    augment(augment, l);
  }
  return match_left;
}

inline std::uint64_t all_bits(std::size_t count) {
  return count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
}

inline std::optional<Assignment> saturating(const FeasibilityGraph& g, std::uint64_t left_mask, std::uint64_t right_mask) {
  std::vector<int> ml = restricted_matching(g, left_mask, right_mask);
  Assignment out;
  for (std::size_t l = 0; l < g.left.size(); ++l) {
    if (((left_mask >> l) & 1U) == 0) continue;
    if (ml[l] < 0) return std::nullopt;
    out.emplace_back(g.left[l], g.right[static_cast<std::size_t>(ml[l])]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// A matching saturating every left vertex, if one exists.
inline std::optional<Assignment> perfect_matching(const FeasibilityGraph& g) {
  if (g.left.size() > 64) throw InvalidArgument("feasibility graph supports at most 64 agents");
  return detail::saturating(g, detail::all_bits(g.left.size()), detail::all_bits(g.right.size()));
}

struct ViolatorOptions {
  std::size_t max_left = 20;
};

/// The largest agent set S with |S| > |L(S)|, found by enumerating every
/// subset of the left side. Maximum violators need not be unique; among those
/// of maximum size the one with the smallest left-position bitmask is chosen.
/// Absent iff the graph has a left-saturating matching.
inline std::optional<Violator> max_violator(const FeasibilityGraph& g, const ViolatorOptions& options = {}) {
  const std::size_t n = g.left.size();
  if (n > options.max_left)
    throw BudgetExceeded("violator search budget exceeded: " + std::to_string(n) + " agents > " + std::to_string(options.max_left));
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::uint64_t> nb(count, 0);
  std::size_t best_mask = 0;
  int best_size = 0;
  for (std::size_t s = 1; s < count; ++s) {
    auto low = static_cast<std::size_t>(std::countr_zero(s));
    nb[s] = nb[s & (s - 1)] | g.adjacency[low];
    int size = std::popcount(s);
    if (size > std::popcount(nb[s]) && size > best_size) {
      best_size = size;
      best_mask = s;
    }
  }
  if (best_size == 0) return std::nullopt;

  Violator v;
  for (std::size_t l = 0; l < n; ++l)
    if ((best_mask >> l) & 1U) v.agents.push_back(g.left[l]);
  for (std::uint64_t b = nb[best_mask]; b != 0; b &= b - 1) v.neighborhood.push_back(g.right[static_cast<std::size_t>(std::countr_zero(b))]);

  // Maximality implies the complement side satisfies Hall's condition: a
  // violator disjoint from S would union with S into a larger one.
  const std::uint64_t rest_left = detail::all_bits(n) & ~static_cast<std::uint64_t>(best_mask);
  const std::uint64_t rest_right = detail::all_bits(g.right.size()) & ~nb[best_mask];
  require(detail::saturating(g, rest_left, rest_right).has_value(), "maximum violator leaves an unmatched complement");
  return v;
}

/// Matching of the agents outside the violator into the bundles outside its
/// neighborhood.
inline Assignment complement_matching(const FeasibilityGraph& g, const Violator& v) {
  std::uint64_t left_mask = 0;
  std::uint64_t right_mask = 0;
  for (std::size_t l = 0; l < g.left.size(); ++l)
    if (std::find(v.agents.begin(), v.agents.end(), g.left[l]) == v.agents.end()) left_mask |= std::uint64_t{1} << l;
  for (std::size_t r = 0; r < g.right.size(); ++r)
    if (std::find(v.neighborhood.begin(), v.neighborhood.end(), g.right[r]) == v.neighborhood.end()) right_mask |= std::uint64_t{1} << r;
  auto m = detail::saturating(g, left_mask, right_mask);
  if (!m) throw InvariantViolation("no matching between the violator's complement and the free bundles");
  return *m;
}

}  // namespace amms
