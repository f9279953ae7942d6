#pragma once

// Entry-point solvers: exact for n <= 2, 9/8 for three agents, 4/3 for four,
// and (n+1)^2 / 4n through repeated valid reductions for n >= 5.

#include "amms/core.hpp"
#include "amms/matching.hpp"
#include "amms/mms_oracle.hpp"
#include "amms/procedures.hpp"
#include "amms/verify.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amms {

/// Cells B_i ∩ P_j of two 4-partitions of the same items.
struct AtomicBundleMatrix {
  std::array<std::array<ItemSet, 4>, 4> cells{};

  AtomicBundleMatrix(const Partition& rows, const Partition& cols) {
    if (rows.size() != 4 || cols.size() != 4 || rows.ground() != cols.ground()) throw InvalidArgument("atomic bundles need two 4-partitions of the same items");
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) cells[i][j] = rows[i] & cols[j];
  }

  ItemSet row(std::size_t i) const { return cells[i][0] | cells[i][1] | cells[i][2] | cells[i][3]; }
  ItemSet column(std::size_t j) const { return cells[0][j] | cells[1][j] | cells[2][j] | cells[3][j]; }
};

struct ReductionStep {
  AgentId pivot = 0;
  bool partition_merging = false;
  /// (gamma,1,...,1)-partition for the pivot; the relaxed bundle is last.
  Partition partition;
  /// Feasibility graph without the pivot and the relaxed bundle.
  FeasibilityGraph graph;
  std::optional<Assignment> matching;
  std::optional<Violator> violator;
  /// Agent -> partition bundle index handed out during this step.
  Assignment assigned;
  std::vector<AgentId> surviving_agents;
  ItemSet surviving_items;
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
};

struct SolveResult {
  Allocation allocation;
  /// Which branch of the construction produced the allocation.
  std::string case_tag;
  /// Explicit relabelings chosen where the construction allows any labeling.
  std::vector<std::pair<std::string, std::string>> relabeling;
  std::vector<FeasibilityGraph> graphs;
  std::optional<ReductionTrace> trace;
};

namespace detail {

inline std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string s = "{";
  for (std::size_t x = 0; x < ids.size(); ++x) s += (x ? "," : "") + std::to_string(ids[x]);
  return s + "}";
}

inline Allocation finish(const NormalizedInstance& normalized, std::vector<ItemSet> assignment, std::optional<AgentId> flexible, Rational alpha) {
  Partition check(assignment, normalized.base().items());  // throws unless complete
  Allocation a;
  a.assignment = std::move(assignment);
  a.flexible_agent = flexible;
  a.alpha = std::move(alpha);
  const Rational one(1);
  for (AgentId i = 0; i < normalized.n(); ++i) {
    a.ratios.push_back(bundle_cost(normalized, i, a.assignment[i]));
    if (a.flexible_agent == i)
      require(a.ratios.back() <= a.alpha, "flexible agent " + std::to_string(i) + " above alpha");
    else
      require(a.ratios.back() <= one, "agent " + std::to_string(i) + " above her MMS");
  }
  return a;
}

/// Bundle indices sorted by (cost to the agent, index).
inline std::vector<std::size_t> ascending_for(const NormalizedInstance& normalized, AgentId agent, const std::vector<ItemSet>& bundles,
                                              std::vector<std::size_t> ids) {
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return bundle_cost(normalized, agent, bundles[a]) < bundle_cost(normalized, agent, bundles[b]);
  });
  return ids;
}

/// Reorders so the bundle most expensive for the agent comes first.
inline Partition relaxed_first(const NormalizedInstance& normalized, AgentId agent, std::vector<ItemSet> bundles, ItemSet ground) {
  auto order = bundles_by_cost_descending(normalized.costs(agent), bundles);
  std::vector<ItemSet> out;
  for (std::size_t j : order) out.push_back(bundles[j]);
  return Partition(std::move(out), ground);
}

}  // namespace detail

/// Result of four_thirds_three_agents: bundles for the view's three agents.
struct ThreeAgentOutcome {
  std::vector<std::pair<AgentId, ItemSet>> bundles;
  AgentId flexible_agent = 0;
  std::string branch;
};

/// Given a (4/3,1,1)-partition for `agent_one` of a three-agent view, find an
/// allocation with two agents within their MMS and one within 4/3.
inline ThreeAgentOutcome four_thirds_three_agents(const ReducedInstanceView& view, const Partition& partition, AgentId agent_one,
                                                  const OracleOptions& options = {}) {
  if (view.k() != 3 || partition.size() != 3) throw InvalidArgument("four_thirds_three_agents needs three agents and three bundles");
  if (partition.ground() != view.items()) throw InvalidArgument("partition must cover the view's items");
  if (!view.has_agent(agent_one)) throw InvalidArgument("partition agent not in view");
  if (!verify_partition_shape(view, partition, agent_one, Rational(4, 3))) throw InvalidArgument("not a (4/3,1,1)-partition for the agent");
  std::vector<AgentId> others;
  for (AgentId a : view.agents())
    if (a != agent_one) others.push_back(a);

  ThreeAgentOutcome out;
  FeasibilityGraph g = build_graph(view, partition, agent_one);
  if (auto pm = perfect_matching(g)) {
    std::array<bool, 3> used{};
    for (auto [agent, bundle] : *pm) {
      out.bundles.emplace_back(agent, partition[bundle]);
      used[bundle] = true;
    }
    for (std::size_t j = 0; j < 3; ++j)
      if (!used[j]) out.bundles.emplace_back(agent_one, partition[j]);
    out.flexible_agent = agent_one;
    out.branch = "matching";
    return out;
  }

  const Rational one(1);
  std::optional<std::size_t> pick;
  for (std::size_t j = 0; j < 3 && !pick; ++j) {
    if (bundle_cost(view, agent_one, partition[j]) <= one && bundle_cost(view, others[0], partition[j]) > one &&
        bundle_cost(view, others[1], partition[j]) > one)
      pick = j;
  }
  require(pick.has_value(), "no bundle liked by the partitioning agent alone");
  out.bundles.emplace_back(agent_one, partition[*pick]);
  DivideAndChoose dc = divide_and_choose(view, view.items() - partition[*pick], others[0], others[1], options);
  out.bundles.emplace_back(others[0], dc.divider_bundle);
  out.bundles.emplace_back(others[1], dc.chooser_bundle);
  out.flexible_agent = others[0];
  out.branch = "pick_and_split";
  return out;
}

/// Three agents, flexible bound 9/8. Bundles come from the last agent's MMS
/// partition.
inline SolveResult solve_three(const NormalizedInstance& normalized, const OracleOptions& options = {}) {
  if (normalized.n() != 3) throw InvalidArgument("solve_three needs exactly three agents");
  const Rational alpha(9, 8);
  const Partition& p = normalized.witness(2);
  const auto view = ReducedInstanceView::full(normalized);
  const ItemSet all = view.items();
  SolveResult result;
  FeasibilityGraph g = build_graph(view, p);
  result.graphs.push_back(g);
  std::vector<ItemSet> x(3);

  if (auto pm = perfect_matching(g)) {
    for (auto [agent, bundle] : *pm) x[agent] = p[bundle];
    result.case_tag = "perfect_matching";
    result.allocation = detail::finish(normalized, std::move(x), std::nullopt, alpha);
    return result;
  }

  auto v = max_violator(g);
  require(v && v->agents == std::vector<AgentId>{0, 1} && v->neighborhood.size() == 1, "three-agent graph without the expected shared bundle");
  const std::size_t shared = v->neighborhood[0];
  std::vector<std::size_t> rest_ids;
  for (std::size_t j = 0; j < 3; ++j)
    if (j != shared) rest_ids.push_back(j);
  result.relabeling.emplace_back("shared_bundle", std::to_string(shared));

  const std::array<AgentId, 2> pair{0, 1};
  for (std::size_t j : rest_ids) {
    if (auto hp = find_heavy_pair(view, p[j], pair)) {
      const AgentId chooser = hp->agent == 0 ? 1 : 0;
      x[2] = p[j];
      DivideAndChoose dc = divide_and_choose(view, all - p[j], hp->agent, chooser, options);
      x[hp->agent] = dc.divider_bundle;
      x[chooser] = dc.chooser_bundle;
      result.case_tag = "heavy_pair";
      result.relabeling.emplace_back("reduced_bundle", std::to_string(j));
      result.relabeling.emplace_back("divider", std::to_string(hp->agent));
      result.allocation = detail::finish(normalized, std::move(x), std::nullopt, alpha);
      return result;
    }
  }

  // Agent 0 is the flexible agent; the costlier remaining bundle goes to
  // agent 2 (the higher index on ties).
  auto order = detail::ascending_for(normalized, 0, p.bundles(), rest_ids);
  const std::size_t cheaper = order[0];
  const std::size_t costlier = order[1];
  result.relabeling.emplace_back("agent2_bundle", std::to_string(costlier));
  x[2] = p[costlier];
  if (bundle_cost(normalized, 0, p[cheaper]) <= alpha) {
    x[0] = p[cheaper];
    x[1] = p[shared];
    result.case_tag = "direct";
  } else {
    Partition lb = load_balancing(p[shared] | p[cheaper], 2, normalized.costs(0));
    const bool first = bundle_cost(normalized, 1, lb[0]) <= bundle_cost(normalized, 1, lb[1]);
    x[1] = first ? lb[0] : lb[1];
    x[0] = first ? lb[1] : lb[0];
    result.case_tag = "load_balancing";
  }
  result.allocation = detail::finish(normalized, std::move(x), AgentId{0}, alpha);
  return result;
}

/// Four agents, flexible bound 4/3. Bundles come from the last agent's MMS
/// partition; the case analysis follows the maximum Hall violator.
inline SolveResult solve_four(const NormalizedInstance& normalized, const OracleOptions& options = {}) {
  if (normalized.n() != 4) throw InvalidArgument("solve_four needs exactly four agents");
  const Rational alpha(4, 3);
  const Rational one(1);
  constexpr AgentId last = 3;
  const Partition& p = normalized.witness(last);
  const auto view = ReducedInstanceView::full(normalized);
  const ItemSet all = view.items();
  SolveResult result;
  FeasibilityGraph g = build_graph(view, p);
  result.graphs.push_back(g);
  std::vector<ItemSet> x(4);

  if (auto pm = perfect_matching(g)) {
    for (auto [agent, bundle] : *pm) x[agent] = p[bundle];
    result.case_tag = "perfect_matching";
    result.allocation = detail::finish(normalized, std::move(x), std::nullopt, alpha);
    return result;
  }

  auto v = max_violator(g);
  require(v.has_value(), "no violator without a perfect matching");
  const auto& s = v->agents;
  const auto& l = v->neighborhood;
  require(std::find(s.begin(), s.end(), last) == s.end() && s.size() >= 2 && s.size() <= 3, "unexpected maximum violator");
  result.relabeling.emplace_back("violator", detail::join_ids(s));
  result.relabeling.emplace_back("violator_neighborhood", detail::join_ids(l));
  auto in_l = [&](std::size_t j) { return std::find(l.begin(), l.end(), j) != l.end(); };
  auto likes = [&](AgentId a, ItemSet b) { return bundle_cost(normalized, a, b) <= one; };

  if (s.size() == 2) {
    require(l.size() == 1, "two-agent violator must share exactly one bundle");
    ItemSet rest = all;
    for (auto [agent, bundle] : complement_matching(g, *v)) {
      x[agent] = p[bundle];
      rest -= p[bundle];
    }
    const AgentId a = s[0];
    const AgentId b = s[1];
    Partition lb = load_balancing(rest, 2, normalized.costs(a));
    const bool first = bundle_cost(normalized, b, lb[0]) <= bundle_cost(normalized, b, lb[1]);
    x[b] = first ? lb[0] : lb[1];
    x[a] = first ? lb[1] : lb[0];
    result.case_tag = "s2_l1";
    result.allocation = detail::finish(normalized, std::move(x), a, alpha);
    return result;
  }

  std::vector<std::size_t> outside;
  for (std::size_t j = 0; j < 4; ++j)
    if (!in_l(j)) outside.push_back(j);

  std::optional<Partition> three;  // (4/3,1,1)-partition for `pivot`
  AgentId pivot = s[0];
  ItemSet remaining;

  if (l.size() == 2) {
    std::optional<AgentId> double_liker;
    for (AgentId a : s)
      if (!double_liker && likes(a, p[l[0]]) && likes(a, p[l[1]])) double_liker = a;

    if (!double_liker) {
      // Every agent of S* likes one bundle: two share one, the third has the other.
      std::size_t popular = l[0];
      std::vector<AgentId> fans;
      for (AgentId a : s)
        if (likes(a, p[l[0]])) fans.push_back(a);
      if (fans.size() != 2) {
        popular = l[1];
        fans.clear();
        for (AgentId a : s)
          if (likes(a, p[l[1]])) fans.push_back(a);
      }
      require(fans.size() == 2, "no bundle shared by two violator agents");
      const std::size_t lonely_bundle = popular == l[0] ? l[1] : l[0];
      AgentId lonely = s[0];
      for (AgentId a : s)
        if (a != fans[0] && a != fans[1]) lonely = a;
      const AgentId xa = fans[0];
      const AgentId ya = fans[1];
      auto order = detail::ascending_for(normalized, xa, p.bundles(), outside);
      x[lonely] = p[lonely_bundle];
      x[last] = p[order[1]];
      ItemSet rest = p[popular] | p[order[0]];
      Partition lb = load_balancing(rest, 2, normalized.costs(xa));
      const bool first = bundle_cost(normalized, ya, lb[0]) <= bundle_cost(normalized, ya, lb[1]);
      x[ya] = first ? lb[0] : lb[1];
      x[xa] = first ? lb[1] : lb[0];
      result.case_tag = "s3_l2_single";
      result.relabeling.emplace_back("shared_bundle", std::to_string(popular));
      result.relabeling.emplace_back("agent4_bundle", std::to_string(order[1]));
      result.allocation = detail::finish(normalized, std::move(x), xa, alpha);
      return result;
    }

    pivot = *double_liker;
    auto liked = detail::ascending_for(normalized, pivot, p.bundles(), l);
    auto disliked = detail::ascending_for(normalized, pivot, p.bundles(), outside);
    x[last] = p[disliked[1]];
    remaining = all - p[disliked[1]];
    Partition lb = load_balancing(p[liked[0]] | p[disliked[0]], 2, normalized.costs(pivot));
    three = detail::relaxed_first(normalized, pivot, {p[liked[1]], lb[0], lb[1]}, remaining);
    result.case_tag = "s3_l2_double";
    result.relabeling.emplace_back("partition_agent", std::to_string(pivot));
    result.relabeling.emplace_back("agent4_bundle", std::to_string(disliked[1]));
  } else {
    require(l.size() == 1, "three-agent violator with an unexpected neighborhood");
    const std::size_t shared = l[0];
    const Partition& b = normalized.witness(pivot);
    AtomicBundleMatrix atoms(b, p);
    std::optional<std::pair<std::size_t, std::size_t>> cell;
    for (std::size_t i = 0; i < 4 && !cell; ++i)
      for (std::size_t j = 0; j < 4 && !cell; ++j)
        if (j != shared && bundle_cost(normalized, pivot, p[j] - atoms.cells[i][j]) > one) cell = std::make_pair(i, j);
    result.relabeling.emplace_back("partition_agent", std::to_string(pivot));

    if (cell) {
      auto [i, j] = *cell;
      x[last] = p[j];
      remaining = all - p[j];
      ItemSet t = b[i] - p[j];
      Partition lb = load_balancing(remaining - t, 2, normalized.costs(pivot));
      three = detail::relaxed_first(normalized, pivot, {t, lb[0], lb[1]}, remaining);
      result.case_tag = "s3_l1_atomic_cell";
      result.relabeling.emplace_back("atomic_cell", "b" + std::to_string(i) + std::to_string(j));
    } else {
      auto q = detail::ascending_for(normalized, pivot, p.bundles(), {0, 1, 2, 3});
      require(q[0] == shared, "the shared bundle is not the pivot's cheapest");
      x[last] = p[q[3]];
      remaining = all - p[q[3]];
      const Rational beta = bundle_cost(normalized, pivot, p[q[0]]);
      auto cheapest_cell = [&](std::size_t col) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 4; ++i)
          if (bundle_cost(normalized, pivot, atoms.cells[i][col]) < bundle_cost(normalized, pivot, atoms.cells[best][col])) best = i;
        return atoms.cells[best][col];
      };
      const ItemSet b2 = cheapest_cell(q[1]);
      const ItemSet b3 = cheapest_cell(q[2]);
      if (beta <= Rational(4, 5)) {
        three = detail::relaxed_first(normalized, pivot, {p[q[0]] | b2 | b3, p[q[1]] - b2, p[q[2]] - b3}, remaining);
        result.case_tag = "s3_l1_beta_low";
      } else {
        three = detail::relaxed_first(normalized, pivot, {p[q[0]], p[q[1]] | b3, p[q[2]] - b3}, remaining);
        result.case_tag = "s3_l1_beta_high";
      }
      result.relabeling.emplace_back("beta", beta.str());
      result.relabeling.emplace_back("agent4_bundle", std::to_string(q[3]));
    }
  }

  const ReducedInstanceView reduced(normalized, s, remaining);
  require(reduced.is_valid(), "four-agent reduction is not valid");
  ThreeAgentOutcome sub = four_thirds_three_agents(reduced, *three, pivot, options);
  for (auto& [agent, bundle] : sub.bundles) x[agent] = bundle;
  result.case_tag += "/" + sub.branch;
  result.allocation = detail::finish(normalized, std::move(x), sub.flexible_agent, alpha);
  return result;
}

struct ValidReduction {
  Violator violator;
  /// Agent -> partition bundle index.
  Assignment assigned;
  ReducedInstanceView survivors;
};

/// Without a perfect matching in G', match the agents outside the maximum
/// violator S, let the pivot take a free bundle outside L(S), and keep S.
inline ValidReduction valid_reduction(const ReducedInstanceView& view, const FeasibilityGraph& graph_prime, AgentId pivot, const Partition& partition) {
  auto v = max_violator(graph_prime);
  if (!v) throw InvalidArgument("valid reduction needs a graph without a perfect matching");
  Assignment assigned;
  if (v->agents.size() != graph_prime.left.size()) assigned = complement_matching(graph_prime, *v);

  const std::size_t relaxed = partition.size() - 1;
  std::optional<std::size_t> pool;
  for (std::size_t j = 0; j < relaxed && !pool; ++j) {
    const bool in_l = std::find(v->neighborhood.begin(), v->neighborhood.end(), j) != v->neighborhood.end();
    const bool taken = std::any_of(assigned.begin(), assigned.end(), [&](const auto& pr) { return pr.second == j; });
    if (!in_l && !taken) pool = j;
  }
  require(pool.has_value(), "pivot has no bundle left to pick");
  assigned.emplace_back(pivot, *pool);
  std::sort(assigned.begin(), assigned.end());

  ItemSet items = view.items();
  for (auto [agent, bundle] : assigned) items -= partition[bundle];
  return ValidReduction{*v, std::move(assigned), ReducedInstanceView(view.normalized(), v->agents, items)};
}

/// General n: repeatedly build a (gamma,1,...,1)-partition for the lowest
/// remaining agent and either finish by a perfect matching or reduce.
inline SolveResult solve_general(const NormalizedInstance& normalized) {
  const std::size_t n = normalized.n();
  if (n < 5) throw InvalidArgument("solve_general needs at least five agents");
  const Rational gamma = guarantee_for(n);
  const Rational one(1);
  SolveResult result;
  result.trace.emplace();
  std::vector<ItemSet> x(n);
  ReducedInstanceView view = ReducedInstanceView::full(normalized);

  for (std::size_t iteration = 0; iteration < n; ++iteration) {
    const AgentId pivot = view.agents().front();
    const std::size_t k = view.k();
    ReductionStep step;
    step.pivot = pivot;
    step.partition_merging = uses_partition_merging(n, k);
    step.partition = gamma_partition(normalized, view, pivot);
    require(step.partition.size() == k, "gamma partition has the wrong size");
    for (std::size_t j = 0; j + 1 < k; ++j) require(bundle_cost(view, pivot, step.partition[j]) <= one, "gamma partition bundle above 1");
    require(bundle_cost(view, pivot, step.partition[k - 1]) <= gamma, "gamma partition relaxed bundle above gamma");
    step.graph = build_graph(view, step.partition, pivot, k - 1);

    if (auto pm = perfect_matching(step.graph)) {
      step.matching = pm;
      step.assigned = *pm;
      step.assigned.emplace_back(pivot, k - 1);
      std::sort(step.assigned.begin(), step.assigned.end());
      for (auto [agent, bundle] : step.assigned) x[agent] = step.partition[bundle];
      step.surviving_items = ItemSet();
      result.trace->steps.push_back(std::move(step));
      result.case_tag = "general";
      result.allocation = detail::finish(normalized, std::move(x), pivot, gamma);
      return result;
    }

    ValidReduction red = valid_reduction(view, step.graph, pivot, step.partition);
    for (auto [agent, bundle] : red.assigned) x[agent] = step.partition[bundle];
    require(red.survivors.k() < k, "reduction did not remove an agent");
    require(red.survivors.is_valid(), "reduction produced an invalid instance");
    step.violator = red.violator;
    step.assigned = red.assigned;
    step.surviving_agents = red.survivors.agents();
    step.surviving_items = red.survivors.items();
    result.trace->steps.push_back(std::move(step));
    view = red.survivors;
  }
  throw InvariantViolation("general solver did not terminate within n iterations");
}

struct SolveOptions {
  OracleOptions oracle;
  /// Re-certify the output with the independent verifier before returning.
  bool self_verify = true;
};

/// Dispatch on the number of agents. The allocation's alpha is the bound
/// guaranteed for n.
inline SolveResult solve(const Instance& instance, const SolveOptions& options = {}) {
  const NormalizedInstance normalized = normalize(instance, options.oracle);
  const std::size_t n = instance.n();
  SolveResult result;
  if (n == 1) {
    result.case_tag = "single_agent";
    result.allocation = detail::finish(normalized, {instance.items()}, std::nullopt, Rational(1));
  } else if (n == 2) {
    DivideAndChoose dc = divide_and_choose(ReducedInstanceView::full(normalized), instance.items(), 0, 1, options.oracle);
    result.case_tag = "divide_and_choose";
    result.allocation = detail::finish(normalized, {dc.divider_bundle, dc.chooser_bundle}, std::nullopt, Rational(1));
  } else if (n == 3) {
    result = solve_three(normalized, options.oracle);
  } else if (n == 4) {
    result = solve_four(normalized, options.oracle);
  } else {
    result = solve_general(normalized);
  }
  if (options.self_verify) {
    VerificationReport report = verify_allocation(instance, result.allocation, result.allocation.alpha, options.oracle);
    require(report.passed, "solver output failed verification: " + report.reason);
  }
  return result;
}

}  // namespace amms
