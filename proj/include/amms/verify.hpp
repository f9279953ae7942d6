#pragma once

// Independent certification. Everything here recomputes MMS values from the
// raw instance through the oracle and never looks at a solver's normalization.

#include "amms/core.hpp"
#include "amms/mms_oracle.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace amms {

struct VerificationReport {
  bool passed = false;
  Rational alpha;
  std::vector<Rational> mms;
  std::vector<Rational> costs;
  /// cost / MMS per agent; 0 when both are zero, empty when only the MMS is.
  std::vector<std::optional<Rational>> ratios;
  /// The single agent above her MMS, if exactly one is.
  std::optional<AgentId> flexible_agent;
  std::size_t agents_within_mms = 0;
  /// c_i(X_i) <= c_i(M) / n; reported, never enforced.
  std::vector<bool> proportional;
  std::string reason;
};

inline VerificationReport verify_allocation(const Instance& instance, std::span<const ItemSet> bundles, const Rational& alpha,
                                            const OracleOptions& options = {}) {
  const std::size_t n = instance.n();
  if (bundles.size() != n) throw InvalidArgument("allocation has " + std::to_string(bundles.size()) + " bundles for " + std::to_string(n) + " agents");
  ItemSet seen;
  for (ItemSet b : bundles) {
    if (!seen.disjoint(b)) throw InvalidArgument("allocation assigns an item twice");
    seen |= b;
  }
  if (seen != instance.items()) throw InvalidArgument("allocation does not cover every item exactly once");

  VerificationReport report;
  report.alpha = alpha;
  const Rational n_r(static_cast<std::int64_t>(n));
  std::size_t above = 0;
  for (AgentId i = 0; i < n; ++i) {
    Rational value = mms(instance, i, instance.items(), n, options).value;
    Rational cost = bundle_cost(instance, i, bundles[i]);
    std::optional<Rational> ratio;
    if (!value.is_zero())
      ratio = cost / value;
    else if (cost.is_zero())
      ratio = Rational(0);
    const bool within = ratio && *ratio <= Rational(1);
    if (within) {
      ++report.agents_within_mms;
    } else {
      ++above;
      report.flexible_agent = i;
    }
    report.proportional.push_back(cost * n_r <= bundle_cost(instance, i, instance.items()));
    report.mms.push_back(std::move(value));
    report.costs.push_back(std::move(cost));
    report.ratios.push_back(std::move(ratio));
  }
  if (above == 0) {
    report.passed = true;
  } else if (above == 1) {
    const auto& r = report.ratios[*report.flexible_agent];
    report.passed = r && *r <= alpha;
    if (!report.passed)
      report.reason = "agent " + std::to_string(*report.flexible_agent) + " exceeds alpha (ratio " + (r ? r->str() : std::string("unbounded")) + ")";
  } else {
    report.flexible_agent.reset();
    report.reason = std::to_string(above) + " agents exceed their MMS";
  }
  return report;
}

inline VerificationReport verify_allocation(const Instance& instance, const Allocation& allocation, const Rational& alpha,
                                            const OracleOptions& options = {}) {
  return verify_allocation(instance, allocation.assignment, alpha, options);
}

/// At most one bundle above 1 for the agent, and that one at most alpha.
inline bool verify_partition_shape(const ReducedInstanceView& view, const Partition& partition, AgentId agent, const Rational& alpha) {
  const Rational one(1);
  std::size_t above = 0;
  for (ItemSet b : partition.bundles()) {
    Rational c = bundle_cost(view, agent, b);
    if (c > one) {
      if (++above > 1 || c > alpha) return false;
    }
  }
  return true;
}

/// MMS value by trying every assignment of the items to k labeled bundles.
/// Shares no code with the oracle; used to cross-check it.
inline Rational naive_mms_value(std::span<const Rational> costs, ItemSet items, std::size_t k, std::uint64_t budget = 20'000'000) {
  if (k < 1) throw InvalidArgument("mms needs k >= 1");
  const std::vector<ItemId> list = items.to_vector();
  long double estimate = 1;
  for (std::size_t i = 0; i < list.size(); ++i) estimate *= static_cast<long double>(k);
  if (estimate > static_cast<long double>(budget)) throw BudgetExceeded("naive MMS enumeration budget exceeded");
  std::vector<std::size_t> label(list.size(), 0);
  std::optional<Rational> best;
  while (true) {
    std::vector<Rational> loads(k);
    for (std::size_t x = 0; x < list.size(); ++x) loads[label[x]] += costs[list[x]];
    Rational worst;
    for (const auto& l : loads) worst = max(worst, l);
    if (!best || worst < *best) best = worst;
    std::size_t pos = 0;
    while (pos < list.size() && ++label[pos] == k) label[pos++] = 0;
    if (pos == list.size()) break;
  }
  return *best;
}

/// Smallest alpha >= 1 for which some alpha-AMMS allocation exists, by
/// enumerating all n^m allocations.
inline Rational brute_force_best_alpha(const Instance& instance, std::uint64_t budget = 2'000'000, const OracleOptions& options = {}) {
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();
  long double estimate = 1;
  for (std::size_t e = 0; e < m; ++e) estimate *= static_cast<long double>(n);
  if (estimate > static_cast<long double>(budget)) throw BudgetExceeded("allocation enumeration budget exceeded");

  // Per agent, costs and MMS on one integer scale.
  std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(m));
  std::vector<std::int64_t> share(n);
  const std::vector<ItemId> all = instance.items().to_vector();
  for (AgentId i = 0; i < n; ++i) {
    Rational value = mms(instance, i, instance.items(), n, options).value;
    detail::ScaledCosts s = detail::scale_to_integers(instance.costs(i), all);
    s.scale = boost::multiprecision::lcm(s.scale, value.denominator());
    BigInt total = 0;
    for (ItemId e = 0; e < m; ++e) {
      BigInt x = instance.cost(i, e).numerator() * (s.scale / instance.cost(i, e).denominator());
      total += x;
      w[i][e] = static_cast<std::int64_t>(x);
    }
    if (!detail::fits_int64(total)) throw BudgetExceeded("costs too large for allocation enumeration");
    share[i] = static_cast<std::int64_t>(value.numerator() * (s.scale / value.denominator()));
  }

  std::optional<Rational> best;
  std::vector<std::size_t> owner(m, 0);
  std::vector<std::int64_t> load(n);
  while (true) {
    std::fill(load.begin(), load.end(), 0);
    for (ItemId e = 0; e < m; ++e) load[owner[e]] += w[owner[e]][e];
    std::size_t above = 0;
    AgentId flexible = 0;
    for (AgentId i = 0; i < n; ++i)
      if (load[i] > share[i]) {
        ++above;
        flexible = i;
      }
    if (above == 0) return Rational(1);
    if (above == 1 && share[flexible] > 0) {
      Rational r(BigInt(load[flexible]), BigInt(share[flexible]));
      if (!best || r < *best) best = r;
    }
    std::size_t pos = 0;
    while (pos < m && ++owner[pos] == n) owner[pos++] = 0;
    if (pos == m) break;
  }
  if (!best) throw InvariantViolation("no allocation with at most one agent above her MMS");
  return *best;
}

}  // namespace amms
