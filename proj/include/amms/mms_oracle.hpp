#pragma once

// Exact maximin-share computation.
//
// MMS_i(S, k) is the smallest achievable maximum bundle cost over all
// k-partitions of S under agent i's costs. The value is found by binary search
// over a bin-packing feasibility test (subset DP, O(2^|S| |S|) per probe) on
// costs scaled to a common integer denominator, so no rounding ever happens.
// The witness is the lexicographically smallest bundle-label assignment (items
// taken by ascending index, labels tried in ascending order) among all
// k-partitions attaining the value.

#include "amms/core.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace amms {

struct MmsResult {
  Rational value;
  Partition witness;
};

struct OracleOptions {
  /// Largest item count the exact search accepts. Memory for the subset DP is
  /// 9 * 2^budget bytes, about 150 MB at the default.
  std::size_t item_budget = 24;
};

namespace detail {

/// Costs of `items` multiplied by the lcm of their denominators.
struct ScaledCosts {
  std::vector<BigInt> weights;
  BigInt scale{1};
  BigInt total{0};
};

inline ScaledCosts scale_to_integers(std::span<const Rational> costs, const std::vector<ItemId>& items) {
  ScaledCosts out;
  for (ItemId e : items) out.scale = boost::multiprecision::lcm(out.scale, costs[e].denominator());
  out.weights.reserve(items.size());
  for (ItemId e : items) {
    BigInt w = costs[e].numerator() * (out.scale / costs[e].denominator());
    out.total += w;
    out.weights.push_back(std::move(w));
  }
  return out;
}

inline bool fits_int64(const BigInt& total) { return total <= BigInt(std::int64_t{1} << 61); }

template <class Int>
class MinMaxPartitioner {
 public:
  MinMaxPartitioner(std::vector<Int> weights, std::size_t k) : w_(std::move(weights)), k_(k) {
    for (const Int& x : w_) {
      total_ += x;
      if (x > max_item_) max_item_ = x;
    }
  }

  Int lower_bound() const {
    Int k = static_cast<Int>(k_);
    Int avg = (total_ + k - 1) / k;
    return std::max(avg, max_item_);
  }

  /// Longest-processing-time greedy makespan.
  Int upper_bound() const {
    std::vector<std::size_t> order(w_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w_[a] > w_[b]; });
    std::vector<Int> loads(k_, Int(0));
    for (std::size_t e : order) *std::min_element(loads.begin(), loads.end()) += w_[e];
    return *std::max_element(loads.begin(), loads.end());
  }

  /// Can the items be packed into k bins of capacity `cap`? Every item must
  /// already fit on its own. dp[S] = (bins opened, load of the last bin),
  /// minimized lexicographically.
  bool feasible(const Int& cap) const {
    const std::size_t m = w_.size();
    if (m == 0) return true;
    const std::size_t full = (std::size_t{1} << m) - 1;
    std::vector<std::uint8_t> bins(full + 1, std::numeric_limits<std::uint8_t>::max());
    std::vector<Int> load(full + 1, Int(0));
    bins[0] = 1;
    for (std::size_t s = 1; s <= full; ++s) {
      std::uint8_t best_bins = std::numeric_limits<std::uint8_t>::max();
      Int best_load(0);
      for (std::size_t rest = s; rest != 0; rest &= rest - 1) {
        std::size_t e = static_cast<std::size_t>(std::countr_zero(rest));
        std::size_t prev = s & ~(std::size_t{1} << e);
        std::uint8_t b = bins[prev];
        Int l = load[prev] + w_[e];
        if (l > cap) {
          b = static_cast<std::uint8_t>(b + 1);
          l = w_[e];
        }
        if (b < best_bins || (b == best_bins && l < best_load)) {
          best_bins = b;
          best_load = l;
        }
      }
      bins[s] = best_bins;
      load[s] = best_load;
    }
    return bins[full] <= k_;
  }

  Int min_max() const {
    if (w_.empty()) return Int(0);
    if (k_ >= w_.size()) return max_item_;
    Int lo = lower_bound();
    Int hi = upper_bound();
    while (lo < hi) {
      Int mid = lo + (hi - lo) / 2;
      if (feasible(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  /// Lexicographically smallest label vector with every bin load <= cap.
  /// Failed subproblems are memoized on (next item, sorted loads) since the
  /// remaining packing only depends on that multiset.
  std::vector<std::size_t> lexicographic_assignment(const Int& cap) const {
    const std::size_t m = w_.size();
    suffix_.assign(m + 1, Int(0));
    for (std::size_t i = m; i-- > 0;) suffix_[i] = suffix_[i + 1] + w_[i];
    loads_.assign(k_, Int(0));
    labels_.assign(m, 0);
    failed_.clear();
    cap_ = cap;
    if (!search(0, 0, Int(0))) throw InvariantViolation("no packing found at the computed MMS value");
    return labels_;
  }

 private:
  bool search(std::size_t idx, std::size_t used, const Int& placed) const {
    if (idx == w_.size()) return true;
    if (suffix_[idx] > static_cast<Int>(k_) * cap_ - placed) return false;
    std::pair<std::size_t, std::vector<Int>> key{idx, loads_};
    std::sort(key.second.begin(), key.second.end());
    if (failed_.count(key) != 0) return false;
    const std::size_t limit = std::min(used + 1, k_);
    std::vector<Int> tried;
    for (std::size_t b = 0; b < limit; ++b) {
      if (loads_[b] + w_[idx] > cap_) continue;
      if (std::find(tried.begin(), tried.end(), loads_[b]) != tried.end()) continue;
      tried.push_back(loads_[b]);
      loads_[b] += w_[idx];
      labels_[idx] = b;
      if (search(idx + 1, std::max(used, b + 1), placed + w_[idx])) return true;
      loads_[b] -= w_[idx];
    }
    failed_.insert(std::move(key));
    return false;
  }

  std::vector<Int> w_;
  std::size_t k_;
  Int total_{0};
  Int max_item_{0};

  mutable Int cap_{0};
  mutable std::vector<Int> suffix_;
  mutable std::vector<Int> loads_;
  mutable std::vector<std::size_t> labels_;
  mutable std::set<std::pair<std::size_t, std::vector<Int>>> failed_;
};

template <class Int>
MmsResult solve_scaled(std::vector<Int> weights, const ScaledCosts& scaled, const std::vector<ItemId>& items, std::size_t k) {
  MinMaxPartitioner<Int> solver(std::move(weights), k);
  Int value = solver.min_max();
  std::vector<std::size_t> labels = solver.lexicographic_assignment(value);
  std::vector<ItemSet> bundles(k);
  for (std::size_t idx = 0; idx < items.size(); ++idx) bundles[labels[idx]].insert(items[idx]);
  ItemSet ground = ItemSet::of(items);
  return MmsResult{Rational(BigInt(value), scaled.scale), Partition(std::move(bundles), ground)};
}

}  // namespace detail

/// Exact MMS of the given cost vector over `items` with k bundles.
inline MmsResult mms(std::span<const Rational> costs, ItemSet items, std::size_t k, const OracleOptions& options = {}) {
  if (k < 1) throw InvalidArgument("mms needs k >= 1");
  if (items.span_end() > costs.size()) throw std::out_of_range("mms query refers to items beyond the cost vector");
  std::vector<ItemId> list = items.to_vector();
  if (list.size() > options.item_budget)
    throw BudgetExceeded("oracle budget exceeded: " + std::to_string(list.size()) + " items > budget " + std::to_string(options.item_budget));
  for (ItemId e : list)
    if (costs[e].sign() < 0) throw InvalidArgument("negative cost");

  detail::ScaledCosts scaled = detail::scale_to_integers(costs, list);
  if (detail::fits_int64(scaled.total)) {
    std::vector<std::int64_t> w;
    w.reserve(list.size());
    for (const BigInt& x : scaled.weights) w.push_back(static_cast<std::int64_t>(x));
    return detail::solve_scaled<std::int64_t>(std::move(w), scaled, list, k);
  }
  return detail::solve_scaled<BigInt>(scaled.weights, scaled, list, k);
}

inline MmsResult mms(const Instance& instance, AgentId agent, ItemSet items, std::size_t k, const OracleOptions& options = {}) {
  if (agent >= instance.n()) throw std::out_of_range("agent " + std::to_string(agent) + " out of range");
  return mms(instance.costs(agent), items, k, options);
}

inline Partition mms_partition(std::span<const Rational> costs, ItemSet items, std::size_t k, const OracleOptions& options = {}) {
  return mms(costs, items, k, options).witness;
}

inline Partition mms_partition(const Instance& instance, AgentId agent, ItemSet items, std::size_t k, const OracleOptions& options = {}) {
  return mms(instance, agent, items, k, options).witness;
}

/// Computes every agent's MMS over all items with n bundles and rescales.
inline NormalizedInstance normalize(const Instance& instance, const OracleOptions& options = {}) {
  std::vector<Rational> values;
  std::vector<Partition> witnesses;
  values.reserve(instance.n());
  witnesses.reserve(instance.n());
  for (AgentId i = 0; i < instance.n(); ++i) {
    MmsResult r = mms(instance, i, instance.items(), instance.n(), options);
    values.push_back(std::move(r.value));
    witnesses.push_back(std::move(r.witness));
  }
  return NormalizedInstance(instance, std::move(values), std::move(witnesses));
}

}  // namespace amms
