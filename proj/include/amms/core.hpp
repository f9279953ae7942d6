#pragma once

#include "amms/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace amms {

// Error hierarchy. Every failure the library reports is one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A computation would exceed its configured enumeration budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

/// A guarantee that should hold by construction did not; always a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

using AgentId = std::size_t;
using ItemId = std::size_t;

inline void require(bool condition, const std::string& what) {
  if (!condition) throw InvariantViolation(what);
}

/// Set of item indices, stored as a 64-bit mask. Instances are therefore
/// limited to 64 items, far beyond what the exact MMS oracle can handle.
class ItemSet {
 public:
  static constexpr std::size_t kCapacity = 64;

  constexpr ItemSet() = default;
  constexpr explicit ItemSet(std::uint64_t bits) : bits_(bits) {}
  ItemSet(std::initializer_list<ItemId> items) {
    for (ItemId e : items) insert(e);
  }

  static ItemSet range(std::size_t m) {
    if (m > kCapacity) throw InvalidArgument("item count exceeds " + std::to_string(kCapacity));
    return ItemSet(m == kCapacity ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1));
  }
  template <class Range>
  static ItemSet of(const Range& items) {
    ItemSet out;
    for (auto e : items) out.insert(static_cast<ItemId>(e));
    return out;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  bool contains(ItemId e) const { return e < kCapacity && ((bits_ >> e) & 1U); }
  void insert(ItemId e) {
    if (e >= kCapacity) throw InvalidArgument("item index " + std::to_string(e) + " out of range");
    bits_ |= std::uint64_t{1} << e;
  }
  void erase(ItemId e) {
    if (e < kCapacity) bits_ &= ~(std::uint64_t{1} << e);
  }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  bool empty() const { return bits_ == 0; }
  bool is_subset_of(ItemSet other) const { return (bits_ & ~other.bits_) == 0; }
  bool disjoint(ItemSet other) const { return (bits_ & other.bits_) == 0; }
  /// Highest member plus one; zero for the empty set.
  std::size_t span_end() const { return bits_ == 0 ? 0 : 64 - static_cast<std::size_t>(std::countl_zero(bits_)); }

  /// Members in ascending order.
  std::vector<ItemId> to_vector() const {
    std::vector<ItemId> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<ItemId>(std::countr_zero(b)));
    return out;
  }

  friend ItemSet operator|(ItemSet a, ItemSet b) { return ItemSet(a.bits_ | b.bits_); }
  friend ItemSet operator&(ItemSet a, ItemSet b) { return ItemSet(a.bits_ & b.bits_); }
  friend ItemSet operator-(ItemSet a, ItemSet b) { return ItemSet(a.bits_ & ~b.bits_); }
  ItemSet& operator|=(ItemSet o) { bits_ |= o.bits_; return *this; }
  ItemSet& operator-=(ItemSet o) { bits_ &= ~o.bits_; return *this; }
  friend bool operator==(ItemSet, ItemSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

/// n agents, m items, nonnegative exact costs. Indices are stable identities.
class Instance {
 public:
  Instance() = default;
  Instance(std::size_t n, std::size_t m, std::vector<std::vector<Rational>> costs)
      : n_(n), m_(m), costs_(std::move(costs)) {
    if (n_ < 1) throw InvalidArgument("instance needs at least one agent");
    if (m_ > ItemSet::kCapacity) throw InvalidArgument("instance has more than 64 items");
    if (costs_.size() != n_) throw InvalidArgument("cost matrix has " + std::to_string(costs_.size()) + " rows, expected " + std::to_string(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      if (costs_[i].size() != m_) throw InvalidArgument("cost row " + std::to_string(i) + " has wrong length");
      for (const auto& c : costs_[i])
        if (c.sign() < 0) throw InvalidArgument("negative cost for agent " + std::to_string(i));
    }
  }

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  ItemSet items() const { return ItemSet::range(m_); }
  const Rational& cost(AgentId i, ItemId e) const { return costs_.at(i).at(e); }
  std::span<const Rational> costs(AgentId i) const { return costs_.at(i); }
  const std::vector<std::vector<Rational>>& matrix() const { return costs_; }

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::vector<std::vector<Rational>> costs_;
};

/// Ordered list of pairwise disjoint bundles whose union is `ground`.
/// Empty bundles are allowed.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<ItemSet> bundles, ItemSet ground) : bundles_(std::move(bundles)), ground_(ground) {
    ItemSet seen;
    for (ItemSet b : bundles_) {
      if (!seen.disjoint(b)) throw InvalidArgument("partition bundles overlap");
      seen |= b;
    }
    if (seen != ground_) throw InvalidArgument("partition bundles do not cover the ground set");
  }
  explicit Partition(std::vector<ItemSet> bundles) : Partition(bundles, union_of(bundles)) {}

  std::size_t size() const { return bundles_.size(); }
  const ItemSet& operator[](std::size_t j) const { return bundles_.at(j); }
  const std::vector<ItemSet>& bundles() const { return bundles_; }
  ItemSet ground() const { return ground_; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  static ItemSet union_of(const std::vector<ItemSet>& bundles) {
    ItemSet u;
    for (ItemSet b : bundles) u |= b;
    return u;
  }

  std::vector<ItemSet> bundles_;
  ItemSet ground_;
};

inline Rational sum_costs(std::span<const Rational> costs, ItemSet bundle) {
  if (bundle.span_end() > costs.size()) throw std::out_of_range("bundle refers to item " + std::to_string(bundle.span_end() - 1) + " beyond " + std::to_string(costs.size()) + " items");
  Rational total;
  for (ItemId e : bundle.to_vector()) total += costs[e];
  return total;
}

inline Rational bundle_cost(const Instance& instance, AgentId agent, ItemSet bundle) {
  if (agent >= instance.n()) throw std::out_of_range("agent " + std::to_string(agent) + " out of range");
  return sum_costs(instance.costs(agent), bundle);
}

/// Costs rescaled so that every agent's MMS over the full instance is one.
///
/// Agents whose MMS is zero have only zero-cost items (the MMS is at least the
/// largest item cost), so their normalized costs are all zero.
class NormalizedInstance {
 public:
  NormalizedInstance() = default;
  NormalizedInstance(Instance base, std::vector<Rational> mms, std::vector<Partition> witnesses)
      : base_(std::move(base)), mms_(std::move(mms)), witnesses_(std::move(witnesses)) {
    const std::size_t n = base_.n();
    if (mms_.size() != n || witnesses_.size() != n) throw InvalidArgument("normalization data has wrong agent count");
    normalized_.resize(n);
    for (AgentId i = 0; i < n; ++i) {
      normalized_[i].reserve(base_.m());
      for (ItemId e = 0; e < base_.m(); ++e) {
        const Rational& c = base_.cost(i, e);
        if (mms_[i].is_zero()) {
          if (!c.is_zero()) throw DegenerateInstance("agent " + std::to_string(i) + " has MMS 0 but a positive-cost item");
          normalized_[i].emplace_back(0);
        } else {
          normalized_[i].push_back(c / mms_[i]);
        }
      }
      Rational total = sum_costs(normalized_[i], base_.items());
      require(total <= Rational(static_cast<std::int64_t>(n)), "normalized total exceeds n for agent " + std::to_string(i));
      for (const auto& c : normalized_[i]) require(c <= Rational(1), "normalized item cost exceeds 1 for agent " + std::to_string(i));
      const Partition& w = witnesses_[i];
      require(w.size() == n && w.ground() == base_.items(), "MMS witness of agent " + std::to_string(i) + " is not an n-partition");
      for (ItemSet b : w.bundles())
        require(sum_costs(normalized_[i], b) <= Rational(1), "MMS witness bundle exceeds the MMS for agent " + std::to_string(i));
    }
  }

  const Instance& base() const { return base_; }
  std::size_t n() const { return base_.n(); }
  std::size_t m() const { return base_.m(); }
  const Rational& mms(AgentId i) const { return mms_.at(i); }
  const std::vector<Rational>& mms_values() const { return mms_; }
  /// The agent's MMS partition of the original instance (n bundles).
  const Partition& witness(AgentId i) const { return witnesses_.at(i); }
  const Rational& cost(AgentId i, ItemId e) const { return normalized_.at(i).at(e); }
  std::span<const Rational> costs(AgentId i) const { return normalized_.at(i); }

 private:
  Instance base_;
  std::vector<Rational> mms_;
  std::vector<Partition> witnesses_;
  std::vector<std::vector<Rational>> normalized_;
};

inline Rational bundle_cost(const NormalizedInstance& normalized, AgentId agent, ItemSet bundle) {
  if (agent >= normalized.n()) throw std::out_of_range("agent " + std::to_string(agent) + " out of range");
  return sum_costs(normalized.costs(agent), bundle);
}

/// The agents still waiting for a bundle and the items not yet allocated.
/// Costs seen through a view are normalized.
class ReducedInstanceView {
 public:
  ReducedInstanceView(const NormalizedInstance& normalized, std::vector<AgentId> agents, ItemSet items)
      : normalized_(&normalized), agents_(std::move(agents)), items_(items) {
    std::sort(agents_.begin(), agents_.end());
    if (std::adjacent_find(agents_.begin(), agents_.end()) != agents_.end()) throw InvalidArgument("view lists an agent twice");
    for (AgentId a : agents_)
      if (a >= normalized.n()) throw std::out_of_range("view agent out of range");
    if (!items_.is_subset_of(normalized.base().items())) throw std::out_of_range("view items out of range");
  }

  /// The whole instance as a view.
  static ReducedInstanceView full(const NormalizedInstance& normalized) {
    std::vector<AgentId> all(normalized.n());
    for (AgentId i = 0; i < all.size(); ++i) all[i] = i;
    return ReducedInstanceView(normalized, std::move(all), normalized.base().items());
  }

  const NormalizedInstance& normalized() const { return *normalized_; }
  const std::vector<AgentId>& agents() const { return agents_; }
  ItemSet items() const { return items_; }
  std::size_t k() const { return agents_.size(); }
  bool has_agent(AgentId a) const { return std::binary_search(agents_.begin(), agents_.end(), a); }

  /// c_i(remaining) <= |remaining agents| for every remaining agent.
  bool is_valid() const {
    const Rational k_r(static_cast<std::int64_t>(k()));
    for (AgentId a : agents_)
      if (bundle_cost(*normalized_, a, items_) > k_r) return false;
    return true;
  }

 private:
  const NormalizedInstance* normalized_;
  std::vector<AgentId> agents_;
  ItemSet items_;
};

inline Rational bundle_cost(const ReducedInstanceView& view, AgentId agent, ItemSet bundle) {
  return bundle_cost(view.normalized(), agent, bundle);
}

/// A complete assignment of the instance's items to agents.
struct Allocation {
  std::vector<ItemSet> assignment;
  /// The agent allowed up to alpha times her MMS; empty when every agent is
  /// within her MMS by construction.
  std::optional<AgentId> flexible_agent;
  Rational alpha{1};
  /// Normalized cost of each agent's bundle (cost / MMS, 0 for zero-MMS agents).
  std::vector<Rational> ratios;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Flexible-agent bound: 1 for n <= 2, 9/8, 4/3, then (n+1)^2 / 4n.
inline Rational guarantee_for(std::size_t n) {
  if (n <= 2) return Rational(1);
  if (n == 3) return Rational(9, 8);
  if (n == 4) return Rational(4, 3);
  const auto nn = static_cast<std::int64_t>(n);
  return Rational(BigInt((nn + 1) * (nn + 1)), BigInt(4 * nn));
}

}  // namespace amms
