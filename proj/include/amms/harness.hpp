#pragma once

// Instance generators and the randomized suites behind the CLI `suite`
// command and the acceptance tests.

#include "amms/core.hpp"
#include "amms/io.hpp"
#include "amms/matching.hpp"
#include "amms/mms_oracle.hpp"
#include "amms/procedures.hpp"
#include "amms/solvers.hpp"
#include "amms/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace amms {

enum class CostModel { Uniform, PaperLike, Adversarial };

inline std::string to_string(CostModel model) {
  switch (model) {
    case CostModel::Uniform: return "uniform";
    case CostModel::PaperLike: return "paper-like";
    case CostModel::Adversarial: return "adversarial";
  }
  return "uniform";
}

inline CostModel parse_cost_model(const std::string& name) {
  if (name == "uniform") return CostModel::Uniform;
  if (name == "paper-like" || name == "paperlike") return CostModel::PaperLike;
  if (name == "adversarial") return CostModel::Adversarial;
  throw InvalidArgument("unknown cost model '" + name + "'");
}

namespace detail {

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Rational small_denominator_cost(std::mt19937_64& rng) {
  static constexpr std::int64_t kDenominators[] = {1, 2, 3, 4, 5, 8, 10};
  const std::int64_t q = kDenominators[uniform_int(rng, 0, 6)];
  return Rational(BigInt(uniform_int(rng, 0, 2 * q)), BigInt(q));
}

/// Items are planted in n blocks: blocks 1..n-1 hold one big and one small
/// item each, block 0 holds the rest. The last agent values every block at
/// exactly 100. For agents 0..n-2 a big item costs 70-72, a small one 3-8
/// and the rest 1-2; while the small and block-0 items together stay below
/// 73, every big+small block is above their MMS.
inline Instance planted_candidate(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<std::size_t> block(m, 0);
  std::vector<int> kind(m, 0);  // 0 rest, 1 big, 2 small
  for (std::size_t b = 1; b < n; ++b) {
    block[2 * b - 1] = block[2 * b] = b;
    kind[2 * b - 1] = 1;
    kind[2 * b] = 2;
  }
  std::vector<std::size_t> order(m);
  for (std::size_t e = 0; e < m; ++e) order[e] = e;
  std::shuffle(order.begin(), order.end(), rng);
  {
    std::vector<std::size_t> b2(m);
    std::vector<int> k2(m);
    for (std::size_t e = 0; e < m; ++e) {
      b2[order[e]] = block[e];
      k2[order[e]] = kind[e];
    }
    block = std::move(b2);
    kind = std::move(k2);
  }
  std::vector<std::vector<Rational>> costs(n, std::vector<Rational>(m));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t e = 0; e < m; ++e) costs[i][e] = kind[e] == 1 ? uniform_int(rng, 70, 72) : kind[e] == 2 ? uniform_int(rng, 3, 8) : uniform_int(rng, 1, 2);
  for (std::size_t b = 0; b < n; ++b) {
    std::vector<std::size_t> members;
    for (std::size_t e = 0; e < m; ++e)
      if (block[e] == b) members.push_back(e);
    std::vector<std::int64_t> weights;
    std::int64_t total = 0;
    for (std::size_t x = 0; x < members.size(); ++x) total += weights.emplace_back(uniform_int(rng, 1, 10));
    for (std::size_t x = 0; x < members.size(); ++x) costs[n - 1][members[x]] = Rational(BigInt(100 * weights[x]), BigInt(total));
  }
  return Instance(n, m, std::move(costs));
}

/// Do agents 0 and 1 together find exactly one bundle of the last agent's
/// MMS partition feasible?
inline bool shares_single_bundle(const Instance& instance) {
  const NormalizedInstance normalized = normalize(instance);
  const FeasibilityGraph g = build_graph(ReducedInstanceView::full(normalized), normalized.witness(instance.n() - 1));
  std::vector<std::size_t> l = g.neighbors(0);
  for (std::size_t b : g.neighbors(1))
    if (std::find(l.begin(), l.end(), b) == l.end()) l.push_back(b);
  return l.size() == 1;
}

}  // namespace detail

/// Deterministic random instance. The adversarial model plants costs so that
/// agents 0 and 1 share a single feasible bundle of the last agent's MMS
/// partition (checked on the actual partition, redrawing until it holds); it
/// needs n >= 3 and m >= 2n - 1.
inline Instance gen_random(std::size_t n, std::size_t m, CostModel model, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("gen_random needs n >= 1");
  if (m > ItemSet::kCapacity) throw InvalidArgument("gen_random supports at most 64 items");
  auto rng = detail::make_rng(seed, static_cast<std::uint64_t>(model) + 1);
  if (model == CostModel::Adversarial) {
    if (n < 3 || m + 1 < 2 * n) throw InvalidArgument("adversarial model needs n >= 3 and m >= 2n - 1");
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Instance candidate = detail::planted_candidate(n, m, rng);
      if (detail::shares_single_bundle(candidate)) return candidate;
    }
    throw InvalidArgument("adversarial model found no instance for n=" + std::to_string(n) + ", m=" + std::to_string(m));
  }
  std::vector<std::vector<Rational>> costs(n, std::vector<Rational>(m));
  for (auto& row : costs)
    for (auto& c : row) c = model == CostModel::Uniform ? Rational(detail::uniform_int(rng, 0, 100)) : detail::small_denominator_cost(rng);
  return Instance(n, m, std::move(costs));
}

/// Three agents, eight items: agents 0 and 1 see five items of 3/8, two of
/// 1/4 and one of 5/8; agent 2 sees two items of 1/2 and six of 1/3. Every
/// MMS is 1 and the three-agent solver leaves agent 0 at exactly 9/8.
inline Instance gen_paper_example() {
  auto r = [](std::int64_t p, std::int64_t q) { return Rational(BigInt(p), BigInt(q)); };
  std::vector<Rational> a = {r(3, 8), r(3, 8), r(3, 8), r(3, 8), r(3, 8), r(1, 4), r(1, 4), r(5, 8)};
  std::vector<Rational> c = {r(1, 2), r(1, 2), r(1, 3), r(1, 3), r(1, 3), r(1, 3), r(1, 3), r(1, 3)};
  return Instance(3, 8, {a, a, c});
}

// ---------------------------------------------------------------------------
// Lemma cases. Each returns the instance it drew plus a failure message, or
// no message when the property held.

struct LemmaCase {
  std::string lemma;
  Instance instance;
  std::optional<std::string> failure;
};

namespace detail {

/// Drops random items until `agent`'s normalized cost of the rest is at most
/// (or strictly below) k.
inline ItemSet shrink_to_budget(const NormalizedInstance& normalized, AgentId agent, std::size_t k, bool strict, std::mt19937_64& rng) {
  ItemSet items = normalized.base().items();
  const Rational limit(static_cast<std::int64_t>(k));
  auto over = [&] {
    Rational c = bundle_cost(normalized, agent, items);
    return strict ? c >= limit : c > limit;
  };
  while (!items.empty() && over()) {
    auto list = items.to_vector();
    items.erase(list[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(list.size()) - 1))]);
  }
  return items;
}

inline std::vector<AgentId> random_agents_with(std::size_t n, std::size_t k, AgentId agent, std::mt19937_64& rng) {
  std::vector<AgentId> others;
  for (AgentId a = 0; a < n; ++a)
    if (a != agent) others.push_back(a);
  std::shuffle(others.begin(), others.end(), rng);
  others.resize(k - 1);
  others.push_back(agent);
  return others;
}

inline Rational scale_total_to(std::vector<Rational>& costs, const Rational& cap, const Rational& factor) {
  Rational total;
  for (const auto& c : costs) total += c;
  if (total > cap) {
    for (auto& c : costs) c = c * cap / total * factor;
    total = cap * factor;
  }
  return total;
}

}  // namespace detail

/// Load-balancing into n' bundles with total cost <= n' and positive costs:
/// removing any item leaves every bundle below 1.
inline LemmaCase lemma_load_balancing(std::mt19937_64& rng) {
  const auto bundles = static_cast<std::size_t>(detail::uniform_int(rng, 1, 6));
  const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 0, 10));
  std::vector<Rational> costs;
  for (std::size_t e = 0; e < m; ++e) costs.emplace_back(BigInt(detail::uniform_int(rng, 1, 20)), BigInt(detail::uniform_int(rng, 1, 6)));
  const Rational factor = detail::uniform_int(rng, 0, 1) ? Rational(1) : Rational(BigInt(detail::uniform_int(rng, 1, 9)), BigInt(10));
  detail::scale_total_to(costs, Rational(static_cast<std::int64_t>(bundles)), factor);
  LemmaCase out{"load-balancing", Instance(1, m, {costs}), std::nullopt};
  Partition p = load_balancing(ItemSet::range(m), bundles, costs);
  for (ItemSet b : p.bundles())
    for (ItemId e : b.to_vector()) {
      ItemSet rest = b;
      rest.erase(e);
      if (sum_costs(costs, rest) >= Rational(1)) out.failure = "bundle minus item " + std::to_string(e) + " costs " + sum_costs(costs, rest).str();
    }
  return out;
}

/// Load-balancing into two bundles with items <= 1 and total <= 2 gives a
/// (4/3,1)-partition.
inline LemmaCase lemma_four_thirds_split(std::mt19937_64& rng) {
  const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 0, 10));
  std::vector<Rational> costs;
  for (std::size_t e = 0; e < m; ++e) {
    const std::int64_t q = detail::uniform_int(rng, 1, 12);
    costs.emplace_back(BigInt(detail::uniform_int(rng, 0, q)), BigInt(q));
  }
  const Rational factor = detail::uniform_int(rng, 0, 1) ? Rational(1) : Rational(BigInt(detail::uniform_int(rng, 1, 9)), BigInt(10));
  detail::scale_total_to(costs, Rational(2), factor);
  LemmaCase out{"four-thirds-split", Instance(1, m, {costs}), std::nullopt};
  Partition p = load_balancing(ItemSet::range(m), 2, costs);
  Rational a = sum_costs(costs, p[0]);
  Rational b = sum_costs(costs, p[1]);
  if (max(a, b) > Rational(4, 3) || min(a, b) > Rational(1)) out.failure = "split costs " + a.str() + " and " + b.str();
  return out;
}

/// Capped bag filling on a random view whose total is at most k: last bundle
/// <= k^2/(2k-1), at most k-1 leftovers, every other bundle <= 1.
inline LemmaCase lemma_capped_bag_filling(std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(detail::uniform_int(rng, 2, 7));
  const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 0, 11));
  Instance instance = gen_random(n, m, detail::uniform_int(rng, 0, 1) ? CostModel::Uniform : CostModel::PaperLike, rng());
  LemmaCase out{"capped-bag-filling", instance, std::nullopt};
  const NormalizedInstance normalized = normalize(instance);
  const auto agent = static_cast<AgentId>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
  const auto k = static_cast<std::size_t>(detail::uniform_int(rng, 1, static_cast<std::int64_t>(n)));
  ItemSet items = detail::shrink_to_budget(normalized, agent, k, false, rng);
  ReducedInstanceView view(normalized, detail::random_agents_with(n, k, agent, rng), items);
  CappedBagFilling r = capped_bag_filling_detailed(view, agent);
  const auto kk = static_cast<std::int64_t>(k);
  const Rational bound(BigInt(kk * kk), BigInt(2 * kk - 1));
  const Rational last = bundle_cost(view, agent, r.partition[k - 1]);
  if (r.leftovers.size() + 1 > k) out.failure = std::to_string(r.leftovers.size()) + " leftovers for k=" + std::to_string(k);
  if (last > bound) out.failure = "last bundle " + last.str() + " above " + bound.str();
  for (std::size_t j = 0; j + 1 < k; ++j)
    if (bundle_cost(view, agent, r.partition[j]) > Rational(1)) out.failure = "bundle " + std::to_string(j) + " above 1";
  return out;
}

/// Partition merging on a view with total strictly below k: merged bundle
/// below (-k^2 + (1+n)k)/n, every other bundle <= 1, and below gamma once
/// k > floor((n+1)/2).
inline LemmaCase lemma_partition_merging(std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(detail::uniform_int(rng, 2, 7));
  const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 0, 11));
  Instance instance = gen_random(n, m, detail::uniform_int(rng, 0, 1) ? CostModel::Uniform : CostModel::PaperLike, rng());
  LemmaCase out{"partition-merging", instance, std::nullopt};
  const NormalizedInstance normalized = normalize(instance);
  const auto agent = static_cast<AgentId>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(n) - 1));
  const auto k = static_cast<std::size_t>(detail::uniform_int(rng, 1, static_cast<std::int64_t>(n)));
  ItemSet items = detail::shrink_to_budget(normalized, agent, k, true, rng);
  ReducedInstanceView view(normalized, detail::random_agents_with(n, k, agent, rng), items);
  Partition p = partition_merging(normalized, view, agent);
  const auto kk = static_cast<std::int64_t>(k);
  const auto nn = static_cast<std::int64_t>(n);
  const Rational bound(BigInt(-kk * kk + (1 + nn) * kk), BigInt(nn));
  const Rational merged = bundle_cost(view, agent, p[k - 1]);
  if (!(merged < bound)) out.failure = "merged bundle " + merged.str() + " not below " + bound.str();
  if (uses_partition_merging(n, k) && !(merged < guarantee_for(n)) && n >= 5) out.failure = "merged bundle " + merged.str() + " not below gamma";
  for (std::size_t j = 0; j + 1 < k; ++j)
    if (bundle_cost(view, agent, p[j]) > Rational(1)) out.failure = "bundle " + std::to_string(j) + " above 1";
  return out;
}

/// Removing two items whose joint cost reaches the MMS never raises the MMS
/// with one bundle fewer.
inline LemmaCase lemma_two_item_reduction(std::mt19937_64& rng) {
  while (true) {
    const auto n = static_cast<std::size_t>(detail::uniform_int(rng, 2, 4));
    const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 2, 9));
    std::vector<Rational> costs;
    for (std::size_t e = 0; e < m; ++e) costs.emplace_back(detail::uniform_int(rng, 0, 100));
    const auto e1 = static_cast<ItemId>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(m) - 2));
    const auto e2 = static_cast<ItemId>(detail::uniform_int(rng, static_cast<std::int64_t>(e1) + 1, static_cast<std::int64_t>(m) - 1));
    costs[e1] += detail::uniform_int(rng, 0, 100);
    costs[e2] += detail::uniform_int(rng, 0, 100);
    const ItemSet all = ItemSet::range(m);
    const Rational before = mms(costs, all, n).value;
    if (costs[e1] + costs[e2] < before) continue;
    LemmaCase out{"two-item-reduction", Instance(1, m, {costs}), std::nullopt};
    const Rational after = mms(costs, all - ItemSet{e1, e2}, n - 1).value;
    if (after > before) out.failure = "MMS rose from " + before.str() + " to " + after.str();
    return out;
  }
}

inline const std::vector<std::pair<std::string, LemmaCase (*)(std::mt19937_64&)>>& lemma_generators() {
  static const std::vector<std::pair<std::string, LemmaCase (*)(std::mt19937_64&)>> all = {
      {"load-balancing", &lemma_load_balancing},
      {"four-thirds-split", &lemma_four_thirds_split},
      {"capped-bag-filling", &lemma_capped_bag_filling},
      {"partition-merging", &lemma_partition_merging},
      {"two-item-reduction", &lemma_two_item_reduction},
  };
  return all;
}

// ---------------------------------------------------------------------------
// Suites.

struct SuiteConfig {
  /// Any of: oracle-cross-check, lemma-invariants, solver-by-n, tightness.
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  /// Instances per suite (per n for solver-by-n, per lemma for lemma-invariants).
  std::size_t count = 100;
  std::vector<std::size_t> ns{3, 4, 5};
  std::size_t max_m = 9;
  /// Cost models cycled through by solver-by-n; empty means all that apply.
  std::vector<CostModel> models;
  std::size_t threads = 1;
  std::string failures_dir = "failures";
  OracleOptions oracle;
};

struct SuiteSummary {
  std::string suite;
  std::size_t instances = 0;
  std::size_t failures = 0;
  /// Largest per-agent ratio seen per n (solver suites).
  std::map<std::size_t, Rational> max_ratio;
  std::map<std::string, std::size_t> cases;
  std::size_t reduction_steps = 0;
  std::size_t max_iterations = 0;
  double seconds = 0;
};

struct SuiteReport {
  std::vector<SuiteSummary> suites;
};

/// A suite check failed; the offending instance was written to `artifact`.
class SuiteFailure : public Error {
 public:
  SuiteFailure(const std::string& what, std::string artifact) : Error(what), artifact_(std::move(artifact)) {}
  const std::string& artifact() const { return artifact_; }

 private:
  std::string artifact_;
};

inline json to_json(const SuiteSummary& s) {
  json ratios = json::object();
  for (const auto& [n, r] : s.max_ratio) ratios[std::to_string(n)] = r.str();
  return json{{"suite", s.suite},
              {"instances", s.instances},
              {"failures", s.failures},
              {"max_ratio", std::move(ratios)},
              {"cases", s.cases},
              {"reduction_steps", s.reduction_steps},
              {"max_iterations", s.max_iterations},
              {"seconds", s.seconds}};
}

inline json to_json(const SuiteReport& r) {
  json out = json::array();
  for (const auto& s : r.suites) out.push_back(to_json(s));
  return out;
}

inline std::string format_table(const SuiteReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(20) << "suite" << std::setw(11) << "instances" << std::setw(10) << "failures" << std::setw(10) << "seconds"
     << "max ratio by n\n";
  for (const auto& s : r.suites) {
    std::string ratios;
    for (const auto& [n, v] : s.max_ratio) ratios += (ratios.empty() ? "" : " ") + std::to_string(n) + ":" + v.str();
    std::ostringstream secs;
    secs << std::fixed << std::setprecision(2) << s.seconds;
    os << std::setw(20) << s.suite << std::setw(11) << s.instances << std::setw(10) << s.failures << std::setw(10) << secs.str()
       << (ratios.empty() ? "-" : ratios) << '\n';
  }
  return os.str();
}

namespace detail {

struct CaseOutcome {
  std::optional<std::string> failure;
  std::optional<Instance> instance;
  json trace;
  std::size_t n = 0;
  std::optional<Rational> ratio;
  std::string tag;
  std::size_t steps = 0;
};

/// Runs `job(i)` for i in [0, count) on a worker pool; stops handing out work
/// after the first failure.
inline std::vector<CaseOutcome> run_cases(std::size_t count, std::size_t threads, const std::function<CaseOutcome(std::size_t)>& job) {
  std::vector<CaseOutcome> results(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < count && !stop; i = next++) {
      try {
        results[i] = job(i);
      } catch (const std::exception& e) {
        results[i].failure = e.what();
      }
      if (results[i].failure) stop = true;
    }
  };
  const std::size_t pool = std::max<std::size_t>(1, std::min(threads, count));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < pool; ++t) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  }
  return results;
}

inline std::string write_failure(const SuiteConfig& config, const std::string& suite, std::size_t index, const CaseOutcome& outcome) {
  namespace fs = std::filesystem;
  if (!outcome.instance) return {};
  fs::create_directories(config.failures_dir);
  const std::string stem = (fs::path(config.failures_dir) / (suite + "-seed" + std::to_string(config.seed) + "-" + std::to_string(index))).string();
  write_json_file(stem + ".instance.json", to_json(*outcome.instance));
  json trace = outcome.trace.is_null() ? json::object() : outcome.trace;
  trace["suite"] = suite;
  trace["seed"] = config.seed;
  trace["index"] = index;
  trace["error"] = *outcome.failure;
  write_json_file(stem + ".trace.json", trace);
  return stem + ".instance.json";
}

/// Checks one solver output independently of the solver's own normalization.
inline CaseOutcome check_solver(const Instance& instance, const OracleOptions& oracle) {
  CaseOutcome out;
  out.instance = instance;
  out.n = instance.n();
  SolveResult r = solve(instance, SolveOptions{oracle, false});
  out.trace = trace_to_json(r);
  out.tag = r.case_tag;
  const Rational alpha = guarantee_for(instance.n());
  VerificationReport report = verify_allocation(instance, r.allocation, alpha, oracle);
  if (!report.passed) {
    out.failure = "verification failed: " + report.reason;
    return out;
  }
  Rational worst;
  for (const auto& x : report.ratios) worst = max(worst, *x);
  out.ratio = worst;
  if (r.trace) {
    const auto& steps = r.trace->steps;
    out.steps = steps.size();
    if (steps.size() > instance.n()) out.failure = "reduction loop ran " + std::to_string(steps.size()) + " iterations";
    std::size_t previous = instance.n();
    for (const auto& step : steps) {
      if (step.matching) continue;
      if (step.surviving_agents.size() >= previous) out.failure = "reduction did not remove an agent";
      previous = step.surviving_agents.size();
      const Rational k(static_cast<std::int64_t>(step.surviving_agents.size()));
      for (AgentId a : step.surviving_agents)
        if (bundle_cost(instance, a, step.surviving_items) > k * report.mms[a])
          out.failure = "agent " + std::to_string(a) + " violates the valid-reduction inequality";
    }
  }
  return out;
}

inline std::size_t max_m_for_budget(std::size_t n, std::size_t max_m, double budget) {
  std::size_t m = 0;
  double states = 1;
  while (m < max_m && states * static_cast<double>(n) <= budget) {
    states *= static_cast<double>(n);
    ++m;
  }
  return m;
}

}  // namespace detail

/// Runs the configured suites in order. Each summary is also written as one
/// JSON line to `lines` when given. The first failing case aborts the run
/// with SuiteFailure after its instance and trace are saved.
inline SuiteReport run_suite(const SuiteConfig& config, std::ostream* lines = nullptr) {
  SuiteReport report;
  std::uint64_t stream = 0;
  for (const std::string& suite : config.suites) {
    ++stream;
    const auto start = std::chrono::steady_clock::now();
    SuiteSummary summary;
    summary.suite = suite;
    std::vector<std::pair<std::string, std::vector<detail::CaseOutcome>>> batches;

    if (suite == "oracle-cross-check") {
      auto job = [&](std::size_t i) {
        auto rng = detail::make_rng(config.seed, stream, i);
        const auto m = static_cast<std::size_t>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(std::min<std::size_t>(config.max_m, 8))));
        const auto model = i % 2 == 0 ? CostModel::Uniform : CostModel::PaperLike;
        Instance instance = gen_random(1, m, model, rng());
        detail::CaseOutcome out;
        out.instance = instance;
        ItemSet items(rng() & ItemSet::range(m).bits());
        const auto k = static_cast<std::size_t>(detail::uniform_int(rng, 1, 4));
        MmsResult fast = mms(instance.costs(0), items, k, config.oracle);
        Rational slow = naive_mms_value(instance.costs(0), items, k);
        out.trace = json{{"items", itemset_to_json(items)}, {"k", k}, {"oracle", to_json(fast)}, {"naive", slow.str()}};
        if (fast.value != slow) out.failure = "oracle " + fast.value.str() + " != naive " + slow.str();
        Rational worst;
        for (ItemSet b : fast.witness.bundles()) worst = max(worst, sum_costs(instance.costs(0), b));
        if (fast.witness.size() != k || fast.witness.ground() != items || worst != fast.value) out.failure = "witness does not attain the value";
        return out;
      };
      batches.emplace_back(suite, detail::run_cases(config.count, config.threads, job));
    } else if (suite == "lemma-invariants") {
      std::uint64_t sub = 0;
      for (const auto& [name, gen] : lemma_generators()) {
        ++sub;
        auto job = [&, gen = gen, sub](std::size_t i) {
          auto rng = detail::make_rng(config.seed, stream * 16 + sub, i);
          LemmaCase c = gen(rng);
          detail::CaseOutcome out;
          out.instance = c.instance;
          out.failure = c.failure;
          out.tag = c.lemma;
          return out;
        };
        batches.emplace_back(suite + "-" + name, detail::run_cases(config.count, config.threads, job));
        summary.cases[name] = config.count;
        if (std::any_of(batches.back().second.begin(), batches.back().second.end(), [](const auto& o) { return o.failure.has_value(); })) break;
      }
    } else if (suite == "solver-by-n") {
      for (std::size_t n : config.ns) {
        std::vector<CostModel> models = config.models;
        if (models.empty()) models = {CostModel::Uniform, CostModel::PaperLike, CostModel::Adversarial};
        auto job = [&, n](std::size_t i) {
          auto rng = detail::make_rng(config.seed, stream * 64 + n, i);
          CostModel model = models[i % models.size()];
          std::size_t lo = 0;
          if (model == CostModel::Adversarial) {
            lo = 2 * n - 1;
            if (n < 3 || lo > config.max_m) model = CostModel::Uniform;
          }
          if (model != CostModel::Adversarial) lo = 0;
          const auto m = static_cast<std::size_t>(detail::uniform_int(rng, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(config.max_m)));
          Instance instance = gen_random(n, m, model, rng());
          return detail::check_solver(instance, config.oracle);
        };
        batches.emplace_back(suite + "-n" + std::to_string(n), detail::run_cases(config.count, config.threads, job));
        if (std::any_of(batches.back().second.begin(), batches.back().second.end(), [](const auto& o) { return o.failure.has_value(); })) break;
      }
    } else if (suite == "tightness") {
      auto job = [&](std::size_t i) {
        detail::CaseOutcome out;
        if (i == 0) {
          out = detail::check_solver(gen_paper_example(), config.oracle);
          if (!out.failure && out.ratio != Rational(9, 8)) out.failure = "tight example ratio " + (out.ratio ? out.ratio->str() : "?") + " instead of 9/8";
          return out;
        }
        auto rng = detail::make_rng(config.seed, stream, i);
        const std::size_t n = config.ns.empty() ? 3 : config.ns[i % config.ns.size()];
        const std::size_t m = static_cast<std::size_t>(detail::uniform_int(rng, 0, static_cast<std::int64_t>(detail::max_m_for_budget(n, config.max_m, 2e6))));
        Instance instance = gen_random(n, m, i % 2 == 0 ? CostModel::Uniform : CostModel::PaperLike, rng());
        out = detail::check_solver(instance, config.oracle);
        if (out.failure) return out;
        const Rational best = brute_force_best_alpha(instance, 2'000'000, config.oracle);
        out.trace["brute_force_best_alpha"] = best.str();
        if (best > max(Rational(1), *out.ratio)) out.failure = "solver ratio " + out.ratio->str() + " beats the exhaustive optimum " + best.str();
        if (best > guarantee_for(n)) out.failure = "optimum " + best.str() + " exceeds the guarantee";
        return out;
      };
      batches.emplace_back(suite, detail::run_cases(config.count, config.threads, job));
    } else {
      throw InvalidArgument("unknown suite '" + suite + "'");
    }

    for (const auto& [label, outcomes] : batches) {
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        if (o.failure) {
          ++summary.failures;
          summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          report.suites.push_back(summary);
          if (lines) *lines << to_json(summary).dump() << '\n';
          const std::string artifact = detail::write_failure(config, label, i, o);
          throw SuiteFailure(label + " case " + std::to_string(i) + " (seed " + std::to_string(config.seed) + "): " + *o.failure +
                                 (artifact.empty() ? "" : "; saved to " + artifact),
                             artifact);
        }
        if (o.instance || !o.tag.empty()) ++summary.instances;
        if (o.ratio) {
          auto it = summary.max_ratio.find(o.n);
          if (it == summary.max_ratio.end())
            summary.max_ratio.emplace(o.n, *o.ratio);
          else
            it->second = max(it->second, *o.ratio);
        }
        if (suite != "lemma-invariants" && !o.tag.empty()) ++summary.cases[o.tag];
        summary.reduction_steps += o.steps;
        summary.max_iterations = std::max(summary.max_iterations, o.steps);
      }
    }
    summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (lines) *lines << to_json(summary).dump() << '\n';
    report.suites.push_back(std::move(summary));
  }
  return report;
}

}  // namespace amms
