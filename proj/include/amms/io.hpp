#pragma once

// JSON encoding of instances, allocations, traces and verification reports.
// Rationals are written as integers when they are whole and fit in 64 bits,
// otherwise as "p/q" strings; both forms are accepted on input.

#include "amms/core.hpp"
#include "amms/matching.hpp"
#include "amms/mms_oracle.hpp"
#include "amms/solvers.hpp"
#include "amms/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace amms {

using json = nlohmann::json;

inline json rational_to_json(const Rational& r) {
  if (r.is_integer()) {
    const BigInt& v = r.numerator();
    if (v >= BigInt(INT64_MIN) && v <= BigInt(INT64_MAX)) return json(static_cast<std::int64_t>(v));
  }
  return json(r.str());
}

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  throw InvalidArgument("expected an integer or a \"p/q\" string, got " + j.dump());
}

inline json itemset_to_json(ItemSet s) { return json(s.to_vector()); }

inline ItemSet itemset_from_json(const json& j, std::size_t m) {
  if (!j.is_array()) throw InvalidArgument("bundle must be an array of item indices");
  ItemSet out;
  for (const auto& e : j) {
    if (!e.is_number_unsigned()) throw InvalidArgument("item index must be a nonnegative integer");
    auto id = e.get<std::size_t>();
    if (id >= m) throw InvalidArgument("item index " + std::to_string(id) + " out of range");
    if (out.contains(id)) throw InvalidArgument("item " + std::to_string(id) + " listed twice in a bundle");
    out.insert(id);
  }
  return out;
}

inline json to_json(const Instance& instance) {
  json costs = json::array();
  for (const auto& row : instance.matrix()) {
    json r = json::array();
    for (const auto& c : row) r.push_back(rational_to_json(c));
    costs.push_back(std::move(r));
  }
  return json{{"n", instance.n()}, {"m", instance.m()}, {"costs", std::move(costs)}};
}

inline Instance instance_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("costs"))
    throw InvalidArgument("instance JSON needs \"n\", \"m\" and \"costs\"");
  if (!j["n"].is_number_unsigned() || !j["m"].is_number_unsigned()) throw InvalidArgument("\"n\" and \"m\" must be nonnegative integers");
  const auto n = j["n"].get<std::size_t>();
  const auto m = j["m"].get<std::size_t>();
  if (!j["costs"].is_array()) throw InvalidArgument("\"costs\" must be an array of rows");
  std::vector<std::vector<Rational>> costs;
  for (const auto& row : j["costs"]) {
    if (!row.is_array()) throw InvalidArgument("cost row must be an array");
    std::vector<Rational> r;
    for (const auto& c : row) r.push_back(rational_from_json(c));
    costs.push_back(std::move(r));
  }
  return Instance(n, m, std::move(costs));
}

inline json to_json(const Allocation& a) {
  json bundles = json::array();
  for (ItemSet b : a.assignment) bundles.push_back(itemset_to_json(b));
  json ratios = json::array();
  for (const auto& r : a.ratios) ratios.push_back(r.str());
  return json{{"alpha", a.alpha.str()},
              {"flexible_agent", a.flexible_agent ? json(*a.flexible_agent) : json(nullptr)},
              {"bundles", std::move(bundles)},
              {"ratios", std::move(ratios)}};
}

/// Reads the bundles (and alpha/flexible agent when present). Ratios are left
/// to the verifier.
inline Allocation allocation_from_json(const json& j, std::size_t m) {
  if (!j.is_object() || !j.contains("bundles")) throw InvalidArgument("allocation JSON needs \"bundles\"");
  Allocation a;
  for (const auto& b : j["bundles"]) a.assignment.push_back(itemset_from_json(b, m));
  if (j.contains("alpha")) a.alpha = rational_from_json(j["alpha"]);
  if (j.contains("flexible_agent") && !j["flexible_agent"].is_null()) a.flexible_agent = j["flexible_agent"].get<std::size_t>();
  if (j.contains("ratios"))
    for (const auto& r : j["ratios"]) a.ratios.push_back(rational_from_json(r));
  return a;
}

inline json to_json(const Partition& p) {
  json out = json::array();
  for (ItemSet b : p.bundles()) out.push_back(itemset_to_json(b));
  return out;
}

inline json to_json(const FeasibilityGraph& g) {
  json edges = json::array();
  for (auto [a, b] : g.edges()) edges.push_back(json::array({a, b}));
  return json{{"agents", g.left}, {"bundles", g.right}, {"edges", std::move(edges)}};
}

inline json assignment_to_json(const Assignment& a) {
  json out = json::array();
  for (auto [agent, bundle] : a) out.push_back(json{{"agent", agent}, {"bundle", bundle}});
  return out;
}

inline json to_json(const ReductionStep& s) {
  json j{{"pivot", s.pivot},
         {"construction", s.partition_merging ? "partition_merging" : "capped_bag_filling"},
         {"partition", to_json(s.partition)},
         {"graph", to_json(s.graph)},
         {"assigned", assignment_to_json(s.assigned)},
         {"surviving_agents", s.surviving_agents},
         {"surviving_items", itemset_to_json(s.surviving_items)}};
  j["matching"] = s.matching ? assignment_to_json(*s.matching) : json(nullptr);
  j["violator"] = s.violator ? json{{"agents", s.violator->agents}, {"neighborhood", s.violator->neighborhood}} : json(nullptr);
  return j;
}

inline json to_json(const ReductionTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  return json{{"steps", std::move(steps)}};
}

/// Case tag, relabelings, graphs and (for n >= 5) the reduction steps.
inline json trace_to_json(const SolveResult& r) {
  json relabel = json::object();
  for (const auto& [k, v] : r.relabeling) relabel[k] = v;
  json graphs = json::array();
  for (const auto& g : r.graphs) graphs.push_back(to_json(g));
  json j{{"case", r.case_tag}, {"relabeling", std::move(relabel)}, {"graphs", std::move(graphs)}};
  j["reductions"] = r.trace ? to_json(*r.trace)["steps"] : json::array();
  return j;
}

inline json to_json(const MmsResult& r) { return json{{"value", r.value.str()}, {"partition", to_json(r.witness)}}; }

inline json to_json(const VerificationReport& r) {
  json ratios = json::array();
  for (const auto& x : r.ratios) ratios.push_back(x ? json(x->str()) : json("unbounded"));
  json mms = json::array();
  for (const auto& x : r.mms) mms.push_back(x.str());
  json costs = json::array();
  for (const auto& x : r.costs) costs.push_back(x.str());
  return json{{"passed", r.passed},
              {"alpha", r.alpha.str()},
              {"mms", std::move(mms)},
              {"costs", std::move(costs)},
              {"ratios", std::move(ratios)},
              {"flexible_agent", r.flexible_agent ? json(*r.flexible_agent) : json(nullptr)},
              {"agents_within_mms", r.agents_within_mms},
              {"proportional", r.proportional},
              {"reason", r.reason}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace amms
