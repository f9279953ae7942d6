#include "amms/amms.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using amms::json;

enum Exit : int { kOk = 0, kFailed = 1, kError = 2 };

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << j.dump(2) << '\n';
  else
    amms::write_json_file(path, j);
}

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::size_t start = 0;
    while (start <= item.size()) {
      std::size_t comma = item.find(',', start);
      if (comma == std::string::npos) comma = item.size();
      if (comma > start) out.push_back(item.substr(start, comma - start));
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"All-but-one maximin-share allocations of chores"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  bool as_json = false;
  app.add_option("--seed", seed, "Random seed")->capture_default_str();
  app.add_flag("--json", as_json, "Machine-readable output");

  std::string input;
  std::string output;

  auto* solve = app.add_subcommand("solve", "Compute an AMMS allocation");
  std::string trace_path;
  std::string graph_path;
  solve->add_option("--input,-i", input, "Instance JSON")->required();
  solve->add_option("--output,-o", output, "Allocation JSON (stdout if omitted)");
  solve->add_option("--trace", trace_path, "Write the case tag, relabelings and reduction steps");
  solve->add_option("--dump-graph", graph_path, "Write the feasibility graphs the solver built");

  auto* verify = app.add_subcommand("verify", "Check an allocation against recomputed MMS values");
  std::string allocation_path;
  std::string alpha_text;
  verify->add_option("--input,-i", input, "Instance JSON")->required();
  verify->add_option("--allocation,-a", allocation_path, "Allocation JSON")->required();
  verify->add_option("--alpha", alpha_text, "Flexible-agent bound, e.g. 9/8 (default: the guarantee for n)");

  auto* mms_cmd = app.add_subcommand("mms", "Exact maximin share of one agent");
  std::size_t agent = 0;
  std::optional<std::size_t> k;
  std::vector<std::size_t> item_list;
  mms_cmd->add_option("--input,-i", input, "Instance JSON")->required();
  mms_cmd->add_option("--agent", agent, "Agent index")->capture_default_str();
  mms_cmd->add_option("--k", k, "Number of bundles (default n)");
  mms_cmd->add_option("--items", item_list, "Restrict to these item indices");

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  std::size_t gen_n = 3;
  std::size_t gen_m = 8;
  std::string model_name = "uniform";
  bool tight_example = false;
  gen->add_option("--n", gen_n, "Agents")->capture_default_str();
  gen->add_option("--m", gen_m, "Items")->capture_default_str();
  gen->add_option("--model", model_name, "uniform, paper-like or adversarial")->capture_default_str();
  gen->add_flag("--tight-example", tight_example, "The three-agent 9/8 example");
  gen->add_option("--output,-o", output, "Instance JSON (stdout if omitted)");

  auto* suite = app.add_subcommand("suite", "Run randomized property suites");
  std::vector<std::string> suite_names;
  amms::SuiteConfig config;
  std::vector<std::string> suite_models;
  suite->add_option("--suites", suite_names, "oracle-cross-check, lemma-invariants, solver-by-n, tightness")->required();
  suite->add_option("--count", config.count, "Cases per suite (per n / per lemma)")->capture_default_str();
  suite->add_option("--ns", config.ns, "Agent counts for solver-by-n and tightness");
  suite->add_option("--max-m", config.max_m, "Largest item count")->capture_default_str();
  suite->add_option("--models", suite_models, "Cost models for solver-by-n");
  suite->add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  suite->add_option("--failures", config.failures_dir, "Directory for failing instances")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Time the solver on random instances");
  std::vector<std::size_t> bench_ns{3, 4, 5, 6, 7};
  std::size_t bench_m = 10;
  std::size_t bench_count = 20;
  bench->add_option("--ns", bench_ns, "Agent counts");
  bench->add_option("--m", bench_m, "Items per instance")->capture_default_str();
  bench->add_option("--count", bench_count, "Instances per n")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*solve) {
      const amms::Instance instance = amms::instance_from_json(amms::read_json_file(input));
      amms::SolveResult result = amms::solve(instance);
      emit(amms::to_json(result.allocation), output);
      if (!trace_path.empty()) amms::write_json_file(trace_path, amms::trace_to_json(result));
      if (!graph_path.empty()) emit(amms::trace_to_json(result)["graphs"], graph_path);
      if (!output.empty() && output != "-") {
        if (as_json)
          std::cout << json{{"case", result.case_tag}, {"alpha", result.allocation.alpha.str()}}.dump() << '\n';
        else
          std::cout << "case " << result.case_tag << ", alpha " << result.allocation.alpha << '\n';
      }
      return kOk;
    }

    if (*verify) {
      const amms::Instance instance = amms::instance_from_json(amms::read_json_file(input));
      const amms::Allocation allocation = amms::allocation_from_json(amms::read_json_file(allocation_path), instance.m());
      const amms::Rational alpha = alpha_text.empty() ? amms::guarantee_for(instance.n()) : amms::Rational::parse(alpha_text);
      amms::VerificationReport report = amms::verify_allocation(instance, allocation, alpha);
      std::cout << amms::to_json(report).dump(as_json ? -1 : 2) << '\n';
      return report.passed ? kOk : kFailed;
    }

    if (*mms_cmd) {
      const amms::Instance instance = amms::instance_from_json(amms::read_json_file(input));
      amms::ItemSet items = instance.items();
      if (!item_list.empty()) {
        items = amms::ItemSet::of(item_list);
        if (!items.is_subset_of(instance.items())) throw amms::InvalidArgument("--items refers to a missing item");
      }
      const std::size_t bundles = k.value_or(instance.n());
      amms::MmsResult r = amms::mms(instance, agent, items, bundles);
      json out = amms::to_json(r);
      out["agent"] = agent;
      out["k"] = bundles;
      std::cout << out.dump(as_json ? -1 : 2) << '\n';
      return kOk;
    }

    if (*gen) {
      const amms::Instance instance =
          tight_example ? amms::gen_paper_example() : amms::gen_random(gen_n, gen_m, amms::parse_cost_model(model_name), seed);
      emit(amms::to_json(instance), output);
      return kOk;
    }

    if (*suite) {
      config.seed = seed;
      config.suites = split_list(suite_names);
      for (const auto& name : split_list(suite_models)) config.models.push_back(amms::parse_cost_model(name));
      try {
        amms::SuiteReport report = amms::run_suite(config, as_json ? &std::cout : nullptr);
        if (!as_json) std::cout << amms::format_table(report);
      } catch (const amms::SuiteFailure& e) {
        std::cerr << "FAILED: " << e.what() << '\n';
        return kFailed;
      }
      return kOk;
    }

    if (*bench) {
      json rows = json::array();
      for (std::size_t n : bench_ns) {
        double total = 0;
        double worst = 0;
        for (std::size_t i = 0; i < bench_count; ++i) {
          const amms::Instance instance = amms::gen_random(n, bench_m, amms::CostModel::Uniform, seed + i);
          const auto start = std::chrono::steady_clock::now();
          amms::solve(instance);
          const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          total += ms;
          worst = std::max(worst, ms);
        }
        rows.push_back(json{{"n", n}, {"m", bench_m}, {"instances", bench_count}, {"mean_ms", bench_count ? total / bench_count : 0.0}, {"max_ms", worst}});
      }
      if (as_json) {
        for (const auto& row : rows) std::cout << row.dump() << '\n';
      } else {
        std::printf("%-4s %-4s %-10s %-10s %-10s\n", "n", "m", "instances", "mean ms", "max ms");
        for (const auto& row : rows)
          std::printf("%-4zu %-4zu %-10zu %-10.2f %-10.2f\n", row["n"].get<std::size_t>(), row["m"].get<std::size_t>(), row["instances"].get<std::size_t>(),
                      row["mean_ms"].get<double>(), row["max_ms"].get<double>());
      }
      return kOk;
    }
  } catch (const amms::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kError;
  } catch (const amms::DegenerateInstance& e) {
    std::cerr << "degenerate instance: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kOk;
}
