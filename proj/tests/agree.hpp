#pragma once

// Shared harness for the solver comparison tests: builds one random
// desk-scale instance, enumerates every placement with the oracle, runs
// both solver backends on all three objectives, and reports the first
// disagreement as text. Empty result means full agreement.

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/chain_lang.hpp"
#include "chainforge/graph_build.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/solve.hpp"
#include "gen.hpp"
#include "oracle.hpp"

namespace testagree {

struct Prepared {
  chainforge::SubstrateNetwork net;
  chainforge::FunctionCatalog catalog;
  chainforge::VnfGraph graph;
};

inline Prepared prepare(const testgen::GeneratedInstance& gi) {
  using namespace chainforge;
  SubstrateNetwork net = SubstrateNetwork::create(gi.nodes, gi.edges);
  FunctionCatalog catalog = FunctionCatalog::create(gi.functions);
  std::vector<VnfGraph> graphs;
  for (const DeploymentRequest& req : gi.requests) {
    const auto ast = chain::parseChain(req.chain, req);
    graphs.push_back(expandHeuristic(ast, req));
  }
  VnfGraph graph = combine(graphs);
  enumeratePaths(graph);
  return {std::move(net), std::move(catalog), std::move(graph)};
}

inline chainforge::Rational metricValue(
    const chainforge::milp::ObjectiveValues& triple,
    chainforge::milp::Metric m) {
  using chainforge::milp::Metric;
  switch (m) {
    case Metric::Remdr:
      return triple.remdr;
    case Metric::UsedNodes:
      return chainforge::Rational(triple.usedNodes);
    case Metric::Latency:
      return triple.latency;
  }
  return chainforge::Rational(0);
}

// Runs one seed; returns a description of the first disagreement, or
// nothing when both backends match the oracle on every objective.
inline std::optional<std::string> compareWithOracle(uint64_t seed,
                                                    double timeLimitSec = 60) {
  using namespace chainforge;
  using milp::Metric;
  using milp::SolveConfig;
  using milp::SolveResult;
  using milp::SolveStatus;

  testgen::Rng rng(seed);
  const Prepared p = prepare(testgen::randomInstance(rng));
  const testoracle::Enumeration oracle =
      testoracle::enumeratePlacements(p.net, p.catalog, p.graph);
  const milp::PlacementInstance inst =
      milp::buildInstance(p.net, p.catalog, p.graph);

  for (Metric metric : milp::kAllMetrics) {
    const auto expect = testoracle::bestValue(oracle, metric);

    SolveConfig config;
    config.objective = metric;
    config.timeLimitSec = timeLimitSec;

    const SolveResult mono = milp::solve(inst, config);
    SolveResult fast = milp::solveDecomposed(p.net, p.catalog, p.graph, config);
    const std::pair<const char*, const SolveResult*> runs[] = {
        {"monolithic", &mono}, {"decomposed", &fast}};

    for (const auto& run : runs) {
      const SolveResult& res = *run.second;
      std::ostringstream where;
      where << "seed " << seed << ", " << milp::metricName(metric) << ", "
            << run.first << " backend: ";
      if (!expect) {
        if (res.status != SolveStatus::Infeasible)
          return where.str() + "oracle finds no placement but solver said " +
                 milp::solveStatusName(res.status);
        continue;
      }
      if (res.status != SolveStatus::Optimal)
        return where.str() + "expected Optimal, got " +
               milp::solveStatusName(res.status);
      if (!res.solution) return where.str() + "optimal without a solution";
      const Rational got = metricValue(res.solution->objectiveValues, metric);
      if (got != *expect)
        return where.str() + "objective " + formatRational(got) +
               " but the oracle found " + formatRational(*expect);
      const auto report =
          milp::checkSolution(p.net, p.catalog, p.graph, *res.solution);
      if (!report.clean())
        return where.str() + "returned solution fails the constraint check";
    }
  }
  return std::nullopt;
}

}  // namespace testagree
