#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chainforge/check.hpp"
#include "chainforge/milp.hpp"

namespace chainforge::milp {

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit };

const char* solveStatusName(SolveStatus s);

struct MetricBound {
  Metric metric;
  Rel rel = Rel::Le;
  Rational value;
};

struct SolveConfig {
  Metric objective = Metric::Remdr;
  double timeLimitSec = 300.0;
  int threads = 1;
  std::vector<MetricBound> extraBounds;
  // Recorded for reproducibility; tie-breaking is statically deterministic,
  // so the seed never alters results.
  uint64_t seed = 0;
  std::ostream* progress = nullptr;
};

struct SolveStats {
  uint64_t nodesExplored = 0;
  double wallTimeSec = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Metric objective = Metric::Remdr;
  std::optional<PlacementSolution> solution;
  std::optional<Rational> bound;  // proved dual bound on the objective
  SolveStats stats;
  std::string label;  // caller-visible name, used by rank() tie-breaking
};

// Reference backend: branch and bound with constraint propagation over the
// linearized 0/1 instance. Exact; intended for small instances.
SolveResult solve(const PlacementInstance& inst, const SolveConfig& config);

// Fast backend with the same exactness contract: branches over node
// assignments first (capacity, instance and role pruning), then routes
// each commodity along enumerated simple paths under residual capacities,
// backtracking into the mapping search on routing failure.
SolveResult solveDecomposed(const SubstrateNetwork& net,
                            const FunctionCatalog& catalog,
                            const VnfGraph& graph, const SolveConfig& config);

// Sorts results best-first by the objective; results without a solution
// sink to the back, Infeasible last. Ties break by (usedNodes, latency,
// label). Throws Error when results carry different objective senses.
std::vector<SolveResult> rank(std::vector<SolveResult> results,
                              Metric objective);

}  // namespace chainforge::milp
