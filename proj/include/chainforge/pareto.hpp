#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainforge/solve.hpp"

namespace chainforge::milp {

struct MetricRange {
  Rational best;
  Rational worst;
};

struct MetricRanges {
  MetricRange remdr;      // best >= worst (maximized)
  MetricRange usedNodes;  // best <= worst
  MetricRange latency;    // best <= worst
};

struct ParetoPoint {
  Rational remdr;
  long usedNodes = 0;
  Rational latency;
  std::string solutionId;
  std::string cell;  // sweep cell that produced the point
  PlacementSolution solution;
};

struct ParetoFront {
  std::vector<ParetoPoint> points;
};

struct SweepGrid {
  // Thresholds for the remdr >= r bound, spread uniformly across the
  // estimated range (endpoints included).
  int remdrSteps = 8;
  // 0 sweeps every integer in the usedNodes range; a positive value
  // subsamples to that many caps.
  int usedNodesSteps = 0;
};

// Three single-objective solves; records each solution's full metric
// triple (recomputed by the checker) and returns the observed spans.
// Throws Error if any solve comes back infeasible or over time.
MetricRanges estimateRanges(const SubstrateNetwork& net,
                            const FunctionCatalog& catalog,
                            const VnfGraph& graph, const SolveConfig& config);

// Epsilon-constraint sweep: per grid cell, minimize LATENCY subject to
// usedNodes <= k and remdr >= r, then tighten the other two metrics
// lexicographically so every reported point is non-dominated. Infeasible
// cells are skipped. Output is dominance-filtered and sorted by
// (-remdr, usedNodes, latency).
ParetoFront sweep(const SubstrateNetwork& net, const FunctionCatalog& catalog,
                  const VnfGraph& graph, const MetricRanges& ranges,
                  const SweepGrid& grid, const SolveConfig& config);

// True iff p is at least as good as q on every metric and better on one.
bool dominates(const ParetoPoint& p, const ParetoPoint& q);

// One row per point: remdr,used_nodes,latency,solution_id.
std::string frontCsv(const ParetoFront& front);

}  // namespace chainforge::milp
