#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/check.hpp"
#include "chainforge/errors.hpp"
#include "chainforge/pareto.hpp"

namespace chainforge::milp {

namespace {

ObjectiveValues recomputeTriple(const SubstrateNetwork& net,
                                const FunctionCatalog& catalog,
                                const VnfGraph& graph,
                                const PlacementSolution& sol) {
  const CheckReport report = checkSolution(net, catalog, graph, sol);
  if (!report.violations.empty())
    throw Error("solver returned a placement that fails verification (" +
                report.violations.front().tag + " " +
                report.violations.front().indices + ")");
  return report.recomputed;
}

SolveResult solveOnce(const SubstrateNetwork& net,
                      const FunctionCatalog& catalog, const VnfGraph& graph,
                      SolveConfig config, Metric objective,
                      std::vector<MetricBound> bounds) {
  config.objective = objective;
  config.extraBounds = std::move(bounds);
  return solveDecomposed(net, catalog, graph, config);
}

}  // namespace

MetricRanges estimateRanges(const SubstrateNetwork& net,
                            const FunctionCatalog& catalog,
                            const VnfGraph& graph, const SolveConfig& config) {
  std::vector<ObjectiveValues> triples;
  for (Metric m : kAllMetrics) {
    SolveResult r = solveOnce(net, catalog, graph, config, m, {});
    if (r.status == SolveStatus::Infeasible)
      throw InfeasibleError(std::string("range estimation failed: objective ") +
                            metricName(m) + " is infeasible");
    if (!r.solution)
      throw TimeLimitError(std::string("range estimation failed: objective ") +
                           metricName(m) +
                           " hit the time limit with no placement");
    triples.push_back(recomputeTriple(net, catalog, graph, *r.solution));
  }

  MetricRanges ranges;
  ranges.remdr = {triples[0].remdr, triples[0].remdr};
  ranges.usedNodes = {Rational(triples[0].usedNodes),
                      Rational(triples[0].usedNodes)};
  ranges.latency = {triples[0].latency, triples[0].latency};
  for (const ObjectiveValues& t : triples) {
    ranges.remdr.best = std::max(ranges.remdr.best, t.remdr);
    ranges.remdr.worst = std::min(ranges.remdr.worst, t.remdr);
    ranges.usedNodes.best =
        std::min(ranges.usedNodes.best, Rational(t.usedNodes));
    ranges.usedNodes.worst =
        std::max(ranges.usedNodes.worst, Rational(t.usedNodes));
    ranges.latency.best = std::min(ranges.latency.best, t.latency);
    ranges.latency.worst = std::max(ranges.latency.worst, t.latency);
  }
  return ranges;
}

bool dominates(const ParetoPoint& p, const ParetoPoint& q) {
  const bool geAll = p.remdr >= q.remdr && p.usedNodes <= q.usedNodes &&
                     p.latency <= q.latency;
  const bool gtOne = p.remdr > q.remdr || p.usedNodes < q.usedNodes ||
                     p.latency < q.latency;
  return geAll && gtOne;
}

ParetoFront sweep(const SubstrateNetwork& net, const FunctionCatalog& catalog,
                  const VnfGraph& graph, const MetricRanges& ranges,
                  const SweepGrid& grid, const SolveConfig& config) {
  std::vector<Rational> remdrThresholds;
  const int rs = std::max(1, grid.remdrSteps);
  if (ranges.remdr.worst == ranges.remdr.best || rs == 1) {
    remdrThresholds.push_back(ranges.remdr.worst);
  } else {
    const Rational span = ranges.remdr.best - ranges.remdr.worst;
    for (int i = 0; i < rs; ++i)
      remdrThresholds.push_back(ranges.remdr.worst +
                                span * Rational(i) / Rational(rs - 1));
  }

  std::vector<long> usedCaps;
  {
    const long lo = rationalFloor(ranges.usedNodes.best);
    const long hi = rationalFloor(ranges.usedNodes.worst);
    if (grid.usedNodesSteps <= 0 || hi - lo + 1 <= grid.usedNodesSteps) {
      for (long k = lo; k <= hi; ++k) usedCaps.push_back(k);
    } else {
      const int us = grid.usedNodesSteps;
      for (int i = 0; i < us; ++i)
        usedCaps.push_back(lo + (hi - lo) * i / (us - 1));
      usedCaps.erase(std::unique(usedCaps.begin(), usedCaps.end()),
                     usedCaps.end());
    }
  }

  std::vector<ParetoPoint> points;
  int cellIdx = 0;
  for (long cap : usedCaps) {
    for (const Rational& threshold : remdrThresholds) {
      const std::string cell =
          "used<=" + std::to_string(cap) + ",remdr>=" +
          formatRational(threshold);
      ++cellIdx;

      // Stage 1: best latency inside the cell.
      std::vector<MetricBound> bounds{
          {Metric::UsedNodes, Rel::Le, Rational(cap)},
          {Metric::Remdr, Rel::Ge, threshold}};
      SolveResult r1 =
          solveOnce(net, catalog, graph, config, Metric::Latency, bounds);
      if (!r1.solution) continue;
      const ObjectiveValues v1 =
          recomputeTriple(net, catalog, graph, *r1.solution);

      // Stage 2: best remdr without giving that latency back.
      std::vector<MetricBound> b2{
          {Metric::UsedNodes, Rel::Le, Rational(cap)},
          {Metric::Latency, Rel::Le, v1.latency}};
      SolveResult r2 =
          solveOnce(net, catalog, graph, config, Metric::Remdr, b2);
      if (!r2.solution) continue;
      const ObjectiveValues v2 =
          recomputeTriple(net, catalog, graph, *r2.solution);

      // Stage 3: fewest nodes at that latency and remdr.
      std::vector<MetricBound> b3{{Metric::Latency, Rel::Le, v2.latency},
                                  {Metric::Remdr, Rel::Ge, v2.remdr}};
      SolveResult r3 =
          solveOnce(net, catalog, graph, config, Metric::UsedNodes, b3);
      if (!r3.solution) continue;
      const ObjectiveValues v3 =
          recomputeTriple(net, catalog, graph, *r3.solution);

      ParetoPoint p;
      p.remdr = v3.remdr;
      p.usedNodes = v3.usedNodes;
      p.latency = v3.latency;
      p.cell = cell;
      p.solutionId = "p" + std::to_string(cellIdx);
      p.solution = *r3.solution;
      points.push_back(std::move(p));
    }
  }

  // Dominance filter; keep one representative per distinct triple.
  std::vector<ParetoPoint> kept;
  std::set<std::tuple<Rational, long, Rational>> seen;
  for (const ParetoPoint& p : points) {
    bool dominated = false;
    for (const ParetoPoint& q : points)
      if (dominates(q, p)) {
        dominated = true;
        break;
      }
    if (dominated) continue;
    auto key = std::make_tuple(p.remdr, p.usedNodes, p.latency);
    if (!seen.insert(key).second) continue;
    kept.push_back(p);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const ParetoPoint& a, const ParetoPoint& b) {
                     if (a.remdr != b.remdr) return a.remdr > b.remdr;
                     if (a.usedNodes != b.usedNodes)
                       return a.usedNodes < b.usedNodes;
                     return a.latency < b.latency;
                   });
  for (size_t i = 0; i < kept.size(); ++i)
    kept[i].solutionId = "p" + std::to_string(i + 1);

  ParetoFront front;
  front.points = std::move(kept);
  return front;
}

std::string frontCsv(const ParetoFront& front) {
  std::ostringstream out;
  out << "remdr,used_nodes,latency,solution_id\n";
  for (const ParetoPoint& p : front.points)
    out << formatRational(p.remdr) << ',' << p.usedNodes << ','
        << formatRational(p.latency) << ',' << p.solutionId << '\n';
  return out.str();
}

}  // namespace chainforge::milp
