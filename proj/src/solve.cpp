#include <algorithm>
#include <vector>

#include "chainforge/errors.hpp"
#include "chainforge/solve.hpp"

namespace chainforge::milp {

const char* solveStatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Feasible:
      return "Feasible";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::TimeLimit:
      return "TimeLimit";
  }
  return "Unknown";
}

std::vector<SolveResult> rank(std::vector<SolveResult> results,
                              Metric objective) {
  for (const SolveResult& r : results)
    if (r.objective != objective)
      throw Error(std::string("cannot rank results for objective ") +
                  metricName(r.objective) + " against " +
                  metricName(objective));

  const bool maximize = metricIsMaximize(objective);
  auto metricOf = [&](const PlacementSolution& sol) {
    switch (objective) {
      case Metric::Remdr:
        return sol.objectiveValues.remdr;
      case Metric::UsedNodes:
        return Rational(sol.objectiveValues.usedNodes);
      case Metric::Latency:
        return sol.objectiveValues.latency;
    }
    return Rational(0);
  };

  std::stable_sort(
      results.begin(), results.end(),
      [&](const SolveResult& a, const SolveResult& b) {
        const bool aHas = a.solution.has_value();
        const bool bHas = b.solution.has_value();
        if (aHas != bHas) return aHas;
        if (!aHas) {
          const bool aInf = a.status == SolveStatus::Infeasible;
          const bool bInf = b.status == SolveStatus::Infeasible;
          if (aInf != bInf) return bInf;
          return a.label < b.label;
        }
        const Rational va = metricOf(*a.solution);
        const Rational vb = metricOf(*b.solution);
        if (va != vb) return maximize ? va > vb : va < vb;
        if (a.solution->objectiveValues.usedNodes !=
            b.solution->objectiveValues.usedNodes)
          return a.solution->objectiveValues.usedNodes <
                 b.solution->objectiveValues.usedNodes;
        if (a.solution->objectiveValues.latency !=
            b.solution->objectiveValues.latency)
          return a.solution->objectiveValues.latency <
                 b.solution->objectiveValues.latency;
        return a.label < b.label;
      });
  return results;
}

}  // namespace chainforge::milp
