#pragma once

#include <string>

#include "chainforge/check.hpp"
#include "chainforge/milp.hpp"

namespace chainforge::milp {

// Writes the instance in CPLEX LP text format with the chosen objective.
// Variable names are the instance's (already file-safe) names.
void exportLp(const PlacementInstance& inst, Metric objective,
              const std::string& path);
std::string renderLp(const PlacementInstance& inst, Metric objective);

// Minimal structural view of an LP file, for round-trip testing.
struct ParsedLp {
  bool maximize = false;
  LinExpr objective;
  std::vector<LinRow> rows;  // family left empty
  std::map<std::string, VarRef> varIndex;
  std::vector<std::string> varNames;
  std::vector<bool> isBinary;
};

// Reads back the LP subset produced by exportLp (objective, Subject To,
// Bounds, Binaries). Throws SchemaError on anything it cannot digest.
ParsedLp parseLp(const std::string& path);

// Reads a solution file of lines `<varname> <value>`, rounds binaries
// within 1e-6 of an integer, reconstructs the placement and audits it.
// Throws SolutionImportError when a binary sits farther from {0,1}, when a
// line names an unknown variable, or when active e values do not form
// clean walks.
PlacementSolution importSolution(const PlacementInstance& inst,
                                 const std::string& path);

// Shared with the built-in solvers: turns raw variable values into a
// PlacementSolution (walk extraction, metrics, objective triple).
PlacementSolution solutionFromAssignment(const PlacementInstance& inst,
                                         const Assignment& asg);

}  // namespace chainforge::milp
