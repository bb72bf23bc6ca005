#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainforge/graph_build.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/model.hpp"

namespace chainforge::milp {

enum class Role { Switch, DataCenter };

struct ObjectiveValues {
  Rational remdr;
  long usedNodes = 0;
  Rational latency;
  bool operator==(const ObjectiveValues&) const = default;
};

// A complete placement: where every graph node sits, which role each use
// occupies, and the substrate walk serving every VnfGraph edge.
struct PlacementSolution {
  std::map<std::string, NodeId> mapping;       // graph node id -> net node
  std::map<std::string, Role> roles;           // use node id -> role
  std::map<std::pair<FunctionId, NodeId>, long> instanceCount;
  // VnfGraph edge (by endpoint node ids) -> ordered substrate edges
  std::map<std::pair<std::string, std::string>,
           std::vector<std::pair<NodeId, NodeId>>>
      pathEdges;
  std::set<NodeId> usedNodes;
  std::map<std::pair<NodeId, NodeId>, Rational> remainingRate;
  std::map<std::pair<std::string, std::string>, Rational> pathLatency;
  ObjectiveValues objectiveValues;
};

struct Violation {
  std::string tag;      // constraint family "a".."r"
  std::string indices;  // offending index tuple, human readable
  std::string lhs;      // evaluated left side
  std::string relation;
  std::string rhs;
};

struct CheckReport {
  std::vector<Violation> violations;
  // Objective values recomputed from mapping/instances/paths.
  ObjectiveValues recomputed;
  bool remdrMismatch = false;
  bool usedNodesMismatch = false;
  bool latencyMismatch = false;

  bool clean() const {
    return violations.empty() && !remdrMismatch && !usedNodesMismatch &&
           !latencyMismatch;
  }
  std::string toJson() const;
};

// Raw values of the model's variable families, sparse (absent means 0).
// This is the common currency between the checker, the solution importer
// and the solvers.
struct Assignment {
  std::map<std::pair<std::string, int>, int> m;   // (graph node id, net node)
  std::map<std::pair<std::string, int>, int> ms;  // (use id, net node)
  std::map<std::pair<std::string, int>, int> md;
  std::map<std::pair<FunctionId, int>, int> inst;
  std::map<EKey, int> e;
  std::map<int, int> used;                        // net node
  std::map<int, Rational> remdr;                  // substrate edge
  std::map<int, Rational> lat;                    // VnfGraph edge
};

// Evaluates every placement rule family (a)-(r) in its original quadratic
// form over the full index space and reports each violated row.
std::vector<Violation> checkAssignment(const SubstrateNetwork& net,
                                       const FunctionCatalog& catalog,
                                       const VnfGraph& graph,
                                       const Assignment& asg);

// Expands a solution into variable values (paths become e entries, the
// mapping becomes m/ms/md/inst entries, and so on).
Assignment toAssignment(const SubstrateNetwork& net,
                        const FunctionCatalog& catalog, const VnfGraph& graph,
                        const PlacementSolution& sol);

// Objective triple implied by an assignment's e/used values.
ObjectiveValues computeObjectives(const SubstrateNetwork& net,
                                  const VnfGraph& graph,
                                  const Assignment& asg);

// Full solution audit: family-by-family constraint check plus objective
// recomputation. Violations are report entries, never exceptions.
CheckReport checkSolution(const SubstrateNetwork& net,
                          const FunctionCatalog& catalog,
                          const VnfGraph& graph,
                          const PlacementSolution& sol);

}  // namespace chainforge::milp
