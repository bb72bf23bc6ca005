#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainforge/graph_build.hpp"
#include "chainforge/model.hpp"

namespace chainforge::milp {

enum class VarKind { Binary, Continuous };

struct Var {
  std::string name;
  VarKind kind = VarKind::Binary;
  // Continuous variables are free unless a bound is set; binaries are 0/1.
  std::optional<Rational> lo;
  std::optional<Rational> hi;
};

using VarRef = int;

struct LinTerm {
  Rational coef;
  VarRef var;
};

enum class Rel { Le, Eq, Ge };

struct LinRow {
  std::string name;
  std::vector<LinTerm> terms;
  Rel rel = Rel::Eq;
  Rational rhs;
  // Which placement rule this row implements: "a".."r" for the model
  // families, "lin" for product-linearization scaffolding.
  std::string family;
};

struct LinExpr {
  std::vector<LinTerm> terms;
  Rational constant;
};

enum class Metric { Remdr, UsedNodes, Latency };

constexpr std::array<Metric, 3> kAllMetrics = {
    Metric::Remdr, Metric::UsedNodes, Metric::Latency};

const char* metricName(Metric m);
Metric metricFromName(const std::string& name);
// REMDR is maximized, the other two minimized.
bool metricIsMaximize(Metric m);

// Index tuple of one e variable: substrate edge (v,v'), candidate hosts
// (x,y) of the commodity ends, and the VnfGraph edge (u,u') it serves.
struct EKey {
  int edge;       // substrate edge index
  int x;          // substrate node index hosting u
  int y;          // substrate node index hosting u'
  int commodity;  // VnfGraph edge index
  auto operator<=>(const EKey&) const = default;
};

// Solver-independent placement program over one combined VnfGraph.
// Holds non-owning pointers to its inputs; keep them alive.
struct PlacementInstance {
  const SubstrateNetwork* net = nullptr;
  const FunctionCatalog* catalog = nullptr;
  const VnfGraph* graph = nullptr;

  std::vector<Var> vars;
  std::vector<LinRow> rows;
  std::map<std::string, VarRef> varIndex;

  // Objective expressions for all three metrics, each over instance vars.
  std::array<LinExpr, 3> objectives;

  // Structured lookups.
  std::map<std::pair<int, int>, VarRef> mVar;   // (graph node, net node)
  std::map<std::pair<int, int>, VarRef> msVar;  // (use node, net node)
  std::map<std::pair<int, int>, VarRef> mdVar;  // (use node, net node)
  std::map<std::pair<FunctionId, int>, VarRef> iVar;  // (function, net node)
  std::map<EKey, VarRef> eVar;
  std::map<int, VarRef> usedVar;                 // net node
  std::map<int, VarRef> remdrVar;                // substrate edge
  std::map<int, VarRef> latVar;                  // VnfGraph edge
  std::map<std::pair<VarRef, VarRef>, VarRef> productAux;

  // Candidate host nodes per graph node (capacity-feasible for uses, all
  // nodes for endpoints since they consume no compute).
  std::vector<std::vector<int>> candidates;

  // LATENCY objective weight per VnfGraph edge: number of latency-bounded
  // endpoint-pair paths the edge lies on.
  std::map<int, long> latencyWeight;

  VarRef addVar(Var v);
  VarRef findVar(const std::string& name) const;
  const LinExpr& objective(Metric m) const {
    return objectives[static_cast<size_t>(m)];
  }
};

// Materializes variables, linearized constraint rows and the three
// objectives for placing `graph` onto `net`. Requires pairPaths populated
// when the graph carries latency bounds.
PlacementInstance buildInstance(const SubstrateNetwork& net,
                                const FunctionCatalog& catalog,
                                const VnfGraph& graph);

// Returns the auxiliary binary z with rows z <= x, z <= y, z >= x + y - 1.
// Idempotent per unordered (x, y) pair. Throws Error on non-binary input.
VarRef linearizeProduct(PlacementInstance& inst, VarRef x, VarRef y);

}  // namespace chainforge::milp
