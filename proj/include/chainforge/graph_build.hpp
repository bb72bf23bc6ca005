#pragma once

#include <map>
#include <string>
#include <vector>

#include "chainforge/chain_lang.hpp"
#include "chainforge/model.hpp"

namespace chainforge {

struct VnfNode {
  std::string id;  // use id, replica id like "f3#2", or endpoint id;
                   // combine() prefixes the request id ("r1/f3#2")
  bool isEndpoint = false;
  FunctionId function;           // uses only
  NodeId loc;                    // endpoints only
  std::vector<Rational> ratios;  // uses only; endpoints pass rate through
};

struct VnfEdge {
  int src = -1;  // node indices
  int dst = -1;
  Rational rate;
};

// Annotated expansion of one chaining request (or the disjoint union of
// several). Edges carry data-rate demands; endpoint pairs carry optional
// latency bounds and, once enumeratePaths ran, their simple paths.
struct VnfGraph {
  std::string sourceRequest;
  std::vector<VnfNode> nodes;
  std::vector<VnfEdge> edges;
  std::map<std::string, int> nodeIndex;
  std::map<std::pair<int, int>, int> edgeIndex;
  std::vector<std::pair<int, int>> pairs;  // endpoint node indices
  std::map<std::pair<int, int>, Rational> latencyBounds;
  // pair -> all simple paths, each path an ordered list of edge indices
  std::map<std::pair<int, int>, std::vector<std::vector<int>>> pairPaths;

  int addNode(VnfNode n);
  int addEdge(int src, int dst, Rational rate);
  const VnfNode& node(int i) const { return nodes[static_cast<size_t>(i)]; }
  const VnfEdge& edge(int i) const { return edges[static_cast<size_t>(i)]; }
  int indexOf(const std::string& id) const;
  long useCount() const;
};

struct ExpansionSet {
  std::string request;
  std::vector<VnfGraph> graphs;
  unsigned long long combinationCount = 0;
};

// Safety valve for expandAll: enumerating more graphs than this raises
// ExpansionError instead of exhausting memory.
inline constexpr unsigned long long kMaxEnumeratedGraphs = 200000;

// Materializes every combination of module permutations as its own graph.
// combinationCount is the factorial product over orderable modules and
// always equals graphs.size().
ExpansionSet expandAll(const chain::ChainAst& ast,
                       const DeploymentRequest& request,
                       unsigned long long limit = kMaxEnumeratedGraphs);

// Materializes the single graph whose orderable modules are sorted by
// ascending total outgoing rate ratio. Minimizes the summed edge rate
// among all expandAll graphs.
VnfGraph expandHeuristic(const chain::ChainAst& ast,
                         const DeploymentRequest& request);

// Disjoint union of graphs from distinct requests; node ids are prefixed
// with "<requestId>/".
VnfGraph combine(const std::vector<VnfGraph>& graphs);

// Fills pairPaths with every simple directed path per endpoint pair,
// ordered lexicographically by node sequence. Throws ExpansionError if the
// graph has a cycle.
void enumeratePaths(VnfGraph& graph);

// Graphviz rendering for manual inspection.
std::string toDot(const VnfGraph& graph);

}  // namespace chainforge
