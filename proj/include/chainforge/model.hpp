#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/rational.hpp"

namespace chainforge {

using NodeId = std::string;
using FunctionId = std::string;

struct NodeSpec {
  NodeId id;
  Rational dcCapacity;      // compute available to data-center style instances
  Rational switchCapacity;  // compute available to switch style instances
};

struct SubstrateEdge {
  NodeId src;
  NodeId dst;
  Rational dataRate;  // capacity
  Rational latency;
};

// Directed substrate graph. Self-loops are legal and stand for traffic
// between functions co-located on one node. Immutable after create().
class SubstrateNetwork {
 public:
  static SubstrateNetwork create(std::vector<NodeSpec> nodes,
                                 std::vector<SubstrateEdge> edges);

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<SubstrateEdge>& edges() const { return edges_; }

  bool hasNode(const NodeId& v) const { return nodeIndex_.count(v) != 0; }
  const NodeSpec& node(const NodeId& v) const;

  bool hasEdge(const NodeId& s, const NodeId& d) const {
    return edgeIndex_.count({s, d}) != 0;
  }
  const SubstrateEdge& edge(const NodeId& s, const NodeId& d) const;
  int edgeIndexOf(const NodeId& s, const NodeId& d) const;

  std::vector<const SubstrateEdge*> edgesFrom(const NodeId& s) const;
  std::vector<const SubstrateEdge*> edgesInto(const NodeId& d) const;

 private:
  SubstrateNetwork() = default;
  std::vector<NodeSpec> nodes_;
  std::vector<SubstrateEdge> edges_;
  std::map<NodeId, size_t> nodeIndex_;
  std::map<std::pair<NodeId, NodeId>, size_t> edgeIndex_;
};

struct FunctionSpec {
  FunctionId id;
  Rational dcDemand;      // compute needed per instance on a data center
  Rational switchDemand;  // compute needed per instance on a switch
  long maxInstances;      // network-wide instance budget
  long maxRequests;       // uses one instance can serve
};

class FunctionCatalog {
 public:
  static FunctionCatalog create(std::vector<FunctionSpec> functions);

  const std::vector<FunctionSpec>& functions() const { return functions_; }
  bool hasFunction(const FunctionId& f) const {
    return index_.count(f) != 0;
  }
  const FunctionSpec& function(const FunctionId& f) const;

 private:
  FunctionCatalog() = default;
  std::vector<FunctionSpec> functions_;
  std::map<FunctionId, size_t> index_;
};

// One occurrence of a function inside a request's chain expression.
struct UseDecl {
  std::string id;
  FunctionId function;
  // Outgoing rate ratios. Single-output uses carry one entry; a use that
  // splits its input carries one entry per branch, in branch order.
  std::vector<Rational> ratios;
};

struct EndpointDecl {
  std::string id;
  NodeId loc;  // fixed placement
};

struct LatencyBound {
  std::string src;  // endpoint id
  std::string dst;  // endpoint id
  Rational bound;
};

struct DeploymentRequest {
  std::string id;
  std::vector<UseDecl> uses;
  std::string chain;  // expression in the chaining language
  std::vector<EndpointDecl> endpoints;
  std::vector<std::pair<std::string, std::string>> pairs;  // traffic endpoints
  Rational initialRate;  // rate entering the chain at each source endpoint
  std::vector<LatencyBound> latencyBounds;

  const UseDecl* findUse(const std::string& id) const;
  const EndpointDecl* findEndpoint(const std::string& id) const;
  bool isUse(const std::string& sym) const { return findUse(sym) != nullptr; }
  bool isEndpoint(const std::string& sym) const {
    return findEndpoint(sym) != nullptr;
  }
};

// Checks internal consistency and all cross references against the
// catalog and the substrate. Throws ValidationError.
void validateRequest(const DeploymentRequest& req, const FunctionCatalog& cat,
                     const SubstrateNetwork& net);

}  // namespace chainforge
