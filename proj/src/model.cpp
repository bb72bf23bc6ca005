#include "chainforge/model.hpp"

#include <algorithm>
#include <set>

#include "chainforge/chain_lang.hpp"
#include "chainforge/errors.hpp"

namespace chainforge {

SubstrateNetwork SubstrateNetwork::create(std::vector<NodeSpec> nodes,
                                          std::vector<SubstrateEdge> edges) {
  SubstrateNetwork net;
  if (nodes.empty()) throw ValidationError("network has no nodes");
  for (auto& n : nodes) {
    if (n.id.empty()) throw ValidationError("node with empty id");
    if (n.dcCapacity < 0 || n.switchCapacity < 0) {
      throw ValidationError("node '" + n.id + "' has negative capacity");
    }
    if (!net.nodeIndex_.emplace(n.id, net.nodes_.size()).second) {
      throw ValidationError("duplicate node id '" + n.id + "'");
    }
    net.nodes_.push_back(std::move(n));
  }
  for (auto& e : edges) {
    if (!net.hasNode(e.src) || !net.hasNode(e.dst)) {
      throw ValidationError("edge " + e.src + " -> " + e.dst +
                            " references unknown node");
    }
    if (e.dataRate < 0) {
      throw ValidationError("edge " + e.src + " -> " + e.dst +
                            " has negative data rate");
    }
    if (e.latency < 0) {
      throw ValidationError("edge " + e.src + " -> " + e.dst +
                            " has negative latency");
    }
    if (!net.edgeIndex_.emplace(std::make_pair(e.src, e.dst), net.edges_.size())
             .second) {
      throw ValidationError("duplicate edge " + e.src + " -> " + e.dst);
    }
    net.edges_.push_back(std::move(e));
  }
  return net;
}

const NodeSpec& SubstrateNetwork::node(const NodeId& v) const {
  auto it = nodeIndex_.find(v);
  if (it == nodeIndex_.end()) {
    throw ValidationError("unknown node '" + v + "'");
  }
  return nodes_[it->second];
}

const SubstrateEdge& SubstrateNetwork::edge(const NodeId& s,
                                            const NodeId& d) const {
  auto it = edgeIndex_.find({s, d});
  if (it == edgeIndex_.end()) {
    throw ValidationError("unknown edge " + s + " -> " + d);
  }
  return edges_[it->second];
}

int SubstrateNetwork::edgeIndexOf(const NodeId& s, const NodeId& d) const {
  auto it = edgeIndex_.find({s, d});
  return it == edgeIndex_.end() ? -1 : static_cast<int>(it->second);
}

std::vector<const SubstrateEdge*> SubstrateNetwork::edgesFrom(
    const NodeId& s) const {
  std::vector<const SubstrateEdge*> out;
  for (const auto& e : edges_) {
    if (e.src == s) out.push_back(&e);
  }
  return out;
}

std::vector<const SubstrateEdge*> SubstrateNetwork::edgesInto(
    const NodeId& d) const {
  std::vector<const SubstrateEdge*> out;
  for (const auto& e : edges_) {
    if (e.dst == d) out.push_back(&e);
  }
  return out;
}

FunctionCatalog FunctionCatalog::create(std::vector<FunctionSpec> functions) {
  FunctionCatalog cat;
  for (auto& f : functions) {
    if (f.id.empty()) throw ValidationError("function with empty id");
    if (f.dcDemand < 0 || f.switchDemand < 0) {
      throw ValidationError("function '" + f.id + "' has negative demand");
    }
    if (f.dcDemand == 0 && f.switchDemand == 0) {
      throw ValidationError("function '" + f.id +
                            "' must be deployable somewhere (both demands "
                            "are zero)");
    }
    if (f.maxInstances < 1) {
      throw ValidationError("function '" + f.id +
                            "' needs a positive instance budget");
    }
    if (f.maxRequests < 1) {
      throw ValidationError("function '" + f.id +
                            "' needs a positive per-instance request budget");
    }
    if (!cat.index_.emplace(f.id, cat.functions_.size()).second) {
      throw ValidationError("duplicate function id '" + f.id + "'");
    }
    cat.functions_.push_back(std::move(f));
  }
  return cat;
}

const FunctionSpec& FunctionCatalog::function(const FunctionId& f) const {
  auto it = index_.find(f);
  if (it == index_.end()) {
    throw ValidationError("unknown function '" + f + "'");
  }
  return functions_[it->second];
}

const UseDecl* DeploymentRequest::findUse(const std::string& id) const {
  for (const auto& u : uses) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

const EndpointDecl* DeploymentRequest::findEndpoint(
    const std::string& id) const {
  for (const auto& a : endpoints) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

void validateRequest(const DeploymentRequest& req, const FunctionCatalog& cat,
                     const SubstrateNetwork& net) {
  if (req.id.empty()) throw ValidationError("request with empty id");
  std::set<std::string> ids;
  for (const auto& u : req.uses) {
    if (u.id.empty()) {
      throw ValidationError("request '" + req.id + "': use with empty id");
    }
    if (!ids.insert(u.id).second) {
      throw ValidationError("request '" + req.id + "': duplicate symbol '" +
                            u.id + "'");
    }
    if (!cat.hasFunction(u.function)) {
      throw ValidationError("request '" + req.id + "': use '" + u.id +
                            "' references unknown function '" + u.function +
                            "'");
    }
    if (u.ratios.empty()) {
      throw ValidationError("request '" + req.id + "': use '" + u.id +
                            "' has no rate ratios");
    }
    for (const auto& r : u.ratios) {
      if (r <= 0) {
        throw ValidationError("request '" + req.id + "': use '" + u.id +
                              "' has a non-positive rate ratio");
      }
    }
  }
  if (req.endpoints.empty()) {
    throw ValidationError("request '" + req.id + "' has no endpoints");
  }
  for (const auto& a : req.endpoints) {
    if (a.id.empty()) {
      throw ValidationError("request '" + req.id +
                            "': endpoint with empty id");
    }
    if (!ids.insert(a.id).second) {
      throw ValidationError("request '" + req.id + "': duplicate symbol '" +
                            a.id + "'");
    }
    if (!net.hasNode(a.loc)) {
      throw ValidationError("request '" + req.id + "': endpoint '" + a.id +
                            "' pinned to unknown node '" + a.loc + "'");
    }
  }
  if (req.pairs.empty()) {
    throw ValidationError("request '" + req.id + "' has no endpoint pairs");
  }
  std::set<std::pair<std::string, std::string>> pairSet;
  for (const auto& [s, d] : req.pairs) {
    if (!req.isEndpoint(s) || !req.isEndpoint(d)) {
      throw ValidationError("request '" + req.id + "': pair (" + s + ", " + d +
                            ") references unknown endpoint");
    }
    if (!pairSet.insert({s, d}).second) {
      throw ValidationError("request '" + req.id + "': duplicate pair (" + s +
                            ", " + d + ")");
    }
  }
  if (req.initialRate <= 0) {
    throw ValidationError("request '" + req.id +
                          "' needs a positive initial rate");
  }
  std::set<std::pair<std::string, std::string>> boundSet;
  for (const auto& lb : req.latencyBounds) {
    if (!pairSet.count({lb.src, lb.dst})) {
      throw ValidationError("request '" + req.id + "': latency bound (" +
                            lb.src + ", " + lb.dst +
                            ") does not match a declared pair");
    }
    if (!boundSet.insert({lb.src, lb.dst}).second) {
      throw ValidationError("request '" + req.id +
                            "': duplicate latency bound (" + lb.src + ", " +
                            lb.dst + ")");
    }
    if (lb.bound <= 0) {
      throw ValidationError("request '" + req.id + "': latency bound (" +
                            lb.src + ", " + lb.dst + ") must be positive");
    }
  }
  if (req.chain.empty()) {
    throw ValidationError("request '" + req.id + "' has an empty chain");
  }
  // The chain only needs to scan cleanly here; symbols must be declared.
  // Grammar checking happens in parse(), structural checks at expansion.
  for (const auto& tok : chain::tokenize(req.chain)) {
    if (tok.kind == chain::TokenKind::Symbol && !req.isUse(tok.text) &&
        !req.isEndpoint(tok.text)) {
      throw ValidationError("request '" + req.id + "': chain names unknown "
                            "symbol '" + tok.text + "'");
    }
  }
}

}  // namespace chainforge
