#include "family_fixtures.hpp"

#include <map>
#include <stdexcept>
#include <utility>

#include "chainforge/chain_lang.hpp"
#include "chainforge/milp.hpp"

namespace testfix {

using chainforge::DeploymentRequest;
using chainforge::EndpointDecl;
using chainforge::FunctionCatalog;
using chainforge::FunctionSpec;
using chainforge::LatencyBound;
using chainforge::NodeId;
using chainforge::NodeSpec;
using chainforge::Rational;
using chainforge::SubstrateEdge;
using chainforge::SubstrateNetwork;
using chainforge::UseDecl;
using chainforge::VnfGraph;
using chainforge::VnfNode;
using chainforge::milp::Assignment;
using chainforge::milp::EKey;
using chainforge::milp::PlacementSolution;
using chainforge::milp::Role;

namespace {

VnfGraph buildGraph(const DeploymentRequest& req) {
  const auto ast = chainforge::chain::parseChain(req.chain, req);
  auto set = chainforge::expandAll(ast, req);
  VnfGraph g = std::move(set.graphs.front());
  chainforge::enumeratePaths(g);
  return g;
}

int nodeIdx(const SubstrateNetwork& net, const NodeId& v) {
  const auto& nodes = net.nodes();
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == v) return static_cast<int>(i);
  throw std::logic_error("fixture references unknown node " + v);
}

// Builds a fully bookkept assignment from host/role choices and one
// substrate node sequence per graph edge. Endpoints sit at their declared
// node unless overridden.
Assignment buildAssignment(
    const SubstrateNetwork& net, const FunctionCatalog& catalog,
    const VnfGraph& graph, const std::map<std::string, NodeId>& useHosts,
    const std::map<std::string, Role>& useRoles,
    const std::map<int, std::vector<NodeId>>& routes,
    const std::map<std::string, NodeId>& endpointOverrides = {}) {
  PlacementSolution sol;
  for (const VnfNode& gn : graph.nodes) {
    if (gn.isEndpoint) {
      auto it = endpointOverrides.find(gn.id);
      sol.mapping[gn.id] = it == endpointOverrides.end() ? gn.loc : it->second;
    } else {
      sol.mapping[gn.id] = useHosts.at(gn.id);
      sol.roles[gn.id] = useRoles.at(gn.id);
      sol.instanceCount[{gn.function, useHosts.at(gn.id)}] = 1;
      sol.usedNodes.insert(useHosts.at(gn.id));
    }
  }

  std::map<std::pair<NodeId, NodeId>, Rational> flow;
  for (int c = 0; c < static_cast<int>(graph.edges.size()); ++c) {
    const auto& ge = graph.edges[static_cast<size_t>(c)];
    const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
    const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
    const auto& seq = routes.at(c);
    Rational lat(0);
    auto& hops = sol.pathEdges[{uid, upid}];
    for (size_t k = 0; k + 1 < seq.size(); ++k) {
      hops.push_back({seq[k], seq[k + 1]});
      flow[{seq[k], seq[k + 1]}] += ge.rate;
      lat += net.edge(seq[k], seq[k + 1]).latency;
    }
    sol.pathLatency[{uid, upid}] = lat;
  }
  for (const SubstrateEdge& e : net.edges()) {
    auto it = flow.find({e.src, e.dst});
    sol.remainingRate[{e.src, e.dst}] =
        e.dataRate - (it == flow.end() ? Rational(0) : it->second);
  }
  return chainforge::milp::toAssignment(net, catalog, graph, sol);
}

// Two-node net with generous capacities, one dual-style and one
// switch-only function, and a bounded two-use chain. Basis for the
// bookkeeping and mapping scenarios.
struct PairSetup {
  SubstrateNetwork net = SubstrateNetwork::create(
      {{"n1", 100, 50}, {"n2", 100, 50}},
      {{"n1", "n1", 200, 0}, {"n2", "n2", 200, 0}, {"n1", "n2", 100, 1},
       {"n2", "n1", 100, 1}});
  FunctionCatalog catalog = FunctionCatalog::create(
      {{"f1", 10, 5, 2, 2}, {"f2", 0, 5, 2, 2}});
  DeploymentRequest request{"r",
                            {{"u1", "f1", {Rational(1)}},
                             {"u2", "f2", {Rational(1)}}},
                            "a . u1 . u2 . b",
                            {{"a", "n1"}, {"b", "n2"}},
                            {{"a", "b"}},
                            Rational(10),
                            {{"a", "b", Rational(50)}}};
  VnfGraph graph = buildGraph(request);

  Assignment base() const {
    return buildAssignment(net, catalog, graph, {{"u1", "n1"}, {"u2", "n2"}},
                           {{"u1", Role::DataCenter}, {"u2", Role::Switch}},
                           {{0, {"n1", "n1"}},
                            {1, {"n1", "n2"}},
                            {2, {"n2", "n2"}}});
  }
};

// Five-node net around one single-use chain. The extra nodes p, q, r and
// their edges exist only to host stray traffic for the path-shape
// scenarios.
struct FlowSetup {
  SubstrateNetwork net = SubstrateNetwork::create(
      {{"n1", 100, 100},
       {"n2", 100, 100},
       {"p", 100, 100},
       {"q", 100, 100},
       {"r", 100, 100}},
      {{"n1", "n1", 100, 0},
       {"n2", "n2", 100, 0},
       {"p", "p", 100, 2},
       {"n1", "n2", 100, 1},
       {"p", "q", 100, 1},
       {"q", "r", 100, 1},
       {"r", "p", 100, 1},
       {"n1", "p", 100, 1},
       {"q", "n1", 100, 1},
       {"n2", "p", 100, 1},
       {"q", "n2", 100, 1}});
  FunctionCatalog catalog =
      FunctionCatalog::create({{"k1", 1, 0, 2, 2}});
  DeploymentRequest request{"r",
                            {{"y1", "k1", {Rational(1)}}},
                            "a . y1 . b",
                            {{"a", "n1"}, {"b", "n2"}},
                            {{"a", "b"}},
                            Rational(1),
                            {}};
  VnfGraph graph = buildGraph(request);

  Assignment base() const {
    return buildAssignment(net, catalog, graph, {{"y1", "n1"}},
                           {{"y1", Role::DataCenter}},
                           {{0, {"n1", "n1"}}, {1, {"n1", "n2"}}});
  }

  // Adds stray unit traffic for commodity 1 into group (x, y), adjusting
  // the remaining-rate and latency bookkeeping so only the targeted path
  // family notices.
  Assignment withStray(const NodeId& x, const NodeId& y,
                       const std::vector<std::pair<NodeId, NodeId>>& hops)
      const {
    Assignment asg = base();
    Rational extraLat(0);
    for (const auto& hop : hops) {
      const int t = net.edgeIndexOf(hop.first, hop.second);
      asg.e[EKey{t, nodeIdx(net, x), nodeIdx(net, y), 1}] = 1;
      asg.remdr[t] -= graph.edges[1].rate;
      extraLat += net.edge(hop.first, hop.second).latency;
    }
    asg.lat[1] += extraLat;
    return asg;
  }
};

}  // namespace

std::vector<FamilyScenario> familyScenarios() {
  std::vector<FamilyScenario> out;

  const PairSetup pair;
  {
    Assignment broken = pair.base();
    broken.m[{"a", nodeIdx(pair.net, "n2")}] = 1;
    out.push_back({"a", "endpoint a mapped to two nodes at once", pair.net,
                   pair.catalog, pair.graph, pair.base(), std::move(broken)});
  }
  {
    Assignment broken = buildAssignment(
        pair.net, pair.catalog, pair.graph, {{"u1", "n1"}, {"u2", "n2"}},
        {{"u1", Role::DataCenter}, {"u2", Role::Switch}},
        {{0, {"n2", "n1"}}, {1, {"n1", "n2"}}, {2, {"n2", "n2"}}},
        {{"a", "n2"}});
    out.push_back({"b", "endpoint a moved away from its declared node",
                   pair.net, pair.catalog, pair.graph, pair.base(),
                   std::move(broken)});
  }
  {
    Assignment broken = pair.base();
    broken.inst[{"f1", nodeIdx(pair.net, "n1")}] = 2;
    out.push_back({"c", "two instances claimed where one use is mapped",
                   pair.net, pair.catalog, pair.graph, pair.base(),
                   std::move(broken)});
  }
  {
    Assignment broken = pair.base();
    broken.ms[{"u1", nodeIdx(pair.net, "n2")}] = 1;
    out.push_back({"d", "u1 holds both roles on a node it does not occupy",
                   pair.net, pair.catalog, pair.graph, pair.base(),
                   std::move(broken)});
  }
  {
    Assignment broken = pair.base();
    broken.ms[{"u2", nodeIdx(pair.net, "n1")}] = 0;
    broken.md[{"u2", nodeIdx(pair.net, "n1")}] = 1;
    out.push_back({"e", "switch-only u2 flagged as a data-center deployment",
                   pair.net, pair.catalog, pair.graph, pair.base(),
                   std::move(broken)});
  }

  {
    const SubstrateNetwork net = SubstrateNetwork::create(
        {{"n1", 10, 5}}, {{"n1", "n1", 10, 0}});
    const FunctionCatalog catalog =
        FunctionCatalog::create({{"g1", 10, 10, 2, 2}});
    const DeploymentRequest request{"r",
                                    {{"w1", "g1", {Rational(1)}}},
                                    "a . w1 . b",
                                    {{"a", "n1"}, {"b", "n1"}},
                                    {{"a", "b"}},
                                    Rational(1),
                                    {}};
    const VnfGraph graph = buildGraph(request);
    const Assignment clean = buildAssignment(
        net, catalog, graph, {{"w1", "n1"}}, {{"w1", Role::DataCenter}},
        {{0, {"n1", "n1"}}, {1, {"n1", "n1"}}});
    Assignment broken = clean;
    broken.md[{"w1", 0}] = 0;
    broken.ms[{"w1", 0}] = 1;
    out.push_back({"f", "w1 re-homed to the switch side, overflowing it", net,
                   catalog, graph, clean, std::move(broken)});
  }

  {
    const SubstrateNetwork net = SubstrateNetwork::create(
        {{"n1", 100, 100}, {"n2", 100, 100}},
        {{"n1", "n1", 100, 0}, {"n2", "n2", 100, 0}, {"n1", "n2", 100, 1},
         {"n2", "n1", 100, 1}});
    const FunctionCatalog catalog =
        FunctionCatalog::create({{"h1", 1, 0, 1, 2}});
    const DeploymentRequest request{"r",
                                    {{"x1", "h1", {Rational(1)}},
                                     {"x2", "h1", {Rational(1)}}},
                                    "a . x1 . x2 . b",
                                    {{"a", "n1"}, {"b", "n2"}},
                                    {{"a", "b"}},
                                    Rational(1),
                                    {}};
    const VnfGraph graph = buildGraph(request);
    const std::map<std::string, Role> roles{{"x1", Role::DataCenter},
                                            {"x2", Role::DataCenter}};
    const Assignment clean = buildAssignment(
        net, catalog, graph, {{"x1", "n1"}, {"x2", "n1"}}, roles,
        {{0, {"n1", "n1"}}, {1, {"n1", "n1"}}, {2, {"n1", "n2"}}});
    Assignment broken = buildAssignment(
        net, catalog, graph, {{"x1", "n1"}, {"x2", "n2"}}, roles,
        {{0, {"n1", "n1"}}, {1, {"n1", "n2"}}, {2, {"n2", "n2"}}});
    out.push_back({"g", "a second h1 instance beyond the one allowed", net,
                   catalog, graph, clean, std::move(broken)});
  }
  {
    const SubstrateNetwork net = SubstrateNetwork::create(
        {{"n1", 100, 100}, {"n2", 100, 100}},
        {{"n1", "n1", 100, 0}, {"n2", "n2", 100, 0}, {"n1", "n2", 100, 1},
         {"n2", "n1", 100, 1}});
    const FunctionCatalog catalog =
        FunctionCatalog::create({{"h2", 1, 0, 2, 1}});
    const DeploymentRequest request{"r",
                                    {{"x1", "h2", {Rational(1)}},
                                     {"x2", "h2", {Rational(1)}}},
                                    "a . x1 . x2 . b",
                                    {{"a", "n1"}, {"b", "n2"}},
                                    {{"a", "b"}},
                                    Rational(1),
                                    {}};
    const VnfGraph graph = buildGraph(request);
    const std::map<std::string, Role> roles{{"x1", Role::DataCenter},
                                            {"x2", Role::DataCenter}};
    const Assignment clean = buildAssignment(
        net, catalog, graph, {{"x1", "n1"}, {"x2", "n2"}}, roles,
        {{0, {"n1", "n1"}}, {1, {"n1", "n2"}}, {2, {"n2", "n2"}}});
    Assignment broken = buildAssignment(
        net, catalog, graph, {{"x1", "n1"}, {"x2", "n1"}}, roles,
        {{0, {"n1", "n1"}}, {1, {"n1", "n1"}}, {2, {"n1", "n2"}}});
    out.push_back({"h", "two uses fanned into an instance that serves one",
                   net, catalog, graph, clean, std::move(broken)});
  }

  const FlowSetup flow;
  out.push_back({"i", "traffic in a host group the mapping never chose",
                 flow.net, flow.catalog, flow.graph, flow.base(),
                 flow.withStray("n2", "n1",
                                {{"p", "q"}, {"q", "r"}, {"r", "p"}})});
  out.push_back({"j", "a detour cycle re-entering the source host", flow.net,
                 flow.catalog, flow.graph, flow.base(),
                 flow.withStray("n1", "n2",
                                {{"n1", "p"}, {"p", "q"}, {"q", "n1"}})});
  out.push_back({"k", "a detour cycle leaving the sink host", flow.net,
                 flow.catalog, flow.graph, flow.base(),
                 flow.withStray("n1", "n2",
                                {{"n2", "p"}, {"p", "q"}, {"q", "n2"}})});
  out.push_back({"l", "a dangling hop with no continuation", flow.net,
                 flow.catalog, flow.graph, flow.base(),
                 flow.withStray("n1", "n2", {{"p", "q"}})});
  out.push_back({"m", "a self-loop at a node the path merely passes",
                 flow.net, flow.catalog, flow.graph, flow.base(),
                 flow.withStray("n1", "n2", {{"p", "p"}})});

  {
    const SubstrateNetwork net = SubstrateNetwork::create(
        {{"n1", 10, 10}, {"n2", 10, 10}, {"n3", 10, 10}},
        {{"n1", "n1", 50, 0}, {"n2", "n2", 50, 0}, {"n1", "n2", 1, 1},
         {"n1", "n3", 50, 1}, {"n3", "n2", 50, 1}});
    const FunctionCatalog catalog =
        FunctionCatalog::create({{"m1", 1, 0, 2, 2}});
    const DeploymentRequest request{"r",
                                    {{"z1", "m1", {Rational(1)}}},
                                    "a . z1 . b",
                                    {{"a", "n1"}, {"b", "n2"}},
                                    {{"a", "b"}},
                                    Rational(5),
                                    {}};
    const VnfGraph graph = buildGraph(request);
    const Assignment clean = buildAssignment(
        net, catalog, graph, {{"z1", "n1"}}, {{"z1", Role::DataCenter}},
        {{0, {"n1", "n1"}}, {1, {"n1", "n3", "n2"}}});
    Assignment broken = buildAssignment(
        net, catalog, graph, {{"z1", "n1"}}, {{"z1", Role::DataCenter}},
        {{0, {"n1", "n1"}}, {1, {"n1", "n2"}}});
    out.push_back({"n", "five units of traffic through a one-unit link", net,
                   catalog, graph, clean, std::move(broken)});
  }
  {
    const SubstrateNetwork net = SubstrateNetwork::create(
        {{"n1", 10, 10}, {"n2", 10, 10}, {"n3", 10, 10}},
        {{"n1", "n1", 50, 0}, {"n2", "n2", 50, 0}, {"n1", "n2", 50, 60},
         {"n1", "n3", 50, 1}, {"n3", "n2", 50, 1}});
    const FunctionCatalog catalog =
        FunctionCatalog::create({{"m1", 1, 0, 2, 2}});
    const DeploymentRequest request{"r",
                                    {{"z1", "m1", {Rational(1)}}},
                                    "a . z1 . b",
                                    {{"a", "n1"}, {"b", "n2"}},
                                    {{"a", "b"}},
                                    Rational(1),
                                    {{"a", "b", Rational(50)}}};
    const VnfGraph graph = buildGraph(request);
    const Assignment clean = buildAssignment(
        net, catalog, graph, {{"z1", "n1"}}, {{"z1", Role::DataCenter}},
        {{0, {"n1", "n1"}}, {1, {"n1", "n3", "n2"}}});
    Assignment broken = buildAssignment(
        net, catalog, graph, {{"z1", "n1"}}, {{"z1", Role::DataCenter}},
        {{0, {"n1", "n1"}}, {1, {"n1", "n2"}}});
    out.push_back({"o", "a route through a link slower than the budget", net,
                   catalog, graph, clean, std::move(broken)});
  }

  {
    Assignment broken = pair.base();
    broken.used[nodeIdx(pair.net, "n1")] = 2;
    out.push_back({"p", "a node marked used twice over", pair.net,
                   pair.catalog, pair.graph, pair.base(), std::move(broken)});
  }
  {
    Assignment broken = pair.base();
    broken.remdr[pair.net.edgeIndexOf("n2", "n1")] += 7;
    out.push_back({"q", "leftover rate overstated on an idle link", pair.net,
                   pair.catalog, pair.graph, pair.base(), std::move(broken)});
  }
  {
    Assignment broken = pair.base();
    broken.lat[2] += 3;
    out.push_back({"r", "latency booked for hops never taken", pair.net,
                   pair.catalog, pair.graph, pair.base(), std::move(broken)});
  }

  return out;
}

}  // namespace testfix
