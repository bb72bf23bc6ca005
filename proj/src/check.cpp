#include "chainforge/check.hpp"

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "chainforge/errors.hpp"
#include "chainforge/rational.hpp"

namespace chainforge::milp {

namespace {

using Json = nlohmann::ordered_json;

template <typename Map, typename Key>
int intVal(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

template <typename Map, typename Key>
Rational ratVal(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? Rational(0) : it->second;
}

std::map<int, long> latencyWeights(const VnfGraph& graph) {
  std::map<int, long> w;
  for (const auto& entry : graph.latencyBounds)
    for (const auto& path : graph.pairPaths.at(entry.first))
      for (int c : path) ++w[c];
  return w;
}

}  // namespace

std::vector<Violation> checkAssignment(const SubstrateNetwork& net,
                                       const FunctionCatalog& catalog,
                                       const VnfGraph& graph,
                                       const Assignment& asg) {
  std::vector<Violation> out;
  const auto& nodes = net.nodes();
  const auto& edges = net.edges();
  const int nv = static_cast<int>(nodes.size());
  const int ne = static_cast<int>(edges.size());
  const int ng = static_cast<int>(graph.nodes.size());
  const int nc = static_cast<int>(graph.edges.size());

  std::map<NodeId, int> nodeIdx;
  for (int v = 0; v < nv; ++v) nodeIdx.emplace(nodes[v].id, v);
  std::vector<int> esrc(static_cast<size_t>(ne));
  std::vector<int> edst(static_cast<size_t>(ne));
  for (int t = 0; t < ne; ++t) {
    esrc[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].src);
    edst[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].dst);
  }

  auto vname = [&](int v) { return nodes[static_cast<size_t>(v)].id; };
  auto add = [&](const std::string& tag, const std::string& indices,
                 const std::string& lhs, const std::string& rel,
                 const std::string& rhs) {
    out.push_back({tag, indices, lhs, rel, rhs});
  };

  // Domain pass: every indicator family is 0/1 valued.
  auto domain = [&](const std::string& tag, const std::string& indices,
                    long value) {
    if (value != 0 && value != 1)
      add(tag, indices, std::to_string(value), "in", "{0,1}");
  };
  for (const auto& kv : asg.m)
    domain("a", "m(" + kv.first.first + ", " + vname(kv.first.second) + ")",
           kv.second);
  for (const auto& kv : asg.ms)
    domain("d", "ms(" + kv.first.first + ", " + vname(kv.first.second) + ")",
           kv.second);
  for (const auto& kv : asg.md)
    domain("d", "md(" + kv.first.first + ", " + vname(kv.first.second) + ")",
           kv.second);
  for (const auto& kv : asg.inst)
    domain("c", "i(" + kv.first.first + ", " + vname(kv.first.second) + ")",
           kv.second);
  for (const auto& kv : asg.used)
    domain("p", "used(" + vname(kv.first) + ")", kv.second);
  for (const auto& kv : asg.e) {
    const EKey& k = kv.first;
    domain("i",
           "e(" + edges[static_cast<size_t>(k.edge)].src + ", " +
               edges[static_cast<size_t>(k.edge)].dst + ", " + vname(k.x) +
               ", " + vname(k.y) + ", commodity " + std::to_string(k.commodity) +
               ")",
           kv.second);
  }

  // Nonzero e entries grouped for the path families.
  std::vector<std::vector<std::pair<EKey, int>>> ebyc(
      static_cast<size_t>(nc));
  std::vector<std::vector<std::pair<EKey, int>>> ebyt(
      static_cast<size_t>(ne));
  for (const auto& kv : asg.e) {
    if (kv.second == 0) continue;
    if (kv.first.commodity < 0 || kv.first.commodity >= nc) continue;
    if (kv.first.edge < 0 || kv.first.edge >= ne) continue;
    ebyc[static_cast<size_t>(kv.first.commodity)].push_back(kv);
    ebyt[static_cast<size_t>(kv.first.edge)].push_back(kv);
  }

  auto commodityLabel = [&](int c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    return graph.nodes[static_cast<size_t>(ge.src)].id + " -> " +
           graph.nodes[static_cast<size_t>(ge.dst)].id;
  };

  // (a) every chain node mapped exactly once.
  for (int gi = 0; gi < ng; ++gi) {
    const std::string& id = graph.nodes[static_cast<size_t>(gi)].id;
    long sum = 0;
    for (int v = 0; v < nv; ++v) sum += intVal(asg.m, std::make_pair(id, v));
    if (sum != 1) add("a", "(" + id + ")", std::to_string(sum), "=", "1");
  }

  // (b) endpoints pinned to their declared node.
  for (int gi = 0; gi < ng; ++gi) {
    const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
    if (!gn.isEndpoint) continue;
    auto it = nodeIdx.find(gn.loc);
    const int val =
        it == nodeIdx.end() ? 0 : intVal(asg.m, std::make_pair(gn.id, it->second));
    if (val != 1)
      add("b", "(" + gn.id + ", " + gn.loc + ")", std::to_string(val), "=",
          "1");
  }

  const long bigM = graph.useCount() + 1;
  const long bigMF = static_cast<long>(catalog.functions().size()) + 1;

  // (c) instance indicators follow the mapping.
  for (const FunctionSpec& f : catalog.functions()) {
    for (int v = 0; v < nv; ++v) {
      long sumM = 0;
      for (int gi = 0; gi < ng; ++gi) {
        const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
        if (gn.isEndpoint || gn.function != f.id) continue;
        sumM += intVal(asg.m, std::make_pair(gn.id, v));
      }
      const long iv = intVal(asg.inst, std::make_pair(f.id, v));
      const std::string idx = "(" + f.id + ", " + vname(v) + ")";
      if (sumM > bigM * iv)
        add("c", idx, std::to_string(sumM), "<=",
            std::to_string(bigM) + " * " + std::to_string(iv));
      if (iv > sumM)
        add("c", idx, std::to_string(iv), "<=", std::to_string(sumM));
    }
  }

  // (d) one role per use and node; (e) single-style functions keep theirs.
  for (int gi = 0; gi < ng; ++gi) {
    const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
    if (gn.isEndpoint) continue;
    const FunctionSpec& f = catalog.function(gn.function);
    const bool dcOnly = f.dcDemand > 0 && sgn(f.switchDemand) == 0;
    const bool swOnly = f.switchDemand > 0 && sgn(f.dcDemand) == 0;
    for (int v = 0; v < nv; ++v) {
      const int ms = intVal(asg.ms, std::make_pair(gn.id, v));
      const int md = intVal(asg.md, std::make_pair(gn.id, v));
      const std::string idx = "(" + gn.id + ", " + vname(v) + ")";
      if (ms + md != 1)
        add("d", idx, std::to_string(ms) + " + " + std::to_string(md), "=",
            "1");
      if (dcOnly && (ms != 0 || md != 1))
        add("e", idx, "ms=" + std::to_string(ms) + ", md=" + std::to_string(md),
            "=", "ms=0, md=1");
      if (swOnly && (md != 0 || ms != 1))
        add("e", idx, "ms=" + std::to_string(ms) + ", md=" + std::to_string(md),
            "=", "ms=1, md=0");
    }
  }

  // (f) node capacities per deployment style.
  for (int v = 0; v < nv; ++v) {
    Rational dcLoad(0);
    Rational swLoad(0);
    for (int gi = 0; gi < ng; ++gi) {
      const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
      if (gn.isEndpoint) continue;
      const int m = intVal(asg.m, std::make_pair(gn.id, v));
      if (m == 0) continue;
      const FunctionSpec& f = catalog.function(gn.function);
      dcLoad += f.dcDemand * intVal(asg.md, std::make_pair(gn.id, v));
      swLoad += f.switchDemand * intVal(asg.ms, std::make_pair(gn.id, v));
    }
    if (dcLoad > nodes[static_cast<size_t>(v)].dcCapacity)
      add("f", "(dc, " + vname(v) + ")", formatRational(dcLoad), "<=",
          formatRational(nodes[static_cast<size_t>(v)].dcCapacity));
    if (swLoad > nodes[static_cast<size_t>(v)].switchCapacity)
      add("f", "(switch, " + vname(v) + ")", formatRational(swLoad), "<=",
          formatRational(nodes[static_cast<size_t>(v)].switchCapacity));
  }

  // (g) instance budget per function; (h) request fan-in per node.
  for (const FunctionSpec& f : catalog.functions()) {
    long total = 0;
    for (int v = 0; v < nv; ++v)
      total += intVal(asg.inst, std::make_pair(f.id, v));
    if (total > f.maxInstances)
      add("g", "(" + f.id + ")", std::to_string(total), "<=",
          std::to_string(f.maxInstances));
    for (int v = 0; v < nv; ++v) {
      long fan = 0;
      for (int gi = 0; gi < ng; ++gi) {
        const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
        if (!gn.isEndpoint && gn.function == f.id)
          fan += intVal(asg.m, std::make_pair(gn.id, v));
      }
      if (fan > f.maxRequests)
        add("h", "(" + f.id + ", " + vname(v) + ")", std::to_string(fan),
            "<=", std::to_string(f.maxRequests));
    }
  }

  // (i) an edge serves a commodity only between its mapped hosts.
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
    const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
    for (const auto& kv : ebyc[static_cast<size_t>(c)]) {
      const EKey& k = kv.first;
      const int mm = intVal(asg.m, std::make_pair(uid, k.x)) *
                     intVal(asg.m, std::make_pair(upid, k.y));
      if (kv.second > mm)
        add("i",
            "(" + edges[static_cast<size_t>(k.edge)].src + ", " +
                edges[static_cast<size_t>(k.edge)].dst + ", " + vname(k.x) +
                ", " + vname(k.y) + ", " + uid + ", " + upid + ")",
            std::to_string(kv.second), "<=", std::to_string(mm));
    }
  }

  // (j) unique active first edge; (k) unique active last edge. Both carry
  // the companion rule that no inactive group hosts a start or end edge.
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
    const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
    long startOn = 0, startOff = 0, endOn = 0, endOff = 0;
    for (const auto& kv : ebyc[static_cast<size_t>(c)]) {
      const EKey& k = kv.first;
      const int mm = intVal(asg.m, std::make_pair(uid, k.x)) *
                     intVal(asg.m, std::make_pair(upid, k.y));
      if (esrc[static_cast<size_t>(k.edge)] == k.x) {
        (mm == 1 ? startOn : startOff) += kv.second;
      }
      if (edst[static_cast<size_t>(k.edge)] == k.y) {
        (mm == 1 ? endOn : endOff) += kv.second;
      }
    }
    const std::string idx = "(" + commodityLabel(c) + ")";
    if (startOn != 1) add("j", idx, std::to_string(startOn), "=", "1");
    if (startOff != 0)
      add("j", idx + " inactive groups", std::to_string(startOff), "=", "0");
    if (endOn != 1) add("k", idx, std::to_string(endOn), "=", "1");
    if (endOff != 0)
      add("k", idx + " inactive groups", std::to_string(endOff), "=", "0");
  }

  // Flow rows inside every host group with traffic: no re-entry into the
  // source host (j), no departure from the sink host (k), preservation at
  // interior nodes (l).
  for (int c = 0; c < nc; ++c) {
    std::map<std::pair<int, int>, std::map<int, int>> groups;
    for (const auto& kv : ebyc[static_cast<size_t>(c)])
      groups[{kv.first.x, kv.first.y}][kv.first.edge] += kv.second;
    for (const auto& group : groups) {
      const int x = group.first.first;
      const int y = group.first.second;
      if (x == y) continue;
      for (int w = 0; w < nv; ++w) {
        long in = 0, out = 0;
        for (const auto& te : group.second) {
          const int t = te.first;
          const bool self = esrc[static_cast<size_t>(t)] ==
                            edst[static_cast<size_t>(t)];
          if (edst[static_cast<size_t>(t)] == w && !(w != x && w != y && self))
            in += te.second;
          if (esrc[static_cast<size_t>(t)] == w && !(w != x && w != y && self))
            out += te.second;
        }
        const std::string idx = "(" + commodityLabel(c) + ", x=" + vname(x) +
                                ", y=" + vname(y) + ", w=" + vname(w) + ")";
        if (w == x) {
          if (in != 0) add("j", idx, std::to_string(in), "=", "0");
        } else if (w == y) {
          if (out != 0) add("k", idx, std::to_string(out), "=", "0");
        } else if (in != out) {
          add("l", idx, std::to_string(in), "=", std::to_string(out));
        }
      }
    }
  }

  // (m) self-loop and anti-parallel discipline.
  for (int c = 0; c < nc; ++c) {
    std::map<std::pair<int, int>, std::map<int, int>> groups;
    for (const auto& kv : ebyc[static_cast<size_t>(c)])
      groups[{kv.first.x, kv.first.y}][kv.first.edge] += kv.second;
    for (const auto& group : groups) {
      const int x = group.first.first;
      const int y = group.first.second;
      for (const auto& te : group.second) {
        const int t = te.first;
        if (te.second == 0) continue;
        const int s = esrc[static_cast<size_t>(t)];
        const int d = edst[static_cast<size_t>(t)];
        const std::string idx = "(" + commodityLabel(c) + ", x=" + vname(x) +
                                ", y=" + vname(y) + ", edge " + vname(s) +
                                " -> " + vname(d) + ")";
        if (x != y && s == d) add("m", idx, "1", "=", "0");
        if (x == y && !(s == d && s == x)) add("m", idx, "1", "=", "0");
      }
      for (const auto& te : group.second) {
        const int t = te.first;
        const int s = esrc[static_cast<size_t>(t)];
        const int d = edst[static_cast<size_t>(t)];
        if (s >= d || te.second == 0) continue;
        if (!net.hasEdge(edges[static_cast<size_t>(t)].dst,
                         edges[static_cast<size_t>(t)].src))
          continue;
        const int rev = net.edgeIndexOf(edges[static_cast<size_t>(t)].dst,
                                        edges[static_cast<size_t>(t)].src);
        auto rit = group.second.find(rev);
        if (rit != group.second.end() && te.second + rit->second > 1)
          add("m",
              "(" + commodityLabel(c) + ", x=" + vname(x) + ", y=" + vname(y) +
                  ", link " + vname(s) + " <-> " + vname(d) + ")",
              std::to_string(te.second + rit->second), "<=", "1");
      }
    }
  }

  // (n) edge data-rate capacity.
  for (int t = 0; t < ne; ++t) {
    Rational flow(0);
    for (const auto& kv : ebyt[static_cast<size_t>(t)])
      flow += graph.edges[static_cast<size_t>(kv.first.commodity)].rate *
              kv.second;
    if (flow > edges[static_cast<size_t>(t)].dataRate)
      add("n",
          "(" + edges[static_cast<size_t>(t)].src + ", " +
              edges[static_cast<size_t>(t)].dst + ")",
          formatRational(flow), "<=",
          formatRational(edges[static_cast<size_t>(t)].dataRate));
  }

  // (o) end-to-end latency budget per bounded endpoint pair.
  for (const auto& entry : graph.latencyBounds) {
    auto pit = graph.pairPaths.find(entry.first);
    if (pit == graph.pairPaths.end())
      throw Error(
          "latency bounds are present but endpoint-pair paths were not "
          "enumerated for this graph");
    std::set<int> commodities;
    for (const auto& path : pit->second)
      commodities.insert(path.begin(), path.end());
    Rational total(0);
    for (int c : commodities)
      for (const auto& kv : ebyc[static_cast<size_t>(c)])
        total +=
            edges[static_cast<size_t>(kv.first.edge)].latency * kv.second;
    if (total > entry.second)
      add("o",
          "(" + graph.nodes[static_cast<size_t>(entry.first.first)].id + ", " +
              graph.nodes[static_cast<size_t>(entry.first.second)].id + ")",
          formatRational(total), "<=", formatRational(entry.second));
  }

  // (p) used marking follows the instance indicators.
  for (int v = 0; v < nv; ++v) {
    long sumI = 0;
    for (const FunctionSpec& f : catalog.functions())
      sumI += intVal(asg.inst, std::make_pair(f.id, v));
    const long uv = intVal(asg.used, v);
    const std::string idx = "(" + vname(v) + ")";
    if (sumI > bigMF * uv)
      add("p", idx, std::to_string(sumI), "<=",
          std::to_string(bigMF) + " * " + std::to_string(uv));
    if (uv > sumI)
      add("p", idx, std::to_string(uv), "<=", std::to_string(sumI));
  }

  // (q) remaining data rate bookkeeping per edge.
  for (int t = 0; t < ne; ++t) {
    Rational flow(0);
    for (const auto& kv : ebyt[static_cast<size_t>(t)])
      flow += graph.edges[static_cast<size_t>(kv.first.commodity)].rate *
              kv.second;
    const Rational expect = edges[static_cast<size_t>(t)].dataRate - flow;
    const Rational got = ratVal(asg.remdr, t);
    if (got != expect)
      add("q",
          "(" + edges[static_cast<size_t>(t)].src + ", " +
              edges[static_cast<size_t>(t)].dst + ")",
          formatRational(got), "=", formatRational(expect));
  }

  // (r) per-commodity latency bookkeeping.
  for (int c = 0; c < nc; ++c) {
    Rational sum(0);
    for (const auto& kv : ebyc[static_cast<size_t>(c)])
      sum += edges[static_cast<size_t>(kv.first.edge)].latency * kv.second;
    const Rational got = ratVal(asg.lat, c);
    if (got != sum)
      add("r", "(" + commodityLabel(c) + ")", formatRational(got), "=",
          formatRational(sum));
  }

  return out;
}

Assignment toAssignment(const SubstrateNetwork& net,
                        const FunctionCatalog& catalog, const VnfGraph& graph,
                        const PlacementSolution& sol) {
  (void)catalog;
  Assignment asg;
  const auto& nodes = net.nodes();
  const int nv = static_cast<int>(nodes.size());
  std::map<NodeId, int> nodeIdx;
  for (int v = 0; v < nv; ++v) nodeIdx.emplace(nodes[v].id, v);

  for (const auto& kv : sol.mapping) {
    auto it = nodeIdx.find(kv.second);
    if (it != nodeIdx.end()) asg.m[{kv.first, it->second}] = 1;
  }

  for (const auto& gn : graph.nodes) {
    if (gn.isEndpoint) continue;
    auto rit = sol.roles.find(gn.id);
    if (rit == sol.roles.end()) continue;
    for (int v = 0; v < nv; ++v) {
      if (rit->second == Role::Switch)
        asg.ms[{gn.id, v}] = 1;
      else
        asg.md[{gn.id, v}] = 1;
    }
  }

  for (const auto& kv : sol.instanceCount) {
    auto it = nodeIdx.find(kv.first.second);
    if (it != nodeIdx.end() && kv.second != 0)
      asg.inst[{kv.first.first, it->second}] = static_cast<int>(kv.second);
  }

  for (int c = 0; c < static_cast<int>(graph.edges.size()); ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
    const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
    auto pit = sol.pathEdges.find({uid, upid});
    if (pit == sol.pathEdges.end()) continue;
    auto mu = sol.mapping.find(uid);
    auto mup = sol.mapping.find(upid);
    if (mu == sol.mapping.end() || mup == sol.mapping.end()) continue;
    auto xit = nodeIdx.find(mu->second);
    auto yit = nodeIdx.find(mup->second);
    if (xit == nodeIdx.end() || yit == nodeIdx.end()) continue;
    for (const auto& hop : pit->second) {
      if (!net.hasEdge(hop.first, hop.second)) continue;
      asg.e[EKey{net.edgeIndexOf(hop.first, hop.second), xit->second,
                 yit->second, c}] = 1;
    }
  }

  for (const NodeId& v : sol.usedNodes) {
    auto it = nodeIdx.find(v);
    if (it != nodeIdx.end()) asg.used[it->second] = 1;
  }

  for (const auto& kv : sol.remainingRate) {
    if (!net.hasEdge(kv.first.first, kv.first.second)) continue;
    asg.remdr[net.edgeIndexOf(kv.first.first, kv.first.second)] = kv.second;
  }

  for (const auto& kv : sol.pathLatency) {
    auto sit = graph.nodeIndex.find(kv.first.first);
    auto dit = graph.nodeIndex.find(kv.first.second);
    if (sit == graph.nodeIndex.end() || dit == graph.nodeIndex.end()) continue;
    auto eit = graph.edgeIndex.find({sit->second, dit->second});
    if (eit == graph.edgeIndex.end()) continue;
    asg.lat[eit->second] = kv.second;
  }

  return asg;
}

ObjectiveValues computeObjectives(const SubstrateNetwork& net,
                                  const VnfGraph& graph,
                                  const Assignment& asg) {
  ObjectiveValues out;
  const auto& edges = net.edges();
  const int ne = static_cast<int>(edges.size());

  std::vector<Rational> flow(static_cast<size_t>(ne), Rational(0));
  std::vector<Rational> latPer(graph.edges.size(), Rational(0));
  for (const auto& kv : asg.e) {
    if (kv.second == 0) continue;
    const EKey& k = kv.first;
    if (k.edge < 0 || k.edge >= ne) continue;
    if (k.commodity < 0 ||
        k.commodity >= static_cast<int>(graph.edges.size()))
      continue;
    flow[static_cast<size_t>(k.edge)] +=
        graph.edges[static_cast<size_t>(k.commodity)].rate * kv.second;
    latPer[static_cast<size_t>(k.commodity)] +=
        edges[static_cast<size_t>(k.edge)].latency * kv.second;
  }

  out.remdr = 0;
  for (int t = 0; t < ne; ++t) {
    if (edges[static_cast<size_t>(t)].src == edges[static_cast<size_t>(t)].dst)
      continue;
    out.remdr +=
        edges[static_cast<size_t>(t)].dataRate - flow[static_cast<size_t>(t)];
  }

  out.usedNodes = 0;
  for (const auto& kv : asg.used) out.usedNodes += kv.second;

  out.latency = 0;
  for (const auto& kv : latencyWeights(graph))
    out.latency += Rational(kv.second) * latPer[static_cast<size_t>(kv.first)];

  return out;
}

CheckReport checkSolution(const SubstrateNetwork& net,
                          const FunctionCatalog& catalog,
                          const VnfGraph& graph,
                          const PlacementSolution& sol) {
  CheckReport rep;
  const Assignment asg = toAssignment(net, catalog, graph, sol);
  rep.violations = checkAssignment(net, catalog, graph, asg);
  rep.recomputed = computeObjectives(net, graph, asg);
  rep.remdrMismatch = rep.recomputed.remdr != sol.objectiveValues.remdr;
  rep.usedNodesMismatch =
      rep.recomputed.usedNodes != sol.objectiveValues.usedNodes;
  rep.latencyMismatch = rep.recomputed.latency != sol.objectiveValues.latency;
  return rep;
}

std::string CheckReport::toJson() const {
  Json doc;
  doc["violations"] = Json::array();
  for (const Violation& v : violations) {
    Json item;
    item["tag"] = v.tag;
    item["indices"] = v.indices;
    item["lhs"] = v.lhs;
    item["relation"] = v.relation;
    item["rhs"] = v.rhs;
    doc["violations"].push_back(std::move(item));
  }
  doc["recomputed"]["remdr"] = formatRational(recomputed.remdr);
  doc["recomputed"]["used_nodes"] = recomputed.usedNodes;
  doc["recomputed"]["latency"] = formatRational(recomputed.latency);
  doc["remdr_mismatch"] = remdrMismatch;
  doc["used_nodes_mismatch"] = usedNodesMismatch;
  doc["latency_mismatch"] = latencyMismatch;
  return doc.dump(2);
}

}  // namespace chainforge::milp
