#include "chainforge/milp.hpp"

#include <cctype>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/errors.hpp"

namespace chainforge::milp {

namespace {

std::string clean(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? c : '_');
  }
  return out;
}

std::string num(long v) { return std::to_string(v); }

}  // namespace

const char* metricName(Metric m) {
  switch (m) {
    case Metric::Remdr:
      return "REMDR";
    case Metric::UsedNodes:
      return "USED_NODES";
    case Metric::Latency:
      return "LATENCY";
  }
  return "?";
}

Metric metricFromName(const std::string& name) {
  std::string up;
  up.reserve(name.size());
  for (char c : name)
    up.push_back(
        static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  for (Metric m : kAllMetrics)
    if (up == metricName(m)) return m;
  throw Error("unknown objective '" + name +
              "'; expected REMDR, USED_NODES or LATENCY");
}

bool metricIsMaximize(Metric m) { return m == Metric::Remdr; }

VarRef PlacementInstance::addVar(Var v) {
  if (varIndex.count(v.name) != 0) {
    const std::string base = v.name;
    int k = 2;
    do {
      v.name = base + "__" + std::to_string(k++);
    } while (varIndex.count(v.name) != 0);
  }
  const VarRef ref = static_cast<VarRef>(vars.size());
  varIndex.emplace(v.name, ref);
  vars.push_back(std::move(v));
  return ref;
}

VarRef PlacementInstance::findVar(const std::string& name) const {
  auto it = varIndex.find(name);
  if (it == varIndex.end()) throw Error("unknown variable '" + name + "'");
  return it->second;
}

VarRef linearizeProduct(PlacementInstance& inst, VarRef x, VarRef y) {
  if (inst.vars.at(static_cast<size_t>(x)).kind != VarKind::Binary ||
      inst.vars.at(static_cast<size_t>(y)).kind != VarKind::Binary)
    throw Error("linearizeProduct requires binary operands");
  if (x == y) return x;
  if (x > y) std::swap(x, y);
  const auto key = std::make_pair(x, y);
  auto it = inst.productAux.find(key);
  if (it != inst.productAux.end()) return it->second;

  const std::string name = "and_" + inst.vars[static_cast<size_t>(x)].name +
                           "__" + inst.vars[static_cast<size_t>(y)].name;
  const VarRef z = inst.addVar({name, VarKind::Binary, {}, {}});
  const std::string& zn = inst.vars[static_cast<size_t>(z)].name;
  inst.rows.push_back({zn + "_le1", {{1, z}, {-1, x}}, Rel::Le, 0, "lin"});
  inst.rows.push_back({zn + "_le2", {{1, z}, {-1, y}}, Rel::Le, 0, "lin"});
  inst.rows.push_back(
      {zn + "_ge", {{1, z}, {-1, x}, {-1, y}}, Rel::Ge, -1, "lin"});
  inst.productAux.emplace(key, z);
  return z;
}

PlacementInstance buildInstance(const SubstrateNetwork& net,
                                const FunctionCatalog& catalog,
                                const VnfGraph& graph) {
  PlacementInstance inst;
  inst.net = &net;
  inst.catalog = &catalog;
  inst.graph = &graph;

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
  std::vector<std::vector<int>> outEdges(static_cast<size_t>(nv));
  std::vector<std::vector<int>> inEdges(static_cast<size_t>(nv));
  for (int t = 0; t < ne; ++t) {
    esrc[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].src);
    edst[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].dst);
    outEdges[static_cast<size_t>(esrc[static_cast<size_t>(t)])].push_back(t);
    inEdges[static_cast<size_t>(edst[static_cast<size_t>(t)])].push_back(t);
  }

  std::vector<const FunctionSpec*> spec(static_cast<size_t>(ng), nullptr);
  for (int gi = 0; gi < ng; ++gi) {
    const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
    if (gn.isEndpoint) {
      if (nodeIdx.count(gn.loc) == 0)
        throw ValidationError("endpoint '" + gn.id +
                              "' is pinned to unknown network node '" +
                              gn.loc + "'");
    } else {
      if (!catalog.hasFunction(gn.function))
        throw ValidationError("use '" + gn.id +
                              "' references unknown function '" + gn.function +
                              "'");
      spec[static_cast<size_t>(gi)] = &catalog.function(gn.function);
    }
  }
  for (const auto& entry : graph.latencyBounds) {
    if (graph.pairPaths.count(entry.first) == 0)
      throw Error(
          "latency bounds are present but endpoint-pair paths were not "
          "enumerated for this graph");
  }

  inst.candidates.assign(static_cast<size_t>(ng), {});
  for (int gi = 0; gi < ng; ++gi) {
    auto& cand = inst.candidates[static_cast<size_t>(gi)];
    const FunctionSpec* f = spec[static_cast<size_t>(gi)];
    for (int v = 0; v < nv; ++v) {
      if (f != nullptr) {
        const NodeSpec& host = nodes[static_cast<size_t>(v)];
        const bool dcFits = f->dcDemand > 0 && f->dcDemand <= host.dcCapacity;
        const bool swFits =
            f->switchDemand > 0 && f->switchDemand <= host.switchCapacity;
        if (!dcFits && !swFits) continue;
      }
      cand.push_back(v);
    }
  }

  const Rational bigM(graph.useCount() + 1);
  const Rational bigMF(static_cast<long>(catalog.functions().size()) + 1);

  // Variables. Creation order doubles as the default branching order of the
  // monolithic solver: mapping first, roles, instance and usage markers,
  // then path edges; continuous metrics and product auxiliaries come last.
  for (int gi = 0; gi < ng; ++gi) {
    const std::string gname = clean(graph.nodes[static_cast<size_t>(gi)].id);
    for (int v : inst.candidates[static_cast<size_t>(gi)]) {
      const std::string vname = clean(nodes[static_cast<size_t>(v)].id);
      inst.mVar[{gi, v}] =
          inst.addVar({"m_" + gname + "_" + vname, VarKind::Binary, {}, {}});
    }
  }
  for (int gi = 0; gi < ng; ++gi) {
    if (spec[static_cast<size_t>(gi)] == nullptr) continue;
    const std::string gname = clean(graph.nodes[static_cast<size_t>(gi)].id);
    for (int v : inst.candidates[static_cast<size_t>(gi)]) {
      const std::string vname = clean(nodes[static_cast<size_t>(v)].id);
      inst.msVar[{gi, v}] =
          inst.addVar({"ms_" + gname + "_" + vname, VarKind::Binary, {}, {}});
      inst.mdVar[{gi, v}] =
          inst.addVar({"md_" + gname + "_" + vname, VarKind::Binary, {}, {}});
    }
  }

  std::map<FunctionId, std::vector<int>> usesByFunction;
  for (int gi = 0; gi < ng; ++gi)
    if (spec[static_cast<size_t>(gi)] != nullptr)
      usesByFunction[graph.nodes[static_cast<size_t>(gi)].function].push_back(
          gi);

  for (const FunctionSpec& f : catalog.functions()) {
    auto it = usesByFunction.find(f.id);
    if (it == usesByFunction.end()) continue;
    std::set<int> dom;
    for (int gi : it->second)
      dom.insert(inst.candidates[static_cast<size_t>(gi)].begin(),
                 inst.candidates[static_cast<size_t>(gi)].end());
    for (int v : dom) {
      const std::string vname = clean(nodes[static_cast<size_t>(v)].id);
      inst.iVar[{f.id, v}] = inst.addVar(
          {"i_" + clean(f.id) + "_" + vname, VarKind::Binary, {}, {}});
    }
  }

  std::set<int> usedDom;
  for (const auto& entry : inst.iVar) usedDom.insert(entry.first.second);
  for (int v : usedDom)
    inst.usedVar[v] =
        inst.addVar({"used_" + clean(nodes[static_cast<size_t>(v)].id),
                     VarKind::Binary,
                     {},
                     {}});

  // comGroups[c][(x,y)] holds the group's e variables positionally by
  // substrate edge index; every group spans the full edge set.
  std::vector<std::map<std::pair<int, int>, std::vector<VarRef>>> comGroups(
      static_cast<size_t>(nc));
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const std::string uname = clean(graph.nodes[static_cast<size_t>(ge.src)].id);
    const std::string upname =
        clean(graph.nodes[static_cast<size_t>(ge.dst)].id);
    for (int x : inst.candidates[static_cast<size_t>(ge.src)]) {
      const std::string xname = clean(nodes[static_cast<size_t>(x)].id);
      for (int y : inst.candidates[static_cast<size_t>(ge.dst)]) {
        const std::string yname = clean(nodes[static_cast<size_t>(y)].id);
        auto& slot = comGroups[static_cast<size_t>(c)][{x, y}];
        slot.reserve(static_cast<size_t>(ne));
        for (int t = 0; t < ne; ++t) {
          const SubstrateEdge& se = edges[static_cast<size_t>(t)];
          const VarRef ref = inst.addVar({"e_" + clean(se.src) + "_" +
                                              clean(se.dst) + "_" + xname +
                                              "_" + yname + "_" + uname + "_" +
                                              upname,
                                          VarKind::Binary,
                                          {},
                                          {}});
          inst.eVar[EKey{t, x, y, c}] = ref;
          slot.push_back(ref);
        }
      }
    }
  }

  for (int t = 0; t < ne; ++t) {
    const SubstrateEdge& se = edges[static_cast<size_t>(t)];
    inst.remdrVar[t] =
        inst.addVar({"remdr_" + clean(se.src) + "_" + clean(se.dst),
                     VarKind::Continuous, Rational(0), {}});
  }
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    inst.latVar[c] = inst.addVar(
        {"lat_" + clean(graph.nodes[static_cast<size_t>(ge.src)].id) + "_" +
             clean(graph.nodes[static_cast<size_t>(ge.dst)].id),
         VarKind::Continuous, Rational(0), {}});
  }

  // (a) every chain node is mapped to exactly one substrate node.
  for (int gi = 0; gi < ng; ++gi) {
    LinRow row;
    row.name = "a_" + clean(graph.nodes[static_cast<size_t>(gi)].id);
    row.family = "a";
    row.rel = Rel::Eq;
    row.rhs = 1;
    for (int v : inst.candidates[static_cast<size_t>(gi)])
      row.terms.push_back({1, inst.mVar.at({gi, v})});
    inst.rows.push_back(std::move(row));
  }

  // (b) endpoints sit on their declared substrate node.
  for (int gi = 0; gi < ng; ++gi) {
    const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
    if (!gn.isEndpoint) continue;
    const int loc = nodeIdx.at(gn.loc);
    inst.rows.push_back({"b_" + clean(gn.id),
                         {{1, inst.mVar.at({gi, loc})}},
                         Rel::Eq,
                         1,
                         "b"});
  }

  // (c) instance indicators follow the mapping.
  for (const auto& entry : inst.iVar) {
    const FunctionId& f = entry.first.first;
    const int v = entry.first.second;
    const VarRef iv = entry.second;
    const std::string label = clean(f) + "_" + clean(nodes[static_cast<size_t>(v)].id);
    LinRow up;
    up.name = "c1_" + label;
    up.family = "c";
    up.rel = Rel::Le;
    up.rhs = 0;
    LinRow down;
    down.name = "c2_" + label;
    down.family = "c";
    down.rel = Rel::Le;
    down.rhs = 0;
    for (int gi : usesByFunction.at(f)) {
      auto mit = inst.mVar.find({gi, v});
      if (mit == inst.mVar.end()) continue;
      up.terms.push_back({1, mit->second});
      down.terms.push_back({-1, mit->second});
    }
    up.terms.push_back({-bigM, iv});
    down.terms.insert(down.terms.begin(), {1, iv});
    inst.rows.push_back(std::move(up));
    inst.rows.push_back(std::move(down));
  }

  // (d) every mapped use takes exactly one role per host.
  for (int gi = 0; gi < ng; ++gi) {
    if (spec[static_cast<size_t>(gi)] == nullptr) continue;
    const std::string gname = clean(graph.nodes[static_cast<size_t>(gi)].id);
    for (int v : inst.candidates[static_cast<size_t>(gi)]) {
      inst.rows.push_back(
          {"d_" + gname + "_" + clean(nodes[static_cast<size_t>(v)].id),
           {{1, inst.msVar.at({gi, v})}, {1, inst.mdVar.at({gi, v})}},
           Rel::Eq,
           1,
           "d"});
    }
  }

  // (e) functions with a single deployment style are locked to it.
  for (int gi = 0; gi < ng; ++gi) {
    const FunctionSpec* f = spec[static_cast<size_t>(gi)];
    if (f == nullptr) continue;
    const bool dcOnly = f->dcDemand > 0 && f->switchDemand == 0;
    const bool swOnly = f->switchDemand > 0 && f->dcDemand == 0;
    if (!dcOnly && !swOnly) continue;
    const std::string gname = clean(graph.nodes[static_cast<size_t>(gi)].id);
    for (int v : inst.candidates[static_cast<size_t>(gi)]) {
      const std::string label =
          gname + "_" + clean(nodes[static_cast<size_t>(v)].id);
      const VarRef ms = inst.msVar.at({gi, v});
      const VarRef md = inst.mdVar.at({gi, v});
      if (dcOnly) {
        inst.rows.push_back({"e1_" + label, {{1, ms}}, Rel::Eq, 0, "e"});
        inst.rows.push_back({"e2_" + label, {{1, md}}, Rel::Eq, 1, "e"});
      } else {
        inst.rows.push_back({"e1_" + label, {{1, md}}, Rel::Eq, 0, "e"});
        inst.rows.push_back({"e2_" + label, {{1, ms}}, Rel::Eq, 1, "e"});
      }
    }
  }

  // (f) node capacities per deployment style.
  for (int v = 0; v < nv; ++v) {
    LinRow dc;
    dc.name = "f_dc_" + clean(nodes[static_cast<size_t>(v)].id);
    dc.family = "f";
    dc.rel = Rel::Le;
    dc.rhs = nodes[static_cast<size_t>(v)].dcCapacity;
    LinRow sw;
    sw.name = "f_sw_" + clean(nodes[static_cast<size_t>(v)].id);
    sw.family = "f";
    sw.rel = Rel::Le;
    sw.rhs = nodes[static_cast<size_t>(v)].switchCapacity;
    for (int gi = 0; gi < ng; ++gi) {
      const FunctionSpec* f = spec[static_cast<size_t>(gi)];
      if (f == nullptr) continue;
      auto mit = inst.mVar.find({gi, v});
      if (mit == inst.mVar.end()) continue;
      if (f->dcDemand > 0) {
        const VarRef z =
            linearizeProduct(inst, mit->second, inst.mdVar.at({gi, v}));
        dc.terms.push_back({f->dcDemand, z});
      }
      if (f->switchDemand > 0) {
        const VarRef z =
            linearizeProduct(inst, mit->second, inst.msVar.at({gi, v}));
        sw.terms.push_back({f->switchDemand, z});
      }
    }
    if (!dc.terms.empty()) inst.rows.push_back(std::move(dc));
    if (!sw.terms.empty()) inst.rows.push_back(std::move(sw));
  }

  // (g) network-wide instance budget per function.
  for (const FunctionSpec& f : catalog.functions()) {
    LinRow row;
    row.name = "g_" + clean(f.id);
    row.family = "g";
    row.rel = Rel::Le;
    row.rhs = f.maxInstances;
    for (const auto& entry : inst.iVar)
      if (entry.first.first == f.id) row.terms.push_back({1, entry.second});
    if (!row.terms.empty()) inst.rows.push_back(std::move(row));
  }

  // (h) per-node request fan-in per function.
  for (const auto& entry : inst.iVar) {
    const FunctionId& f = entry.first.first;
    const int v = entry.first.second;
    LinRow row;
    row.name = "h_" + clean(f) + "_" + clean(nodes[static_cast<size_t>(v)].id);
    row.family = "h";
    row.rel = Rel::Le;
    row.rhs = catalog.function(f).maxRequests;
    for (int gi : usesByFunction.at(f)) {
      auto mit = inst.mVar.find({gi, v});
      if (mit != inst.mVar.end()) row.terms.push_back({1, mit->second});
    }
    inst.rows.push_back(std::move(row));
  }

  // (i) an edge can only serve a commodity whose ends sit on (x, y).
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    for (const auto& group : comGroups[static_cast<size_t>(c)]) {
      const int x = group.first.first;
      const int y = group.first.second;
      const VarRef mm = linearizeProduct(inst, inst.mVar.at({ge.src, x}),
                                         inst.mVar.at({ge.dst, y}));
      for (int t = 0; t < ne; ++t) {
        inst.rows.push_back({"i_" + num(c) + "_" + num(t) + "_" + num(x) +
                                 "_" + num(y),
                             {{1, group.second[static_cast<size_t>(t)]},
                              {-1, mm}},
                             Rel::Le,
                             0,
                             "i"});
      }
    }
  }

  // (j) each commodity's path starts on exactly one edge leaving its
  // source host; (k) it ends on exactly one edge entering its sink host.
  for (int c = 0; c < nc; ++c) {
    LinRow start;
    start.name = "j_" + num(c);
    start.family = "j";
    start.rel = Rel::Eq;
    start.rhs = 1;
    LinRow end;
    end.name = "k_" + num(c);
    end.family = "k";
    end.rel = Rel::Eq;
    end.rhs = 1;
    for (const auto& group : comGroups[static_cast<size_t>(c)]) {
      for (int t : outEdges[static_cast<size_t>(group.first.first)])
        start.terms.push_back({1, group.second[static_cast<size_t>(t)]});
      for (int t : inEdges[static_cast<size_t>(group.first.second)])
        end.terms.push_back({1, group.second[static_cast<size_t>(t)]});
    }
    inst.rows.push_back(std::move(start));
    inst.rows.push_back(std::move(end));
  }

  // (l) flow preservation at interior nodes: they forward what they
  // receive. The boundary rows live with the start and end families: the
  // path never re-enters its source host (j) or leaves its sink host (k).
  for (int c = 0; c < nc; ++c) {
    for (const auto& group : comGroups[static_cast<size_t>(c)]) {
      const int x = group.first.first;
      const int y = group.first.second;
      if (x == y) continue;
      const auto& evars = group.second;
      for (int w = 0; w < nv; ++w) {
        LinRow row;
        row.rel = Rel::Eq;
        row.rhs = 0;
        const std::string suffix =
            num(c) + "_" + num(x) + "_" + num(y) + "_" + num(w);
        if (w == x) {
          row.name = "j2_" + suffix;
          row.family = "j";
          for (int t : inEdges[static_cast<size_t>(w)])
            row.terms.push_back({1, evars[static_cast<size_t>(t)]});
        } else if (w == y) {
          row.name = "k2_" + suffix;
          row.family = "k";
          for (int t : outEdges[static_cast<size_t>(w)])
            row.terms.push_back({1, evars[static_cast<size_t>(t)]});
        } else {
          row.name = "l_" + suffix;
          row.family = "l";
          for (int t : inEdges[static_cast<size_t>(w)])
            if (esrc[static_cast<size_t>(t)] != w)
              row.terms.push_back({1, evars[static_cast<size_t>(t)]});
          for (int t : outEdges[static_cast<size_t>(w)])
            if (edst[static_cast<size_t>(t)] != w)
              row.terms.push_back({-1, evars[static_cast<size_t>(t)]});
        }
        if (!row.terms.empty()) inst.rows.push_back(std::move(row));
      }
    }
  }

  // (m) self-loops only stand for co-location: forbidden when the hosts
  // differ, and the only admissible edge when they coincide. A path also
  // never uses both directions of a link.
  std::vector<std::pair<int, int>> antiPairs;
  for (int t = 0; t < ne; ++t) {
    const int s = esrc[static_cast<size_t>(t)];
    const int d = edst[static_cast<size_t>(t)];
    if (s >= d) continue;
    const SubstrateEdge& se = edges[static_cast<size_t>(t)];
    if (net.hasEdge(se.dst, se.src))
      antiPairs.push_back({t, net.edgeIndexOf(se.dst, se.src)});
  }
  for (int c = 0; c < nc; ++c) {
    for (const auto& group : comGroups[static_cast<size_t>(c)]) {
      const int x = group.first.first;
      const int y = group.first.second;
      const auto& evars = group.second;
      const std::string label = num(c) + "_" + num(x) + "_" + num(y);
      for (int t = 0; t < ne; ++t) {
        const bool selfLoop =
            esrc[static_cast<size_t>(t)] == edst[static_cast<size_t>(t)];
        const bool banned =
            x != y ? selfLoop
                   : !(selfLoop && esrc[static_cast<size_t>(t)] == x);
        if (banned)
          inst.rows.push_back({"m_" + label + "_" + num(t),
                               {{1, evars[static_cast<size_t>(t)]}},
                               Rel::Eq,
                               0,
                               "m"});
      }
      for (const auto& ap : antiPairs) {
        inst.rows.push_back({"m2_" + label + "_" + num(ap.first),
                             {{1, evars[static_cast<size_t>(ap.first)]},
                              {1, evars[static_cast<size_t>(ap.second)]}},
                             Rel::Le,
                             1,
                             "m"});
      }
    }
  }

  // (n) edge data-rate capacity across all commodities.
  for (int t = 0; t < ne; ++t) {
    LinRow row;
    row.name = "n_" + num(t);
    row.family = "n";
    row.rel = Rel::Le;
    row.rhs = edges[static_cast<size_t>(t)].dataRate;
    for (int c = 0; c < nc; ++c) {
      const Rational& rate = graph.edges[static_cast<size_t>(c)].rate;
      if (sgn(rate) == 0) continue;
      for (const auto& group : comGroups[static_cast<size_t>(c)])
        row.terms.push_back({rate, group.second[static_cast<size_t>(t)]});
    }
    if (!row.terms.empty()) inst.rows.push_back(std::move(row));
  }

  // (o) per bounded endpoint pair, the latency accumulated on every edge
  // serving any commodity on one of its paths stays within the bound.
  for (const auto& entry : graph.latencyBounds) {
    const auto& pr = entry.first;
    std::set<int> commodities;
    for (const auto& path : graph.pairPaths.at(pr))
      commodities.insert(path.begin(), path.end());
    LinRow row;
    row.name = "o_" + clean(graph.nodes[static_cast<size_t>(pr.first)].id) +
               "_" + clean(graph.nodes[static_cast<size_t>(pr.second)].id);
    row.family = "o";
    row.rel = Rel::Le;
    row.rhs = entry.second;
    for (int c : commodities) {
      for (const auto& group : comGroups[static_cast<size_t>(c)]) {
        for (int t = 0; t < ne; ++t) {
          const Rational& l = edges[static_cast<size_t>(t)].latency;
          if (sgn(l) == 0) continue;
          row.terms.push_back({l, group.second[static_cast<size_t>(t)]});
        }
      }
    }
    inst.rows.push_back(std::move(row));
  }

  // (p) a node is used exactly when it hosts at least one instance.
  for (const auto& entry : inst.usedVar) {
    const int v = entry.first;
    const VarRef uv = entry.second;
    const std::string label = clean(nodes[static_cast<size_t>(v)].id);
    LinRow up;
    up.name = "p1_" + label;
    up.family = "p";
    up.rel = Rel::Le;
    up.rhs = 0;
    LinRow down;
    down.name = "p2_" + label;
    down.family = "p";
    down.rel = Rel::Le;
    down.rhs = 0;
    down.terms.push_back({1, uv});
    for (const auto& ivEntry : inst.iVar) {
      if (ivEntry.first.second != v) continue;
      up.terms.push_back({1, ivEntry.second});
      down.terms.push_back({-1, ivEntry.second});
    }
    up.terms.push_back({-bigMF, uv});
    inst.rows.push_back(std::move(up));
    inst.rows.push_back(std::move(down));
  }

  // (q) remaining data rate per edge after routing.
  for (int t = 0; t < ne; ++t) {
    LinRow row;
    row.name = "q_" + num(t);
    row.family = "q";
    row.rel = Rel::Eq;
    row.rhs = edges[static_cast<size_t>(t)].dataRate;
    row.terms.push_back({1, inst.remdrVar.at(t)});
    for (int c = 0; c < nc; ++c) {
      const Rational& rate = graph.edges[static_cast<size_t>(c)].rate;
      if (sgn(rate) == 0) continue;
      for (const auto& group : comGroups[static_cast<size_t>(c)])
        row.terms.push_back({rate, group.second[static_cast<size_t>(t)]});
    }
    inst.rows.push_back(std::move(row));
  }

  // (r) per-commodity path latency.
  for (int c = 0; c < nc; ++c) {
    LinRow row;
    row.name = "r_" + num(c);
    row.family = "r";
    row.rel = Rel::Eq;
    row.rhs = 0;
    row.terms.push_back({1, inst.latVar.at(c)});
    for (const auto& group : comGroups[static_cast<size_t>(c)]) {
      for (int t = 0; t < ne; ++t) {
        const Rational& l = edges[static_cast<size_t>(t)].latency;
        if (sgn(l) == 0) continue;
        row.terms.push_back({-l, group.second[static_cast<size_t>(t)]});
      }
    }
    inst.rows.push_back(std::move(row));
  }

  // Objectives.
  LinExpr remdr;
  for (int t = 0; t < ne; ++t)
    if (esrc[static_cast<size_t>(t)] != edst[static_cast<size_t>(t)])
      remdr.terms.push_back({1, inst.remdrVar.at(t)});
  inst.objectives[static_cast<size_t>(Metric::Remdr)] = std::move(remdr);

  LinExpr used;
  for (const auto& entry : inst.usedVar)
    used.terms.push_back({1, entry.second});
  inst.objectives[static_cast<size_t>(Metric::UsedNodes)] = std::move(used);

  for (const auto& entry : graph.latencyBounds)
    for (const auto& path : graph.pairPaths.at(entry.first))
      for (int c : path) ++inst.latencyWeight[c];
  LinExpr lat;
  for (const auto& entry : inst.latencyWeight)
    if (entry.second > 0)
      lat.terms.push_back({entry.second, inst.latVar.at(entry.first)});
  inst.objectives[static_cast<size_t>(Metric::Latency)] = std::move(lat);

  return inst;
}

}  // namespace chainforge::milp
