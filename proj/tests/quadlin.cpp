#include "quadlin.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include "chainforge/chain_lang.hpp"
#include "chainforge/milp.hpp"

namespace testquadlin {

namespace {

using chainforge::DeploymentRequest;
using chainforge::FunctionCatalog;
using chainforge::FunctionSpec;
using chainforge::NodeSpec;
using chainforge::Rational;
using chainforge::SubstrateEdge;
using chainforge::SubstrateNetwork;
using chainforge::VnfEdge;
using chainforge::VnfGraph;
using chainforge::milp::EKey;
using chainforge::milp::PlacementInstance;
using chainforge::milp::Rel;
using chainforge::milp::VarKind;
using chainforge::milp::VarRef;

// Evaluates the rule families in their original product form, quantified
// over the instance's variable support. Independent of the instance's
// assembled rows; shares only the variable maps and the model data.
class QuadEvaluator {
 public:
  QuadEvaluator(const SubstrateNetwork& net, const FunctionCatalog& catalog,
                const VnfGraph& graph, const PlacementInstance& inst)
      : net_(net), catalog_(catalog), graph_(graph), inst_(inst) {
    const auto& nodes = net.nodes();
    const auto& edges = net.edges();
    nv_ = static_cast<int>(nodes.size());
    ne_ = static_cast<int>(edges.size());
    ng_ = static_cast<int>(graph.nodes.size());
    nc_ = static_cast<int>(graph.edges.size());

    for (int v = 0; v < nv_; ++v) nodeIdx_.emplace(nodes[size_t(v)].id, v);
    esrc_.resize(size_t(ne_));
    edst_.resize(size_t(ne_));
    outEdges_.resize(size_t(nv_));
    inEdges_.resize(size_t(nv_));
    for (int t = 0; t < ne_; ++t) {
      esrc_[size_t(t)] = nodeIdx_.at(edges[size_t(t)].src);
      edst_[size_t(t)] = nodeIdx_.at(edges[size_t(t)].dst);
      outEdges_[size_t(esrc_[size_t(t)])].push_back(t);
      inEdges_[size_t(edst_[size_t(t)])].push_back(t);
    }
    for (int t = 0; t < ne_; ++t) {
      const int s = esrc_[size_t(t)];
      const int d = edst_[size_t(t)];
      if (s >= d) continue;
      const SubstrateEdge& se = edges[size_t(t)];
      if (net.hasEdge(se.dst, se.src))
        antiPairs_.push_back({t, net.edgeIndexOf(se.dst, se.src)});
    }

    spec_.assign(size_t(ng_), nullptr);
    for (int gi = 0; gi < ng_; ++gi) {
      if (!graph.nodes[size_t(gi)].isEndpoint)
        spec_[size_t(gi)] = &catalog.function(graph.nodes[size_t(gi)].function);
    }
    for (int gi = 0; gi < ng_; ++gi)
      if (spec_[size_t(gi)] != nullptr)
        usesByFunction_[graph.nodes[size_t(gi)].function].push_back(gi);

    bigM_ = Rational(graph.useCount() + 1);
    bigMF_ = Rational(long(catalog.functions().size()) + 1);
  }

  bool feasible(const std::vector<Rational>& v) const {
    const auto& nodes = net_.nodes();
    const auto& edges = net_.edges();
    auto m = [&](int gi, int x) { return v[size_t(inst_.mVar.at({gi, x}))]; };
    auto e = [&](int t, int x, int y, int c) {
      return v[size_t(inst_.eVar.at(EKey{t, x, y, c}))];
    };

    // (a) one host per graph node.
    for (int gi = 0; gi < ng_; ++gi) {
      Rational sum(0);
      for (int x : inst_.candidates[size_t(gi)]) sum += m(gi, x);
      if (sum != 1) return false;
    }

    // (b) endpoints pinned.
    for (int gi = 0; gi < ng_; ++gi) {
      const auto& gn = graph_.nodes[size_t(gi)];
      if (gn.isEndpoint && m(gi, nodeIdx_.at(gn.loc)) != 1) return false;
    }

    // (c) instance indicators follow the mapping.
    for (const auto& kv : inst_.iVar) {
      Rational sum(0);
      for (int gi : usesByFunction_.at(kv.first.first)) {
        auto mit = inst_.mVar.find({gi, kv.first.second});
        if (mit != inst_.mVar.end()) sum += v[size_t(mit->second)];
      }
      const Rational& iv = v[size_t(kv.second)];
      if (sum > bigM_ * iv || iv > sum) return false;
    }

    // (d) one role per use per candidate host; (e) single-style locks.
    for (int gi = 0; gi < ng_; ++gi) {
      const FunctionSpec* f = spec_[size_t(gi)];
      if (f == nullptr) continue;
      const bool dcOnly = sgn(f->dcDemand) > 0 && sgn(f->switchDemand) == 0;
      const bool swOnly = sgn(f->switchDemand) > 0 && sgn(f->dcDemand) == 0;
      for (int x : inst_.candidates[size_t(gi)]) {
        const Rational& ms = v[size_t(inst_.msVar.at({gi, x}))];
        const Rational& md = v[size_t(inst_.mdVar.at({gi, x}))];
        if (ms + md != 1) return false;
        if (dcOnly && (ms != 0 || md != 1)) return false;
        if (swOnly && (md != 0 || ms != 1)) return false;
      }
    }

    // (f) node capacities, demand weighted by the m * role product.
    for (int x = 0; x < nv_; ++x) {
      Rational dcl(0), swl(0);
      for (int gi = 0; gi < ng_; ++gi) {
        const FunctionSpec* f = spec_[size_t(gi)];
        if (f == nullptr) continue;
        auto mit = inst_.mVar.find({gi, x});
        if (mit == inst_.mVar.end()) continue;
        const Rational& mv = v[size_t(mit->second)];
        if (sgn(f->dcDemand) > 0)
          dcl += f->dcDemand * mv * v[size_t(inst_.mdVar.at({gi, x}))];
        if (sgn(f->switchDemand) > 0)
          swl += f->switchDemand * mv * v[size_t(inst_.msVar.at({gi, x}))];
      }
      if (dcl > nodes[size_t(x)].dcCapacity) return false;
      if (swl > nodes[size_t(x)].switchCapacity) return false;
    }

    // (g) network-wide instance budgets.
    for (const FunctionSpec& f : catalog_.functions()) {
      Rational sum(0);
      for (const auto& kv : inst_.iVar)
        if (kv.first.first == f.id) sum += v[size_t(kv.second)];
      if (sum > f.maxInstances) return false;
    }

    // (h) per-node fan-in per function.
    for (const auto& kv : inst_.iVar) {
      Rational fan(0);
      for (int gi : usesByFunction_.at(kv.first.first)) {
        auto mit = inst_.mVar.find({gi, kv.first.second});
        if (mit != inst_.mVar.end()) fan += v[size_t(mit->second)];
      }
      if (fan > catalog_.function(kv.first.first).maxRequests) return false;
    }

    // (i) edges serve a commodity only between its mapped hosts.
    for (const auto& kv : inst_.eVar) {
      const VnfEdge& ge = graph_.edges[size_t(kv.first.commodity)];
      if (v[size_t(kv.second)] > m(ge.src, kv.first.x) * m(ge.dst, kv.first.y))
        return false;
    }

    // (j)/(k) paths start and end exactly once, on the active host pair;
    // boundary flow never re-enters the source or leaves the sink.
    // (l) interior nodes forward what they receive.
    for (int c = 0; c < nc_; ++c) {
      const VnfEdge& ge = graph_.edges[size_t(c)];
      Rational startOn(0), startOff(0), endOn(0), endOff(0);
      for (int x : inst_.candidates[size_t(ge.src)]) {
        for (int y : inst_.candidates[size_t(ge.dst)]) {
          const bool active = m(ge.src, x) * m(ge.dst, y) == 1;
          Rational outSum(0), inSum(0);
          for (int t : outEdges_[size_t(x)]) outSum += e(t, x, y, c);
          for (int t : inEdges_[size_t(y)]) inSum += e(t, x, y, c);
          (active ? startOn : startOff) += outSum;
          (active ? endOn : endOff) += inSum;
          if (x == y) continue;
          Rational backIn(0), backOut(0);
          for (int t : inEdges_[size_t(x)]) backIn += e(t, x, y, c);
          for (int t : outEdges_[size_t(y)]) backOut += e(t, x, y, c);
          if (backIn != 0 || backOut != 0) return false;
          for (int w = 0; w < nv_; ++w) {
            if (w == x || w == y) continue;
            Rational flowIn(0), flowOut(0);
            for (int t : inEdges_[size_t(w)])
              if (esrc_[size_t(t)] != w) flowIn += e(t, x, y, c);
            for (int t : outEdges_[size_t(w)])
              if (edst_[size_t(t)] != w) flowOut += e(t, x, y, c);
            if (flowIn != flowOut) return false;
          }
        }
      }
      if (startOn != 1 || startOff != 0 || endOn != 1 || endOff != 0)
        return false;
    }

    // (m) self-loops stand for co-location only; no anti-parallel reuse.
    for (int c = 0; c < nc_; ++c) {
      const VnfEdge& ge = graph_.edges[size_t(c)];
      for (int x : inst_.candidates[size_t(ge.src)]) {
        for (int y : inst_.candidates[size_t(ge.dst)]) {
          for (int t = 0; t < ne_; ++t) {
            const bool selfLoop = esrc_[size_t(t)] == edst_[size_t(t)];
            const bool banned =
                x != y ? selfLoop : !(selfLoop && esrc_[size_t(t)] == x);
            if (banned && e(t, x, y, c) != 0) return false;
          }
          for (const auto& ap : antiPairs_)
            if (e(ap.first, x, y, c) + e(ap.second, x, y, c) > 1) return false;
        }
      }
    }

    // (n) edge data-rate capacity.
    for (int t = 0; t < ne_; ++t) {
      Rational flow(0);
      for (int c = 0; c < nc_; ++c) {
        const VnfEdge& ge = graph_.edges[size_t(c)];
        if (sgn(ge.rate) == 0) continue;
        for (int x : inst_.candidates[size_t(ge.src)])
          for (int y : inst_.candidates[size_t(ge.dst)])
            flow += ge.rate * e(t, x, y, c);
      }
      if (flow > edges[size_t(t)].dataRate) return false;
    }

    // (o) latency budget per bounded endpoint pair.
    for (const auto& entry : graph_.latencyBounds) {
      std::set<int> commodities;
      for (const auto& path : graph_.pairPaths.at(entry.first))
        commodities.insert(path.begin(), path.end());
      Rational acc(0);
      for (int c : commodities) {
        const VnfEdge& ge = graph_.edges[size_t(c)];
        for (int x : inst_.candidates[size_t(ge.src)])
          for (int y : inst_.candidates[size_t(ge.dst)])
            for (int t = 0; t < ne_; ++t) {
              const Rational& l = edges[size_t(t)].latency;
              if (sgn(l) != 0) acc += l * e(t, x, y, c);
            }
      }
      if (acc > entry.second) return false;
    }

    // (p) used markers follow the instance indicators.
    for (const auto& kv : inst_.usedVar) {
      Rational sum(0);
      for (const auto& ikv : inst_.iVar)
        if (ikv.first.second == kv.first) sum += v[size_t(ikv.second)];
      const Rational& uv = v[size_t(kv.second)];
      if (sum > bigMF_ * uv || uv > sum) return false;
    }

    // (q) remaining rate per edge, non-negative.
    for (const auto& kv : inst_.remdrVar) {
      const int t = kv.first;
      Rational flow(0);
      for (int c = 0; c < nc_; ++c) {
        const VnfEdge& ge = graph_.edges[size_t(c)];
        if (sgn(ge.rate) == 0) continue;
        for (int x : inst_.candidates[size_t(ge.src)])
          for (int y : inst_.candidates[size_t(ge.dst)])
            flow += ge.rate * e(t, x, y, c);
      }
      const Rational& rd = v[size_t(kv.second)];
      if (rd != edges[size_t(t)].dataRate - flow || sgn(rd) < 0) return false;
    }

    // (r) per-commodity path latency.
    for (const auto& kv : inst_.latVar) {
      const VnfEdge& ge = graph_.edges[size_t(kv.first)];
      Rational acc(0);
      for (int x : inst_.candidates[size_t(ge.src)])
        for (int y : inst_.candidates[size_t(ge.dst)])
          for (int t = 0; t < ne_; ++t) {
            const Rational& l = edges[size_t(t)].latency;
            if (sgn(l) != 0) acc += l * e(t, x, y, kv.first);
          }
      if (v[size_t(kv.second)] != acc) return false;
    }

    return true;
  }

 private:
  const SubstrateNetwork& net_;
  const FunctionCatalog& catalog_;
  const VnfGraph& graph_;
  const PlacementInstance& inst_;
  int nv_ = 0, ne_ = 0, ng_ = 0, nc_ = 0;
  std::map<chainforge::NodeId, int> nodeIdx_;
  std::vector<int> esrc_, edst_;
  std::vector<std::vector<int>> outEdges_, inEdges_;
  std::vector<std::pair<int, int>> antiPairs_;
  std::vector<const FunctionSpec*> spec_;
  std::map<chainforge::FunctionId, std::vector<int>> usesByFunction_;
  Rational bigM_, bigMF_;
};

// Fixes auxiliaries to their defining products, derives each continuous
// variable from its defining equality, then evaluates every assembled row
// and variable bound.
class LinEvaluator {
 public:
  explicit LinEvaluator(const PlacementInstance& inst) : inst_(inst) {
    std::vector<bool> defined(inst.vars.size(), false);
    for (size_t r = 0; r < inst.rows.size(); ++r) {
      const auto& row = inst.rows[r];
      if (row.rel != Rel::Eq) continue;
      int contAt = -1;
      bool several = false;
      for (size_t k = 0; k < row.terms.size(); ++k) {
        const VarRef ref = row.terms[k].var;
        if (inst.vars[size_t(ref)].kind != VarKind::Continuous) continue;
        if (contAt != -1) several = true;
        contAt = int(k);
      }
      if (several || contAt == -1) continue;
      const VarRef target = row.terms[size_t(contAt)].var;
      if (defined[size_t(target)]) continue;
      defined[size_t(target)] = true;
      defs_.push_back({int(r), contAt});
    }
    for (size_t ref = 0; ref < inst.vars.size(); ++ref) {
      if (inst.vars[ref].kind == VarKind::Continuous && !defined[ref])
        throw std::logic_error("sweep: continuous variable '" +
                               inst.vars[ref].name +
                               "' has no defining equality");
    }
  }

  void derive(std::vector<Rational>* v) const {
    for (const auto& kv : inst_.productAux)
      (*v)[size_t(kv.second)] =
          (*v)[size_t(kv.first.first)] * (*v)[size_t(kv.first.second)];
    for (const auto& def : defs_) {
      const auto& row = inst_.rows[size_t(def.first)];
      Rational rest(0);
      for (size_t k = 0; k < row.terms.size(); ++k) {
        if (int(k) == def.second) continue;
        rest += row.terms[k].coef * (*v)[size_t(row.terms[k].var)];
      }
      (*v)[size_t(row.terms[size_t(def.second)].var)] =
          (row.rhs - rest) / row.terms[size_t(def.second)].coef;
    }
  }

  bool feasible(const std::vector<Rational>& v) const {
    for (size_t ref = 0; ref < inst_.vars.size(); ++ref) {
      const auto& var = inst_.vars[ref];
      if (var.kind != VarKind::Continuous) continue;
      if (var.lo && v[ref] < *var.lo) return false;
      if (var.hi && v[ref] > *var.hi) return false;
    }
    for (const auto& row : inst_.rows) {
      Rational lhs(0);
      for (const auto& term : row.terms)
        lhs += term.coef * v[size_t(term.var)];
      switch (row.rel) {
        case Rel::Le:
          if (lhs > row.rhs) return false;
          break;
        case Rel::Eq:
          if (lhs != row.rhs) return false;
          break;
        case Rel::Ge:
          if (lhs < row.rhs) return false;
          break;
      }
    }
    return true;
  }

 private:
  const PlacementInstance& inst_;
  std::vector<std::pair<int, int>> defs_;  // (row index, term position)
};

MicroCase makeCase(std::string name, int expected, std::vector<NodeSpec> nodes,
                   std::vector<SubstrateEdge> edges,
                   std::vector<FunctionSpec> fns, DeploymentRequest req) {
  SubstrateNetwork net =
      SubstrateNetwork::create(std::move(nodes), std::move(edges));
  FunctionCatalog catalog = FunctionCatalog::create(std::move(fns));
  const auto ast = chainforge::chain::parseChain(req.chain, req);
  auto set = chainforge::expandAll(ast, req);
  VnfGraph graph = std::move(set.graphs.front());
  chainforge::enumeratePaths(graph);
  return {std::move(name), expected, std::move(net), std::move(catalog),
          std::move(graph)};
}

}  // namespace

SweepOutcome sweep(const SubstrateNetwork& net, const FunctionCatalog& catalog,
                   const VnfGraph& graph) {
  const PlacementInstance inst =
      chainforge::milp::buildInstance(net, catalog, graph);

  std::set<VarRef> aux;
  for (const auto& kv : inst.productAux) aux.insert(kv.second);
  std::vector<VarRef> originals;
  for (size_t ref = 0; ref < inst.vars.size(); ++ref) {
    if (inst.vars[ref].kind == VarKind::Binary &&
        aux.count(VarRef(ref)) == 0)
      originals.push_back(VarRef(ref));
  }
  if (originals.size() > 20)
    throw std::logic_error("sweep case has " +
                           std::to_string(originals.size()) +
                           " original binaries; the cap is 20");

  const QuadEvaluator quad(net, catalog, graph, inst);
  const LinEvaluator lin(inst);

  SweepOutcome out;
  out.originalBinaries = int(originals.size());
  out.vectors = 1ull << originals.size();

  std::vector<Rational> v(inst.vars.size(), Rational(0));
  for (unsigned long long mask = 0; mask < out.vectors; ++mask) {
    for (size_t k = 0; k < originals.size(); ++k)
      v[size_t(originals[k])] = Rational(long((mask >> k) & 1ull));
    lin.derive(&v);
    const bool linOk = lin.feasible(v);
    const bool quadOk = quad.feasible(v);
    if (linOk != quadOk) ++out.mismatches;
    if (linOk) ++out.feasible;
  }
  return out;
}

std::vector<MicroCase> microCases() {
  using chainforge::Rational;
  std::vector<MicroCase> cases;

  {
    DeploymentRequest req;
    req.id = "mA";
    req.uses = {{"u1", "c1", {Rational(1)}}};
    req.chain = "a . u1 . b";
    req.endpoints = {{"a", "n1"}, {"b", "n1"}};
    req.pairs = {{"a", "b"}};
    req.initialRate = 1;
    req.latencyBounds = {{"a", "b", Rational(5)}};
    cases.push_back(makeCase("one use, one node", 9,
                             {{"n1", Rational(10), Rational(10)}},
                             {{"n1", "n1", Rational(20), Rational(0)}},
                             {{"c1", Rational(2), Rational(1), 1, 2}}, req));
  }
  {
    DeploymentRequest req;
    req.id = "mB";
    req.uses = {{"u1", "c1", {Rational(1)}}, {"u2", "c2", {Rational(1)}}};
    req.chain = "a . u1 . u2 . b";
    req.endpoints = {{"a", "n1"}, {"b", "n1"}};
    req.pairs = {{"a", "b"}};
    req.initialRate = 1;
    req.latencyBounds = {{"a", "b", Rational(5)}};
    cases.push_back(makeCase("two uses, one node", 14,
                             {{"n1", Rational(10), Rational(10)}},
                             {{"n1", "n1", Rational(20), Rational(0)}},
                             {{"c1", Rational(2), Rational(1), 1, 2},
                              {"c2", Rational(0), Rational(2), 1, 1}},
                             req));
  }
  {
    DeploymentRequest req;
    req.id = "mC";
    req.uses = {{"u1", "c1", {Rational(1)}}};
    req.chain = "a . u1 . b";
    req.endpoints = {{"a", "n1"}, {"b", "n2"}};
    req.pairs = {{"a", "b"}};
    req.initialRate = 1;
    req.latencyBounds = {{"a", "b", Rational(5)}};
    cases.push_back(makeCase("one use, two nodes", 17,
                             {{"n1", Rational(4), Rational(4)},
                              {"n2", Rational(0), Rational(0)}},
                             {{"n1", "n1", Rational(10), Rational(0)},
                              {"n1", "n2", Rational(10), Rational(2)}},
                             {{"c1", Rational(2), Rational(2), 1, 1}}, req));
  }
  return cases;
}

}  // namespace testquadlin
