#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/errors.hpp"
#include "chainforge/rational.hpp"
#include "chainforge/solve.hpp"

namespace chainforge::milp {

namespace {

constexpr uint64_t kTimeCheckMask = 1023;
constexpr uint64_t kProgressMask = (1 << 16) - 1;

struct PathOption {
  std::vector<int> edges;   // substrate edge indices in walk order
  Rational flowCost;        // commodity rate times non-self hop count
  Rational weightedLat;     // latency objective contribution
  Rational rawLat;          // plain latency sum, for the pair budgets
};

const Rational kInf = Rational(1000000000) * Rational(1000000000);

}  // namespace

SolveResult solveDecomposed(const SubstrateNetwork& net,
                            const FunctionCatalog& catalog,
                            const VnfGraph& graph, const SolveConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SolveResult res;
  res.objective = config.objective;
  res.label = "decomposed";

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
  std::vector<int> selfEdge(static_cast<size_t>(nv), -1);
  std::vector<std::vector<int>> outEdges(static_cast<size_t>(nv));
  for (int t = 0; t < ne; ++t) {
    esrc[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].src);
    edst[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].dst);
    if (esrc[static_cast<size_t>(t)] == edst[static_cast<size_t>(t)])
      selfEdge[static_cast<size_t>(esrc[static_cast<size_t>(t)])] = t;
    else
      outEdges[static_cast<size_t>(esrc[static_cast<size_t>(t)])].push_back(t);
  }
  for (auto& lst : outEdges)
    std::sort(lst.begin(), lst.end(), [&](int a, int b) {
      return nodes[static_cast<size_t>(edst[static_cast<size_t>(a)])].id <
             nodes[static_cast<size_t>(edst[static_cast<size_t>(b)])].id;
    });

  // All-pairs hop counts (BFS) and latencies (Dijkstra), self-loops
  // excluded; used for admissible completion estimates.
  std::vector<std::vector<long>> minHop(
      static_cast<size_t>(nv), std::vector<long>(static_cast<size_t>(nv), -1));
  std::vector<std::vector<Rational>> minLat(
      static_cast<size_t>(nv),
      std::vector<Rational>(static_cast<size_t>(nv), kInf));
  for (int s = 0; s < nv; ++s) {
    auto& hop = minHop[static_cast<size_t>(s)];
    hop[static_cast<size_t>(s)] = 0;
    std::deque<int> fifo{s};
    while (!fifo.empty()) {
      const int cur = fifo.front();
      fifo.pop_front();
      for (int t : outEdges[static_cast<size_t>(cur)]) {
        const int nxt = edst[static_cast<size_t>(t)];
        if (hop[static_cast<size_t>(nxt)] != -1) continue;
        hop[static_cast<size_t>(nxt)] = hop[static_cast<size_t>(cur)] + 1;
        fifo.push_back(nxt);
      }
    }
    auto& lat = minLat[static_cast<size_t>(s)];
    lat[static_cast<size_t>(s)] = 0;
    std::set<std::pair<Rational, int>> heap;
    heap.insert({Rational(0), s});
    while (!heap.empty()) {
      const auto [dist, cur] = *heap.begin();
      heap.erase(heap.begin());
      if (dist > lat[static_cast<size_t>(cur)]) continue;
      for (int t : outEdges[static_cast<size_t>(cur)]) {
        const int nxt = edst[static_cast<size_t>(t)];
        const Rational cand = dist + edges[static_cast<size_t>(t)].latency;
        if (cand < lat[static_cast<size_t>(nxt)]) {
          lat[static_cast<size_t>(nxt)] = cand;
          heap.insert({cand, nxt});
        }
      }
    }
  }

  std::map<int, long> weight;
  for (const auto& entry : graph.latencyBounds)
    for (const auto& path : graph.pairPaths.at(entry.first))
      for (int c : path) ++weight[c];
  auto weightOf = [&](int c) {
    auto it = weight.find(c);
    return it == weight.end() ? 0L : it->second;
  };

  struct BoundedPair {
    std::pair<int, int> pair;  // graph node indices
    Rational bound;
    std::set<int> commodities;
  };
  std::vector<BoundedPair> budgets;
  for (const auto& entry : graph.latencyBounds) {
    auto pit = graph.pairPaths.find(entry.first);
    if (pit == graph.pairPaths.end())
      throw Error(
          "latency bounds are present but endpoint-pair paths were not "
          "enumerated for this graph");
    BoundedPair bp;
    bp.pair = entry.first;
    bp.bound = entry.second;
    for (const auto& path : pit->second)
      bp.commodities.insert(path.begin(), path.end());
    budgets.push_back(std::move(bp));
  }
  std::vector<std::vector<int>> budgetsOf(static_cast<size_t>(nc));
  for (size_t bi = 0; bi < budgets.size(); ++bi)
    for (int c : budgets[bi].commodities)
      budgetsOf[static_cast<size_t>(c)].push_back(static_cast<int>(bi));

  Rational totalNonSelf(0);
  for (int t = 0; t < ne; ++t)
    if (esrc[static_cast<size_t>(t)] != edst[static_cast<size_t>(t)])
      totalNonSelf += edges[static_cast<size_t>(t)].dataRate;

  // Graph-node specifics and the mapping search order.
  std::vector<const FunctionSpec*> spec(static_cast<size_t>(ng), nullptr);
  std::vector<int> host(static_cast<size_t>(ng), -1);
  std::vector<Role> role(static_cast<size_t>(ng), Role::DataCenter);
  std::vector<int> useOrder;
  for (int gi = 0; gi < ng; ++gi) {
    const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
    if (gn.isEndpoint) {
      auto it = nodeIdx.find(gn.loc);
      if (it == nodeIdx.end())
        throw ValidationError("endpoint '" + gn.id +
                              "' is pinned to unknown network node '" +
                              gn.loc + "'");
      host[static_cast<size_t>(gi)] = it->second;
    } else {
      if (!catalog.hasFunction(gn.function))
        throw ValidationError("use '" + gn.id +
                              "' references unknown function '" + gn.function +
                              "'");
      spec[static_cast<size_t>(gi)] = &catalog.function(gn.function);
      useOrder.push_back(gi);
    }
  }
  std::stable_sort(useOrder.begin(), useOrder.end(), [&](int a, int b) {
    const Rational da = spec[static_cast<size_t>(a)]->dcDemand +
                        spec[static_cast<size_t>(a)]->switchDemand;
    const Rational db = spec[static_cast<size_t>(b)]->dcDemand +
                        spec[static_cast<size_t>(b)]->switchDemand;
    if (da != db) return da > db;
    return graph.nodes[static_cast<size_t>(a)].id <
           graph.nodes[static_cast<size_t>(b)].id;
  });

  // Commodities with their routing order (descending rate).
  std::vector<int> routeOrder(static_cast<size_t>(nc));
  for (int c = 0; c < nc; ++c) routeOrder[static_cast<size_t>(c)] = c;
  std::stable_sort(routeOrder.begin(), routeOrder.end(), [&](int a, int b) {
    const Rational& ra = graph.edges[static_cast<size_t>(a)].rate;
    const Rational& rb = graph.edges[static_cast<size_t>(b)].rate;
    if (ra != rb) return ra > rb;
    return a < b;
  });
  std::vector<std::vector<int>> commoditiesEndingAt(static_cast<size_t>(ng));
  for (int c = 0; c < nc; ++c) {
    commoditiesEndingAt[static_cast<size_t>(
                            graph.edges[static_cast<size_t>(c)].src)]
        .push_back(c);
    commoditiesEndingAt[static_cast<size_t>(
                            graph.edges[static_cast<size_t>(c)].dst)]
        .push_back(c);
  }

  // Simple substrate paths cache, lexicographic by node sequence.
  std::map<std::pair<int, int>, std::vector<std::vector<int>>> pathCache;
  auto simplePaths = [&](int x, int y) -> const std::vector<std::vector<int>>& {
    auto it = pathCache.find({x, y});
    if (it != pathCache.end()) return it->second;
    std::vector<std::vector<int>> acc;
    std::vector<int> cur;
    std::vector<bool> onPath(static_cast<size_t>(nv), false);
    auto dfs = [&](auto&& self, int at) -> void {
      if (at == y) {
        acc.push_back(cur);
        return;
      }
      onPath[static_cast<size_t>(at)] = true;
      for (int t : outEdges[static_cast<size_t>(at)]) {
        const int nxt = edst[static_cast<size_t>(t)];
        if (onPath[static_cast<size_t>(nxt)] || nxt == x) continue;
        cur.push_back(t);
        self(self, nxt);
        cur.pop_back();
      }
      onPath[static_cast<size_t>(at)] = false;
    };
    if (x != y) dfs(dfs, x);
    return pathCache.emplace(std::make_pair(x, y), std::move(acc))
        .first->second;
  };

  // Search state.
  std::vector<Rational> residualDc(static_cast<size_t>(nv));
  std::vector<Rational> residualSw(static_cast<size_t>(nv));
  for (int v = 0; v < nv; ++v) {
    residualDc[static_cast<size_t>(v)] = nodes[static_cast<size_t>(v)].dcCapacity;
    residualSw[static_cast<size_t>(v)] =
        nodes[static_cast<size_t>(v)].switchCapacity;
  }
  std::map<std::pair<FunctionId, int>, int> instAt;  // uses of f mapped to v
  std::map<FunctionId, int> instCount;               // nodes with an instance
  std::vector<int> usedCountAt(static_cast<size_t>(nv), 0);
  long usedTotal = 0;

  uint64_t explored = 0;
  bool outOfTime = false;

  struct Best {
    std::vector<int> host;
    std::vector<Role> role;
    std::vector<std::vector<int>> paths;  // per commodity, edge indices
    ObjectiveValues values;
  };
  std::optional<Best> incumbent;
  std::optional<Rational> incumbentValue;
  const bool maximize = metricIsMaximize(config.objective);
  auto better = [&](const Rational& cand) {
    return !incumbentValue ||
           (maximize ? cand > *incumbentValue : cand < *incumbentValue);
  };

  auto report = [&] {
    if (config.progress == nullptr) return;
    *config.progress << "explored=" << explored << " incumbent="
                     << (incumbentValue ? formatRational(*incumbentValue)
                                        : std::string("none"))
                     << " bound=none\n";
  };
  auto tick = [&] {
    ++explored;
    if ((explored & kTimeCheckMask) == 0 && elapsed() > config.timeLimitSec)
      outOfTime = true;
    if ((explored & kProgressMask) == 0) report();
  };

  // Static candidate host sets, mirroring the instance's candidate rule.
  std::vector<std::vector<int>> candSet(static_cast<size_t>(ng));
  for (int gi = 0; gi < ng; ++gi) {
    if (graph.nodes[static_cast<size_t>(gi)].isEndpoint) {
      candSet[static_cast<size_t>(gi)] = {host[static_cast<size_t>(gi)]};
      continue;
    }
    const FunctionSpec* f = spec[static_cast<size_t>(gi)];
    for (int v = 0; v < nv; ++v)
      if ((f->dcDemand > 0 &&
           f->dcDemand <= nodes[static_cast<size_t>(v)].dcCapacity) ||
          (f->switchDemand > 0 &&
           f->switchDemand <= nodes[static_cast<size_t>(v)].switchCapacity))
        candSet[static_cast<size_t>(gi)].push_back(v);
  }

  // Per-commodity floors over all candidate host pairs, used while both
  // ends are still unmapped. Co-location counts as zero cost, which stays
  // admissible whether or not a self-loop exists.
  std::vector<long> anyHop(static_cast<size_t>(nc), 0);
  std::vector<Rational> anyLat(static_cast<size_t>(nc), Rational(0));
  for (int c = 0; c < nc; ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    long bestHop = -1;
    Rational bestLat = kInf;
    for (int x : candSet[static_cast<size_t>(ge.src)])
      for (int y : candSet[static_cast<size_t>(ge.dst)]) {
        const long h = minHop[static_cast<size_t>(x)][static_cast<size_t>(y)];
        if (h >= 0 && (bestHop == -1 || h < bestHop)) bestHop = h;
        bestLat = std::min(
            bestLat, minLat[static_cast<size_t>(x)][static_cast<size_t>(y)]);
      }
    anyHop[static_cast<size_t>(c)] = bestHop < 0 ? 0 : bestHop;
    anyLat[static_cast<size_t>(c)] = bestLat == kInf ? Rational(0) : bestLat;
  }

  // Per endpoint pair, each enumerated request path chains its commodities
  // through whatever hosts are already fixed. By the triangle inequality
  // the hops (and latencies) along the path cover at least the pairwise
  // substrate distances between consecutive fixed anchors, scaled by the
  // path's smallest rate (or weight). That often exceeds the sum of the
  // per-commodity floors while most ends are still open.
  struct PathRelaxation {
    std::vector<int> nodeSeq;  // graph node indices along the path
    std::vector<int> coms;
    Rational minRate;
    long minWeight = 0;
  };
  struct PairRelaxation {
    std::vector<PathRelaxation> paths;
  };
  std::vector<PairRelaxation> pairRelaxations;
  for (const auto& pr : graph.pairs) {
    auto it = graph.pairPaths.find(pr);
    if (it == graph.pairPaths.end()) continue;
    PairRelaxation rel;
    for (const auto& path : it->second) {
      if (path.empty()) continue;
      PathRelaxation p;
      p.nodeSeq.push_back(graph.edges[static_cast<size_t>(path[0])].src);
      p.minRate = graph.edges[static_cast<size_t>(path[0])].rate;
      p.minWeight = weightOf(path[0]);
      for (int c : path) {
        p.nodeSeq.push_back(graph.edges[static_cast<size_t>(c)].dst);
        p.coms.push_back(c);
        p.minRate = std::min(p.minRate, graph.edges[static_cast<size_t>(c)].rate);
        p.minWeight = std::min(p.minWeight, weightOf(c));
      }
      rel.paths.push_back(std::move(p));
    }
    pairRelaxations.push_back(std::move(rel));
  }

  // Admissible mapping-phase estimates: exact pair distance once both ends
  // are placed, a candidate-set minimum when one end is still open, plus
  // the anchored path relaxation above.
  std::vector<Rational> tierFlow(static_cast<size_t>(nc));
  std::vector<Rational> tierWLat(static_cast<size_t>(nc));
  std::vector<char> takenFlow(static_cast<size_t>(nc));
  std::vector<char> takenLat(static_cast<size_t>(nc));
  auto mappedPairEstimates = [&](Rational* flowLB, Rational* wlatLB) {
    *flowLB = 0;
    *wlatLB = 0;
    for (int c = 0; c < nc; ++c) {
      const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
      const int x = host[static_cast<size_t>(ge.src)];
      const int y = host[static_cast<size_t>(ge.dst)];
      long hop = 0;
      Rational lat(0);
      if (x != -1 && y != -1) {
        if (x == y) {
          if (selfEdge[static_cast<size_t>(x)] != -1)
            lat = edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                      .latency;
        } else {
          hop = minHop[static_cast<size_t>(x)][static_cast<size_t>(y)];
          lat = minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
        }
      } else if (x != -1 || y != -1) {
        const int fixed = x != -1 ? x : y;
        const bool fixedIsSrc = x != -1;
        const auto& others =
            candSet[static_cast<size_t>(fixedIsSrc ? ge.dst : ge.src)];
        long bestHop = -1;
        Rational bestLat = kInf;
        for (int w : others) {
          const long h =
              fixedIsSrc
                  ? minHop[static_cast<size_t>(fixed)][static_cast<size_t>(w)]
                  : minHop[static_cast<size_t>(w)][static_cast<size_t>(fixed)];
          if (h >= 0 && (bestHop == -1 || h < bestHop)) bestHop = h;
          bestLat = std::min(
              bestLat,
              fixedIsSrc
                  ? minLat[static_cast<size_t>(fixed)][static_cast<size_t>(w)]
                  : minLat[static_cast<size_t>(w)][static_cast<size_t>(fixed)]);
        }
        hop = bestHop < 0 ? 0 : bestHop;
        lat = bestLat == kInf ? Rational(0) : bestLat;
      } else {
        hop = anyHop[static_cast<size_t>(c)];
        lat = anyLat[static_cast<size_t>(c)];
      }
      tierFlow[static_cast<size_t>(c)] = hop > 0 ? ge.rate * hop : Rational(0);
      tierWLat[static_cast<size_t>(c)] = weightOf(c) > 0 && sgn(lat) != 0
                                             ? Rational(weightOf(c)) * lat
                                             : Rational(0);
      *flowLB += tierFlow[static_cast<size_t>(c)];
      *wlatLB += tierWLat[static_cast<size_t>(c)];
    }
    std::fill(takenFlow.begin(), takenFlow.end(), 0);
    std::fill(takenLat.begin(), takenLat.end(), 0);
    for (const auto& rel : pairRelaxations) {
      Rational bestFlowGain(0), bestLatGain(0);
      const PathRelaxation* bestFlowPath = nullptr;
      const PathRelaxation* bestLatPath = nullptr;
      for (const auto& p : rel.paths) {
        long anchorHop = 0;
        Rational anchorLat(0);
        int last = -1;
        for (int g : p.nodeSeq) {
          const int h = host[static_cast<size_t>(g)];
          if (h == -1) continue;
          if (last != -1 && h != last) {
            const long d =
                minHop[static_cast<size_t>(last)][static_cast<size_t>(h)];
            if (d < 0) return false;
            anchorHop += d;
            anchorLat +=
                minLat[static_cast<size_t>(last)][static_cast<size_t>(h)];
          }
          last = h;
        }
        if (anchorHop > 0) {
          Rational tierSum(0);
          for (int c : p.coms) tierSum += tierFlow[static_cast<size_t>(c)];
          const Rational gain = p.minRate * anchorHop - tierSum;
          if (gain > bestFlowGain) {
            bestFlowGain = gain;
            bestFlowPath = &p;
          }
        }
        if (p.minWeight > 0 && sgn(anchorLat) > 0) {
          Rational tierSum(0);
          for (int c : p.coms) tierSum += tierWLat[static_cast<size_t>(c)];
          const Rational gain = Rational(p.minWeight) * anchorLat - tierSum;
          if (gain > bestLatGain) {
            bestLatGain = gain;
            bestLatPath = &p;
          }
        }
      }
      if (bestFlowPath != nullptr) {
        bool clash = false;
        for (int c : bestFlowPath->coms)
          if (takenFlow[static_cast<size_t>(c)]) clash = true;
        if (!clash) {
          for (int c : bestFlowPath->coms) takenFlow[static_cast<size_t>(c)] = 1;
          *flowLB += bestFlowGain;
        }
      }
      if (bestLatPath != nullptr) {
        bool clash = false;
        for (int c : bestLatPath->coms)
          if (takenLat[static_cast<size_t>(c)]) clash = true;
        if (!clash) {
          for (int c : bestLatPath->coms) takenLat[static_cast<size_t>(c)] = 1;
          *wlatLB += bestLatGain;
        }
      }
    }
    return true;
  };

  // A freshly completed commodity must have some route at all and must not
  // already break a latency budget in the best case.
  auto completedCommodityOk = [&](int gi) {
    for (int c : commoditiesEndingAt[static_cast<size_t>(gi)]) {
      const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
      const int x = host[static_cast<size_t>(ge.src)];
      const int y = host[static_cast<size_t>(ge.dst)];
      if (x == -1 || y == -1) continue;
      if (x == y) {
        if (selfEdge[static_cast<size_t>(x)] == -1) return false;
      } else if (minHop[static_cast<size_t>(x)][static_cast<size_t>(y)] == -1) {
        return false;
      }
    }
    for (const BoundedPair& bp : budgets) {
      Rational acc(0);
      bool involved = false;
      for (int c : bp.commodities) {
        const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
        const int x = host[static_cast<size_t>(ge.src)];
        const int y = host[static_cast<size_t>(ge.dst)];
        if (x == -1 || y == -1) continue;
        involved = true;
        if (x == y)
          acc += edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                     .latency;
        else
          acc += minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
      }
      if (involved && acc > bp.bound) return false;
    }
    return true;
  };

  auto usedLowerBound = [&](size_t nextOrderIdx) {
    long lb = usedTotal;
    for (size_t k = nextOrderIdx; k < useOrder.size(); ++k) {
      const int gi = useOrder[k];
      const FunctionSpec* f = spec[static_cast<size_t>(gi)];
      bool fits = false;
      for (int v = 0; v < nv && !fits; ++v) {
        if (usedCountAt[static_cast<size_t>(v)] == 0) continue;
        const auto ia = instAt.find({f->id, v});
        const bool hasInst = ia != instAt.end() && ia->second > 0;
        if (hasInst) {
          if (ia->second >= f->maxRequests) continue;
        } else if (instCount[f->id] >= f->maxInstances) {
          continue;
        }
        if ((f->dcDemand > 0 && f->dcDemand <= residualDc[static_cast<size_t>(v)]) ||
            (f->switchDemand > 0 &&
             f->switchDemand <= residualSw[static_cast<size_t>(v)]))
          fits = true;
      }
      if (!fits) return lb + 1;
    }
    return lb;
  };

  // Bound checks shared by both phases. Exact values where known,
  // admissible estimates elsewhere; returns false when no completion can
  // beat the incumbent or satisfy the extra bounds.
  auto promising = [&](const Rational& remdrUB, long usedLB,
                       const Rational& latLB) {
    if (incumbentValue) {
      if (config.objective == Metric::Remdr && !(remdrUB > *incumbentValue))
        return false;
      if (config.objective == Metric::UsedNodes &&
          !(Rational(usedLB) < *incumbentValue))
        return false;
      if (config.objective == Metric::Latency && !(latLB < *incumbentValue))
        return false;
    }
    for (const MetricBound& mb : config.extraBounds) {
      if (mb.metric == Metric::Remdr && mb.rel == Rel::Ge &&
          remdrUB < mb.value)
        return false;
      if (mb.metric == Metric::UsedNodes && mb.rel == Rel::Le &&
          Rational(usedLB) > mb.value)
        return false;
      if (mb.metric == Metric::Latency && mb.rel == Rel::Le &&
          latLB > mb.value)
        return false;
    }
    return true;
  };

  auto satisfiesBounds = [&](const ObjectiveValues& vals) {
    for (const MetricBound& mb : config.extraBounds) {
      const Rational got = mb.metric == Metric::Remdr ? vals.remdr
                           : mb.metric == Metric::UsedNodes
                               ? Rational(vals.usedNodes)
                               : vals.latency;
      const bool ok = mb.rel == Rel::Le   ? got <= mb.value
                      : mb.rel == Rel::Ge ? got >= mb.value
                                          : got == mb.value;
      if (!ok) return false;
    }
    return true;
  };

  // Routing search for a complete mapping. Returns true when the caller
  // may stop routing early (used-nodes objective with an accepted leaf).
  std::vector<Rational> residualRate(static_cast<size_t>(ne));
  auto routeMapping = [&] {
    struct Com {
      int c;
      std::vector<PathOption> options;
      Rational minFlow;
      Rational minWLat;
    };
    std::vector<Com> coms;
    coms.reserve(static_cast<size_t>(nc));
    for (int idx : routeOrder) {
      const VnfEdge& ge = graph.edges[static_cast<size_t>(idx)];
      const int x = host[static_cast<size_t>(ge.src)];
      const int y = host[static_cast<size_t>(ge.dst)];
      Com com;
      com.c = idx;
      const long w = weightOf(idx);
      if (x == y) {
        const int t = selfEdge[static_cast<size_t>(x)];
        if (t == -1) return;
        PathOption opt;
        opt.edges = {t};
        opt.flowCost = 0;
        opt.rawLat = edges[static_cast<size_t>(t)].latency;
        opt.weightedLat = Rational(w) * opt.rawLat;
        com.options.push_back(std::move(opt));
      } else {
        for (const auto& path : simplePaths(x, y)) {
          PathOption opt;
          opt.edges = path;
          opt.flowCost = ge.rate * static_cast<long>(path.size());
          opt.rawLat = 0;
          for (int t : path) opt.rawLat += edges[static_cast<size_t>(t)].latency;
          opt.weightedLat = Rational(w) * opt.rawLat;
          com.options.push_back(std::move(opt));
        }
        if (com.options.empty()) return;
        if (config.objective == Metric::Remdr)
          std::stable_sort(com.options.begin(), com.options.end(),
                           [](const PathOption& a, const PathOption& b) {
                             return a.flowCost < b.flowCost;
                           });
        else if (config.objective == Metric::Latency)
          std::stable_sort(com.options.begin(), com.options.end(),
                           [](const PathOption& a, const PathOption& b) {
                             return a.weightedLat < b.weightedLat;
                           });
      }
      com.minFlow = com.options[0].flowCost;
      com.minWLat = com.options[0].weightedLat;
      for (const PathOption& opt : com.options) {
        com.minFlow = std::min(com.minFlow, opt.flowCost);
        com.minWLat = std::min(com.minWLat, opt.weightedLat);
      }
      coms.push_back(std::move(com));
    }

    std::vector<Rational> sufFlow(coms.size() + 1, Rational(0));
    std::vector<Rational> sufWLat(coms.size() + 1, Rational(0));
    for (size_t k = coms.size(); k-- > 0;) {
      sufFlow[k] = sufFlow[k + 1] + coms[k].minFlow;
      sufWLat[k] = sufWLat[k + 1] + coms[k].minWLat;
    }

    for (int t = 0; t < ne; ++t)
      residualRate[static_cast<size_t>(t)] =
          edges[static_cast<size_t>(t)].dataRate;
    std::vector<Rational> budgetAcc(budgets.size(), Rational(0));
    std::vector<Rational> budgetRest(budgets.size(), Rational(0));
    for (size_t bi = 0; bi < budgets.size(); ++bi)
      for (int c : budgets[bi].commodities) {
        const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
        const int x = host[static_cast<size_t>(ge.src)];
        const int y = host[static_cast<size_t>(ge.dst)];
        budgetRest[bi] +=
            x == y
                ? edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                      .latency
                : minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
      }

    std::vector<int> choice(coms.size(), -1);
    Rational flowAcc(0);
    Rational wlatAcc(0);
    bool stop = false;

    auto leaf = [&] {
      ObjectiveValues vals;
      vals.remdr = totalNonSelf - flowAcc;
      vals.usedNodes = usedTotal;
      vals.latency = wlatAcc;
      if (!satisfiesBounds(vals)) return;
      const Rational value = config.objective == Metric::Remdr ? vals.remdr
                             : config.objective == Metric::UsedNodes
                                 ? Rational(vals.usedNodes)
                                 : vals.latency;
      if (!better(value)) return;
      Best b;
      b.host = host;
      b.role = role;
      b.paths.assign(static_cast<size_t>(nc), {});
      for (size_t k = 0; k < coms.size(); ++k)
        b.paths[static_cast<size_t>(coms[k].c)] =
            coms[k].options[static_cast<size_t>(choice[k])].edges;
      b.values = vals;
      incumbent = std::move(b);
      incumbentValue = value;
      if (config.objective == Metric::UsedNodes) stop = true;
    };

    auto dfs = [&](auto&& self, size_t k) -> void {
      if (outOfTime || stop) return;
      if (k == coms.size()) {
        leaf();
        return;
      }
      const Com& com = coms[k];
      for (size_t oi = 0; oi < com.options.size(); ++oi) {
        if (outOfTime || stop) break;
        const PathOption& opt = com.options[oi];
        tick();

        bool fits = true;
        const Rational& rate = graph.edges[static_cast<size_t>(com.c)].rate;
        for (int t : opt.edges)
          if (residualRate[static_cast<size_t>(t)] < rate) {
            fits = false;
            break;
          }
        if (!fits) continue;

        const Rational remdrUB =
            totalNonSelf - flowAcc - opt.flowCost - sufFlow[k + 1];
        const Rational latLB = wlatAcc + opt.weightedLat + sufWLat[k + 1];
        if (!promising(remdrUB, usedTotal, latLB)) continue;

        // Budget test: swap this commodity's optimistic share for the
        // actual path latency, keep the optimistic share for the rest.
        bool budgetsOk = true;
        for (int bi : budgetsOf[static_cast<size_t>(com.c)]) {
          const VnfEdge& ge = graph.edges[static_cast<size_t>(com.c)];
          const int x = host[static_cast<size_t>(ge.src)];
          const int y = host[static_cast<size_t>(ge.dst)];
          const Rational optimistic =
              x == y
                  ? edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                        .latency
                  : minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
          if (budgetAcc[static_cast<size_t>(bi)] + opt.rawLat +
                  budgetRest[static_cast<size_t>(bi)] - optimistic >
              budgets[static_cast<size_t>(bi)].bound) {
            budgetsOk = false;
            break;
          }
        }
        if (!budgetsOk) continue;

        choice[k] = static_cast<int>(oi);
        for (int t : opt.edges) residualRate[static_cast<size_t>(t)] -= rate;
        for (int bi : budgetsOf[static_cast<size_t>(com.c)]) {
          const VnfEdge& ge = graph.edges[static_cast<size_t>(com.c)];
          const int x = host[static_cast<size_t>(ge.src)];
          const int y = host[static_cast<size_t>(ge.dst)];
          const Rational optimistic =
              x == y
                  ? edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                        .latency
                  : minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
          budgetAcc[static_cast<size_t>(bi)] += opt.rawLat;
          budgetRest[static_cast<size_t>(bi)] -= optimistic;
        }
        flowAcc += opt.flowCost;
        wlatAcc += opt.weightedLat;

        self(self, k + 1);

        flowAcc -= opt.flowCost;
        wlatAcc -= opt.weightedLat;
        for (int bi : budgetsOf[static_cast<size_t>(com.c)]) {
          const VnfEdge& ge = graph.edges[static_cast<size_t>(com.c)];
          const int x = host[static_cast<size_t>(ge.src)];
          const int y = host[static_cast<size_t>(ge.dst)];
          const Rational optimistic =
              x == y
                  ? edges[static_cast<size_t>(selfEdge[static_cast<size_t>(x)])]
                        .latency
                  : minLat[static_cast<size_t>(x)][static_cast<size_t>(y)];
          budgetAcc[static_cast<size_t>(bi)] -= opt.rawLat;
          budgetRest[static_cast<size_t>(bi)] += optimistic;
        }
        for (int t : opt.edges) residualRate[static_cast<size_t>(t)] += rate;
        choice[k] = -1;
      }
    };
    dfs(dfs, 0);
  };

  // Mapping search.
  auto mapUses = [&](auto&& self, size_t k) -> void {
    if (outOfTime) return;
    {
      Rational flowLB, wlatLB;
      if (!mappedPairEstimates(&flowLB, &wlatLB)) return;
      if (!promising(totalNonSelf - flowLB, usedLowerBound(k), wlatLB))
        return;
    }
    if (k == useOrder.size()) {
      routeMapping();
      return;
    }
    const int gi = useOrder[k];
    const FunctionSpec* f = spec[static_cast<size_t>(gi)];

    struct Candidate {
      int v;
      Role role;
      Rational residual;
      bool onUsed;
    };
    std::vector<Candidate> cands;
    for (int v = 0; v < nv; ++v) {
      const auto ia = instAt.find({f->id, v});
      const bool hasInst = ia != instAt.end() && ia->second > 0;
      if (hasInst) {
        if (ia->second >= f->maxRequests) continue;
      } else if (instCount[f->id] >= f->maxInstances) {
        continue;
      }
      if (f->dcDemand > 0 && f->dcDemand <= residualDc[static_cast<size_t>(v)])
        cands.push_back({v, Role::DataCenter,
                         residualDc[static_cast<size_t>(v)],
                         usedCountAt[static_cast<size_t>(v)] > 0});
      if (f->switchDemand > 0 &&
          f->switchDemand <= residualSw[static_cast<size_t>(v)])
        cands.push_back({v, Role::Switch, residualSw[static_cast<size_t>(v)],
                         usedCountAt[static_cast<size_t>(v)] > 0});
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const Candidate& a, const Candidate& b) {
                       if (a.onUsed != b.onUsed) return a.onUsed;
                       if (a.residual != b.residual)
                         return a.residual > b.residual;
                       if (a.v != b.v)
                         return nodes[static_cast<size_t>(a.v)].id <
                                nodes[static_cast<size_t>(b.v)].id;
                       return a.role == Role::DataCenter &&
                              b.role == Role::Switch;
                     });

    for (const Candidate& cand : cands) {
      if (outOfTime) return;
      tick();
      host[static_cast<size_t>(gi)] = cand.v;
      role[static_cast<size_t>(gi)] = cand.role;
      auto& slot = instAt[{f->id, cand.v}];
      const bool fresh = slot == 0;
      ++slot;
      if (fresh) {
        ++instCount[f->id];
        if (usedCountAt[static_cast<size_t>(cand.v)] == 0) ++usedTotal;
      }
      ++usedCountAt[static_cast<size_t>(cand.v)];
      if (cand.role == Role::DataCenter)
        residualDc[static_cast<size_t>(cand.v)] -= f->dcDemand;
      else
        residualSw[static_cast<size_t>(cand.v)] -= f->switchDemand;

      if (completedCommodityOk(gi)) self(self, k + 1);

      if (cand.role == Role::DataCenter)
        residualDc[static_cast<size_t>(cand.v)] += f->dcDemand;
      else
        residualSw[static_cast<size_t>(cand.v)] += f->switchDemand;
      --usedCountAt[static_cast<size_t>(cand.v)];
      --slot;
      if (fresh) {
        --instCount[f->id];
        if (usedCountAt[static_cast<size_t>(cand.v)] == 0) --usedTotal;
      }
      host[static_cast<size_t>(gi)] = -1;
    }
  };

  bool rootOk = true;
  for (int gi = 0; gi < ng; ++gi)
    if (graph.nodes[static_cast<size_t>(gi)].isEndpoint &&
        !completedCommodityOk(gi))
      rootOk = false;
  if (rootOk) mapUses(mapUses, 0);

  res.stats.nodesExplored = explored;
  res.stats.wallTimeSec = elapsed();

  if (incumbent) {
    PlacementSolution sol;
    std::vector<Rational> flow(static_cast<size_t>(ne), Rational(0));
    for (int gi = 0; gi < ng; ++gi) {
      const VnfNode& gn = graph.nodes[static_cast<size_t>(gi)];
      sol.mapping[gn.id] =
          nodes[static_cast<size_t>(incumbent->host[static_cast<size_t>(gi)])]
              .id;
      if (!gn.isEndpoint) {
        sol.roles[gn.id] = incumbent->role[static_cast<size_t>(gi)];
        const NodeId& hostId =
            nodes[static_cast<size_t>(
                      incumbent->host[static_cast<size_t>(gi)])]
                .id;
        sol.instanceCount[{gn.function, hostId}] = 1;
        sol.usedNodes.insert(hostId);
      }
    }
    for (int c = 0; c < nc; ++c) {
      const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
      const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
      const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
      std::vector<std::pair<NodeId, NodeId>> hops;
      Rational lat(0);
      for (int t : incumbent->paths[static_cast<size_t>(c)]) {
        hops.emplace_back(edges[static_cast<size_t>(t)].src,
                          edges[static_cast<size_t>(t)].dst);
        lat += edges[static_cast<size_t>(t)].latency;
        flow[static_cast<size_t>(t)] += ge.rate;
      }
      sol.pathEdges[{uid, upid}] = std::move(hops);
      sol.pathLatency[{uid, upid}] = lat;
    }
    for (int t = 0; t < ne; ++t)
      sol.remainingRate[{edges[static_cast<size_t>(t)].src,
                         edges[static_cast<size_t>(t)].dst}] =
          edges[static_cast<size_t>(t)].dataRate - flow[static_cast<size_t>(t)];
    sol.objectiveValues = incumbent->values;
    res.solution = std::move(sol);
    res.status = outOfTime ? SolveStatus::TimeLimit : SolveStatus::Optimal;
    if (!outOfTime) res.bound = *incumbentValue;
  } else {
    res.status = outOfTime ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
  }
  if (config.progress != nullptr) report();
  return res;
}

}  // namespace chainforge::milp
