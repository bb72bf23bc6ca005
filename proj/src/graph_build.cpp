#include "chainforge/graph_build.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "chainforge/errors.hpp"

namespace chainforge {

namespace chc = chainforge::chain;

int VnfGraph::addNode(VnfNode n) {
  if (nodeIndex.count(n.id)) {
    throw ExpansionError("duplicate graph node '" + n.id + "'");
  }
  int idx = static_cast<int>(nodes.size());
  nodeIndex.emplace(n.id, idx);
  nodes.push_back(std::move(n));
  return idx;
}

int VnfGraph::addEdge(int src, int dst, Rational rate) {
  if (edgeIndex.count({src, dst})) {
    throw ExpansionError("duplicate graph edge " + nodes[src].id + " -> " +
                         nodes[dst].id);
  }
  int idx = static_cast<int>(edges.size());
  edgeIndex.emplace(std::make_pair(src, dst), idx);
  edges.push_back({src, dst, std::move(rate)});
  return idx;
}

int VnfGraph::indexOf(const std::string& id) const {
  auto it = nodeIndex.find(id);
  return it == nodeIndex.end() ? -1 : it->second;
}

long VnfGraph::useCount() const {
  long n = 0;
  for (const auto& node : nodes) {
    if (!node.isEndpoint) ++n;
  }
  return n;
}

namespace {

// One orderable module occurrence (optional order, or parallel preamble).
struct Slot {
  const void* node;
  size_t size;
};

void collectSlots(const chc::ModuleSeq& seq, std::vector<Slot>& out);

void collectSlots(const chc::Module& mod, std::vector<Slot>& out) {
  if (const auto* opt = std::get_if<chc::OptOrder>(&mod.node)) {
    out.push_back({opt, opt->terms.size()});
  } else if (const auto* split = std::get_if<chc::Split>(&mod.node)) {
    for (const auto& branch : split->branches) collectSlots(branch, out);
  } else if (const auto* par = std::get_if<chc::Parallel>(&mod.node)) {
    out.push_back({par, par->preamble.size()});
    collectSlots(par->body, out);
  }
}

void collectSlots(const chc::ModuleSeq& seq, std::vector<Slot>& out) {
  for (const auto& mod : seq) collectSlots(mod, out);
}

// Structural checks that the grammar cannot express. Returns the count of
// occurrences per symbol along the way.
class AstValidator {
 public:
  explicit AstValidator(const DeploymentRequest& req) : req_(req) {}

  void run(const chc::ChainAst& ast) {
    walkSeq(ast.root, false);
    for (const auto& [sym, n] : occurrences_) {
      if (n > 1) {
        throw ExpansionError("request '" + req_.id + "': symbol '" + sym +
                             "' occurs " + std::to_string(n) +
                             " times in the chain; each use and endpoint may "
                             "appear once");
      }
    }
  }

 private:
  const DeploymentRequest& req_;
  std::map<std::string, int> occurrences_;

  const UseDecl& requireUse(const chc::Term& t, const char* role) {
    const UseDecl* u = req_.findUse(t.symbol);
    if (u == nullptr) {
      throw ExpansionError("request '" + req_.id + "': " + role + " '" +
                           t.symbol + "' must be a function use, not an "
                           "endpoint");
    }
    return *u;
  }

  void requireSingleOutput(const chc::Term& t, const char* where) {
    const UseDecl* u = req_.findUse(t.symbol);
    if (u != nullptr && u->ratios.size() != 1) {
      throw ExpansionError("request '" + req_.id + "': use '" + t.symbol +
                           "' has " + std::to_string(u->ratios.size()) +
                           " rate ratios and cannot appear in " + where +
                           "; only the splitter may branch");
    }
  }

  void count(const chc::Term& t) { ++occurrences_[t.symbol]; }

  void walkSeq(const chc::ModuleSeq& seq, bool insideBody) {
    for (const auto& mod : seq) walkMod(mod, insideBody);
  }

  void walkMod(const chc::Module& mod, bool insideBody) {
    if (const auto* term = std::get_if<chc::Term>(&mod.node)) {
      checkBodyEndpoint(*term, insideBody);
      requireSingleOutput(*term, "a plain sequence position");
      count(*term);
    } else if (const auto* opt = std::get_if<chc::OptOrder>(&mod.node)) {
      for (const auto& t : opt->terms) {
        checkBodyEndpoint(t, insideBody);
        requireSingleOutput(t, "an optional-order module");
        count(t);
      }
    } else if (const auto* split = std::get_if<chc::Split>(&mod.node)) {
      checkBodyEndpoint(split->splitter, insideBody);
      const UseDecl& u = requireUse(split->splitter, "split head");
      if (u.ratios.size() != split->branches.size()) {
        throw ExpansionError(
            "request '" + req_.id + "': split head '" + u.id + "' declares " +
            std::to_string(u.ratios.size()) + " rate ratios but the chain "
            "gives it " + std::to_string(split->branches.size()) +
            " branches");
      }
      count(split->splitter);
      for (const auto& branch : split->branches) walkSeq(branch, insideBody);
    } else {
      const auto& par = std::get<chc::Parallel>(mod.node);
      const UseDecl& u = requireUse(par.splitter, "parallel head");
      if (static_cast<long>(u.ratios.size()) != par.count) {
        throw ExpansionError(
            "request '" + req_.id + "': parallel head '" + u.id +
            "' declares " + std::to_string(u.ratios.size()) +
            " rate ratios but the chain requests " +
            std::to_string(par.count) + " branches");
      }
      bool headListed = false;
      for (const auto& t : par.preamble) {
        checkBodyEndpoint(t, insideBody);
        if (t == par.splitter) {
          headListed = true;
        } else {
          requireSingleOutput(t, "a parallel preamble");
        }
        count(t);
      }
      if (!headListed) {
        throw ExpansionError("request '" + req_.id + "': parallel preamble "
                             "must list its head '" + par.splitter.symbol +
                             "'");
      }
      walkSeq(par.body, true);
    }
  }

  void checkBodyEndpoint(const chc::Term& t, bool insideBody) {
    if (insideBody && req_.isEndpoint(t.symbol)) {
      throw ExpansionError("request '" + req_.id + "': endpoint '" +
                           t.symbol + "' cannot sit inside a replicated "
                           "parallel body");
    }
  }
};

struct Exit {
  int node;
  Rational rate;
};

// Builds one VnfGraph for a fixed choice of per-slot permutations.
class Materializer {
 public:
  Materializer(const DeploymentRequest& req,
               const std::map<const void*, const std::vector<int>*>& perms)
      : req_(req), perms_(perms) {}

  VnfGraph run(const chc::ChainAst& ast) {
    g_.sourceRequest = req_.id;
    placeSeq(ast.root, {}, "");
    attachPairs();
    return std::move(g_);
  }

 private:
  const DeploymentRequest& req_;
  const std::map<const void*, const std::vector<int>*>& perms_;
  VnfGraph g_;

  const std::vector<int>& permFor(const void* node) {
    return *perms_.at(node);
  }

  // Creates the node for a term occurrence, wires all pending exits into
  // it, and returns (node index, rate entering it).
  std::pair<int, Rational> placeTerm(const chc::Term& term,
                                     const std::vector<Exit>& incoming,
                                     const std::string& suffix) {
    VnfNode node;
    node.id = term.symbol + suffix;
    if (const UseDecl* u = req_.findUse(term.symbol)) {
      node.function = u->function;
      node.ratios = u->ratios;
    } else {
      const EndpointDecl* a = req_.findEndpoint(term.symbol);
      node.isEndpoint = true;
      node.loc = a->loc;
      node.ratios = {Rational(1)};
    }
    int idx = g_.addNode(std::move(node));
    Rational inRate;
    if (incoming.empty()) {
      inRate = req_.initialRate;
    } else {
      for (const auto& exit : incoming) {
        g_.addEdge(exit.node, idx, exit.rate);
        inRate += exit.rate;
      }
    }
    return {idx, inRate};
  }

  Rational totalRatio(const chc::Term& term) {
    if (const UseDecl* u = req_.findUse(term.symbol)) {
      return std::accumulate(u->ratios.begin(), u->ratios.end(), Rational(0));
    }
    return Rational(1);
  }

  std::vector<Exit> placeMod(const chc::Module& mod,
                             std::vector<Exit> incoming,
                             const std::string& suffix) {
    if (const auto* term = std::get_if<chc::Term>(&mod.node)) {
      auto [idx, inRate] = placeTerm(*term, incoming, suffix);
      return {{idx, inRate * totalRatio(*term)}};
    }
    if (const auto* opt = std::get_if<chc::OptOrder>(&mod.node)) {
      const std::vector<int>& perm = permFor(opt);
      std::vector<Exit> cur = std::move(incoming);
      for (int pick : perm) {
        const chc::Term& t = opt->terms[static_cast<size_t>(pick)];
        auto [idx, inRate] = placeTerm(t, cur, suffix);
        cur = {{idx, inRate * totalRatio(t)}};
      }
      return cur;
    }
    if (const auto* split = std::get_if<chc::Split>(&mod.node)) {
      auto [idx, inRate] = placeTerm(split->splitter, incoming, suffix);
      const UseDecl& u = *req_.findUse(split->splitter.symbol);
      std::vector<Exit> exits;
      for (size_t b = 0; b < split->branches.size(); ++b) {
        std::vector<Exit> branchExits =
            placeSeq(split->branches[b], {{idx, inRate * u.ratios[b]}},
                     suffix);
        exits.insert(exits.end(), branchExits.begin(), branchExits.end());
      }
      return exits;
    }
    const auto& par = std::get<chc::Parallel>(mod.node);
    return placeParallel(par, std::move(incoming), suffix);
  }

  // The permuted preamble runs once as a shared prefix; the flow then
  // fans out into `count` copies of the body. Branch rates follow the
  // head's ratio list, scaled by the pass-through ratios of preamble
  // members placed after the head.
  std::vector<Exit> placeParallel(const chc::Parallel& par,
                                  std::vector<Exit> incoming,
                                  const std::string& suffix) {
    const std::vector<int>& perm = permFor(&par);
    const UseDecl& head = *req_.findUse(par.splitter.symbol);

    std::vector<Exit> cur = std::move(incoming);
    int lastNode = -1;
    Rational headInRate;
    bool headSeen = false;
    Rational afterHeadScale(1);
    for (int pick : perm) {
      const chc::Term& t = par.preamble[static_cast<size_t>(pick)];
      auto [idx, inRate] = placeTerm(t, cur, suffix);
      if (t == par.splitter) {
        headSeen = true;
        headInRate = inRate;
      } else if (headSeen) {
        afterHeadScale *= totalRatio(t);
      }
      cur = {{idx, inRate * totalRatio(t)}};
      lastNode = idx;
    }

    std::vector<Exit> exits;
    for (long k = 1; k <= par.count; ++k) {
      Rational branchRate =
          head.ratios[static_cast<size_t>(k - 1)] * headInRate *
          afterHeadScale;
      std::vector<Exit> branchExits =
          placeSeq(par.body, {{lastNode, branchRate}},
                   suffix + "#" + std::to_string(k));
      exits.insert(exits.end(), branchExits.begin(), branchExits.end());
    }
    return exits;
  }

  std::vector<Exit> placeSeq(const chc::ModuleSeq& seq,
                             std::vector<Exit> incoming,
                             const std::string& suffix) {
    std::vector<Exit> cur = std::move(incoming);
    for (const auto& mod : seq) {
      cur = placeMod(mod, std::move(cur), suffix);
    }
    return cur;
  }

  void attachPairs() {
    for (const auto& [srcEp, dstEp] : req_.pairs) {
      int s = g_.indexOf(srcEp);
      int t = g_.indexOf(dstEp);
      if (s < 0 || t < 0) {
        throw ExpansionError("request '" + req_.id + "': endpoint pair (" +
                             srcEp + ", " + dstEp + ") references an "
                             "endpoint that is not part of the chain");
      }
      g_.pairs.emplace_back(s, t);
    }
    for (const auto& lb : req_.latencyBounds) {
      int s = g_.indexOf(lb.src);
      int t = g_.indexOf(lb.dst);
      if (s < 0 || t < 0) {
        throw ExpansionError("request '" + req_.id + "': latency bound (" +
                             lb.src + ", " + lb.dst + ") references an "
                             "endpoint that is not part of the chain");
      }
      g_.latencyBounds[{s, t}] = lb.bound;
    }
  }
};

unsigned long long factorial(size_t n) {
  unsigned long long f = 1;
  for (size_t k = 2; k <= n; ++k) {
    if (f > std::numeric_limits<unsigned long long>::max() / k) {
      throw ExpansionError("combination count overflows; the request has "
                           "too many orderable terms");
    }
    f *= k;
  }
  return f;
}

std::vector<std::vector<int>> allPermutations(size_t n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

void checkDag(const VnfGraph& g) {
  // 0 = unseen, 1 = on stack, 2 = done
  std::vector<int> color(g.nodes.size(), 0);
  std::vector<std::vector<int>> out(g.nodes.size());
  for (const auto& e : g.edges) {
    out[static_cast<size_t>(e.src)].push_back(e.dst);
  }
  std::vector<std::pair<int, size_t>> stack;
  for (size_t start = 0; start < g.nodes.size(); ++start) {
    if (color[start] != 0) continue;
    stack.push_back({static_cast<int>(start), 0});
    color[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < out[static_cast<size_t>(v)].size()) {
        int w = out[static_cast<size_t>(v)][next++];
        if (color[static_cast<size_t>(w)] == 1) {
          throw ExpansionError("graph has a cycle through '" +
                               g.nodes[static_cast<size_t>(w)].id + "'");
        }
        if (color[static_cast<size_t>(w)] == 0) {
          color[static_cast<size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        color[static_cast<size_t>(v)] = 2;
        stack.pop_back();
      }
    }
  }
}

}  // namespace

ExpansionSet expandAll(const chc::ChainAst& ast,
                       const DeploymentRequest& request,
                       unsigned long long limit) {
  AstValidator(request).run(ast);

  std::vector<Slot> slots;
  collectSlots(ast.root, slots);

  unsigned long long count = 1;
  for (const auto& slot : slots) {
    unsigned long long f = factorial(slot.size);
    if (count > std::numeric_limits<unsigned long long>::max() / f) {
      throw ExpansionError("combination count overflows; the request has "
                           "too many orderable modules");
    }
    count *= f;
  }
  if (count > limit) {
    throw ExpansionError("request '" + request.id + "' expands to " +
                         std::to_string(count) + " graphs, above the " +
                         std::to_string(limit) + " limit");
  }

  std::vector<std::vector<std::vector<int>>> perSlot;
  for (const auto& slot : slots) {
    perSlot.push_back(allPermutations(slot.size));
  }

  ExpansionSet set;
  set.request = request.id;
  set.combinationCount = count;

  // Odometer over per-slot permutations, last slot fastest.
  std::vector<size_t> pick(slots.size(), 0);
  while (true) {
    std::map<const void*, const std::vector<int>*> chosen;
    for (size_t s = 0; s < slots.size(); ++s) {
      chosen[slots[s].node] = &perSlot[s][pick[s]];
    }
    VnfGraph g = Materializer(request, chosen).run(ast);
    checkDag(g);
    set.graphs.push_back(std::move(g));

    bool done = true;
    for (size_t s = slots.size(); s-- > 0;) {
      if (++pick[s] < perSlot[s].size()) {
        done = false;
        break;
      }
      pick[s] = 0;
    }
    if (done) break;
  }

  return set;
}

VnfGraph expandHeuristic(const chc::ChainAst& ast,
                         const DeploymentRequest& request) {
  AstValidator(request).run(ast);

  std::vector<Slot> slots;
  collectSlots(ast.root, slots);

  // Ascending total outgoing ratio, stable on ties.
  auto sortedPerm = [&](const std::vector<chc::Term>& terms) {
    std::vector<int> perm(terms.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Rational> key;
    for (const auto& t : terms) {
      if (const UseDecl* u = request.findUse(t.symbol)) {
        key.push_back(std::accumulate(u->ratios.begin(), u->ratios.end(),
                                      Rational(0)));
      } else {
        key.push_back(Rational(1));
      }
    }
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
      return key[static_cast<size_t>(a)] < key[static_cast<size_t>(b)];
    });
    return perm;
  };

  // Walk in the same order collectSlots used, sorting each slot's terms.
  std::vector<std::vector<int>> chosenStorage(slots.size());
  std::map<const void*, const std::vector<int>*> chosen;
  struct Filler {
    decltype(sortedPerm)& sorter;
    std::map<const void*, const std::vector<int>*>& chosen;
    std::vector<std::vector<int>>& storage;
    size_t next = 0;

    void seq(const chc::ModuleSeq& s) {
      for (const auto& m : s) mod(m);
    }
    void mod(const chc::Module& m) {
      if (const auto* opt = std::get_if<chc::OptOrder>(&m.node)) {
        storage[next] = sorter(opt->terms);
        chosen[opt] = &storage[next];
        ++next;
      } else if (const auto* split = std::get_if<chc::Split>(&m.node)) {
        for (const auto& b : split->branches) seq(b);
      } else if (const auto* par = std::get_if<chc::Parallel>(&m.node)) {
        storage[next] = sorter(par->preamble);
        chosen[par] = &storage[next];
        ++next;
        seq(par->body);
      }
    }
  } filler{sortedPerm, chosen, chosenStorage};
  filler.seq(ast.root);

  VnfGraph g = Materializer(request, chosen).run(ast);
  checkDag(g);
  return g;
}

VnfGraph combine(const std::vector<VnfGraph>& graphs) {
  if (graphs.empty()) {
    throw ExpansionError("combine called with no graphs");
  }
  std::set<std::string> requestIds;
  for (const auto& g : graphs) {
    if (g.sourceRequest.empty()) {
      throw ExpansionError("combine needs graphs tagged with their request");
    }
    if (!requestIds.insert(g.sourceRequest).second) {
      throw ExpansionError("combine got two graphs for request '" +
                           g.sourceRequest + "'");
    }
  }

  VnfGraph out;
  out.sourceRequest = "combined";
  for (const auto& g : graphs) {
    std::string prefix = g.sourceRequest + "/";
    int base = static_cast<int>(out.nodes.size());
    for (const auto& n : g.nodes) {
      VnfNode copy = n;
      copy.id = prefix + n.id;
      out.addNode(std::move(copy));
    }
    for (const auto& e : g.edges) {
      out.addEdge(base + e.src, base + e.dst, e.rate);
    }
    for (const auto& [s, t] : g.pairs) {
      out.pairs.emplace_back(base + s, base + t);
    }
    for (const auto& [pair, bound] : g.latencyBounds) {
      out.latencyBounds[{base + pair.first, base + pair.second}] = bound;
    }
  }
  return out;
}

void enumeratePaths(VnfGraph& graph) {
  checkDag(graph);
  graph.pairPaths.clear();

  // Out-edges ordered by destination id so path listings are stable.
  std::vector<std::vector<int>> out(graph.nodes.size());
  for (int ei = 0; ei < static_cast<int>(graph.edges.size()); ++ei) {
    out[static_cast<size_t>(graph.edges[static_cast<size_t>(ei)].src)]
        .push_back(ei);
  }
  for (auto& list : out) {
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      const auto& na = graph.nodes[static_cast<size_t>(
          graph.edges[static_cast<size_t>(a)].dst)];
      const auto& nb = graph.nodes[static_cast<size_t>(
          graph.edges[static_cast<size_t>(b)].dst)];
      return na.id < nb.id;
    });
  }

  for (const auto& [src, dst] : graph.pairs) {
    if (graph.pairPaths.count({src, dst})) continue;
    auto& paths = graph.pairPaths[{src, dst}];
    std::vector<int> current;
    auto dfs = [&](auto&& self, int v) -> void {
      if (v == dst) {
        paths.push_back(current);
        return;
      }
      for (int ei : out[static_cast<size_t>(v)]) {
        current.push_back(ei);
        self(self, graph.edges[static_cast<size_t>(ei)].dst);
        current.pop_back();
      }
    };
    dfs(dfs, src);
  }
}

std::string toDot(const VnfGraph& graph) {
  std::ostringstream dot;
  dot << "digraph vnf {\n  rankdir=LR;\n";
  for (const auto& n : graph.nodes) {
    dot << "  \"" << n.id << "\" [label=\"" << n.id;
    if (n.isEndpoint) {
      dot << "\\n@" << n.loc << "\" shape=box";
    } else {
      dot << "\\n" << n.function << "\"";
    }
    dot << "];\n";
  }
  for (const auto& e : graph.edges) {
    dot << "  \"" << graph.nodes[static_cast<size_t>(e.src)].id << "\" -> \""
        << graph.nodes[static_cast<size_t>(e.dst)].id << "\" [label=\""
        << formatRational(e.rate) << "\"];\n";
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace chainforge
