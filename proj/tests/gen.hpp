#pragma once

// Deterministic generators for the property tests: random chain expressions
// drawn from the request grammar, delimiter mutations that leave the
// grammar, and small random placement instances for solver comparisons.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chainforge/model.hpp"

namespace testgen {

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  long range(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(eng_);
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(range(0, static_cast<long>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

// A chain expression together with a request declaring every symbol it
// mentions, so the expression can be handed straight to the parser.
struct GeneratedChain {
  std::string text;
  chainforge::DeploymentRequest request;
};

// Derivation following the grammar productions:
//   modules  -> order modules | mod
//   order    -> mod '.'
//   mod      -> optorder | split | parallel | term
//   optorder -> '(' term moreterm ')'
//   split    -> term '[' modules moremod ']'
//   parallel -> term '{' term moreterm ';' modules ';' num '}'
//   moreterm -> ',' term moreterm | empty
//   moremod  -> ',' modules moremod | empty
// `depth` bounds the recursion through split and parallel bodies.
class ChainGenerator {
 public:
  ChainGenerator(Rng& rng, int maxDepth) : rng_(rng), maxDepth_(maxDepth) {}

  GeneratedChain generate() {
    GeneratedChain out;
    out.text = modules(0);
    out.request.id = "gen";
    out.request.chain = out.text;
    out.request.initialRate = 1;
    for (const std::string& sym : symbols_)
      out.request.uses.push_back({sym, "f", {chainforge::Rational(1)}});
    return out;
  }

 private:
  std::string modules(int depth) {
    std::string out;
    const long orders = rng_.range(0, 2);
    for (long k = 0; k < orders; ++k) out += mod(depth) + " . ";
    return out + mod(depth);
  }

  std::string mod(int depth) {
    const bool deep = depth < maxDepth_;
    switch (rng_.range(0, deep ? 3 : 1)) {
      case 0:
        return term();
      case 1: {
        std::string out = "(" + term();
        const long extra = rng_.range(0, 3);
        for (long k = 0; k < extra; ++k) out += ", " + term();
        return out + ")";
      }
      case 2: {
        std::string out = term() + "[" + modules(depth + 1);
        const long extra = rng_.range(0, 2);
        for (long k = 0; k < extra; ++k) out += ", " + modules(depth + 1);
        return out + "]";
      }
      default: {
        std::string out = term() + "{" + term();
        const long extra = rng_.range(0, 2);
        for (long k = 0; k < extra; ++k) out += ", " + term();
        out += "; " + modules(depth + 1);
        return out + "; " + std::to_string(rng_.range(1, 64)) + "}";
      }
    }
  }

  std::string term() {
    std::string sym = "s" + std::to_string(symbols_.size() + 1);
    symbols_.push_back(sym);
    return sym;
  }

  Rng& rng_;
  int maxDepth_;
  std::vector<std::string> symbols_;
};

inline GeneratedChain randomChain(Rng& rng, int maxDepth = 6) {
  ChainGenerator gen(rng, maxDepth);
  return gen.generate();
}

// Splits a chain expression into its tokens: symbols, numerals, and the
// nine single-character delimiters.
inline std::vector<std::string> chainTokens(const std::string& text) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() &&
             std::isalnum(static_cast<unsigned char>(text[j])))
        ++j;
      tokens.push_back(text.substr(i, j - i));
      i = j;
    } else {
      tokens.push_back(std::string(1, c));
      ++i;
    }
  }
  return tokens;
}

// Injects one delimiter error at a token boundary: either inserts a random
// delimiter or deletes an existing one. Either edit leaves the grammar, so
// the result must be rejected by the parser.
inline std::string mutateDelimiters(Rng& rng, const std::string& text) {
  static const std::vector<std::string> kDelims = {".", ",", ";", "(", ")",
                                                   "[", "]", "{", "}"};
  std::vector<std::string> tokens = chainTokens(text);
  std::vector<size_t> delimAt;
  for (size_t k = 0; k < tokens.size(); ++k)
    if (tokens[k].size() == 1 && !std::isalnum(static_cast<unsigned char>(
                                     tokens[k][0])))
      delimAt.push_back(k);

  const bool doDelete = !delimAt.empty() && rng.chance(0.5);
  if (doDelete) {
    const size_t at = delimAt[static_cast<size_t>(
        rng.range(0, static_cast<long>(delimAt.size()) - 1))];
    tokens.erase(tokens.begin() + static_cast<long>(at));
  } else {
    const long at = rng.range(0, static_cast<long>(tokens.size()));
    tokens.insert(tokens.begin() + at, rng.pick(kDelims));
  }

  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out += " ";
    out += t;
  }
  return out;
}

// A self-contained random placement instance: a small substrate, a small
// catalog, and one or two linear requests. Sized so that exhaustive
// enumeration of every placement stays cheap.
struct GeneratedInstance {
  std::vector<chainforge::NodeSpec> nodes;
  std::vector<chainforge::SubstrateEdge> edges;
  std::vector<chainforge::FunctionSpec> functions;
  std::vector<chainforge::DeploymentRequest> requests;
};

inline GeneratedInstance randomInstance(Rng& rng) {
  using chainforge::Rational;
  GeneratedInstance out;

  const long nv = rng.range(2, 4);
  for (long v = 0; v < nv; ++v)
    out.nodes.push_back({"v" + std::to_string(v + 1),
                         Rational(rng.range(0, 12)),
                         Rational(rng.range(0, 12))});

  for (long v = 0; v < nv; ++v)
    if (rng.chance(0.85))
      out.edges.push_back({out.nodes[static_cast<size_t>(v)].id,
                           out.nodes[static_cast<size_t>(v)].id,
                           Rational(rng.range(5, 30)),
                           Rational(rng.range(0, 1))});
  for (long s = 0; s < nv; ++s)
    for (long d = 0; d < nv; ++d) {
      if (s == d || !rng.chance(0.7)) continue;
      out.edges.push_back({out.nodes[static_cast<size_t>(s)].id,
                           out.nodes[static_cast<size_t>(d)].id,
                           Rational(rng.range(5, 30)),
                           Rational(rng.range(1, 4))});
    }

  const long nf = rng.range(1, 3);
  for (long f = 0; f < nf; ++f) {
    long pd = rng.range(0, 6);
    long ps = rng.range(0, 6);
    if (pd == 0 && ps == 0) pd = rng.range(1, 6);
    out.functions.push_back({"g" + std::to_string(f + 1), Rational(pd),
                             Rational(ps), rng.range(1, 2), rng.range(1, 2)});
  }

  const long nreq = rng.range(1, 2);
  long usesLeft = 4;
  for (long r = 0; r < nreq; ++r) {
    chainforge::DeploymentRequest req;
    req.id = "q" + std::to_string(r + 1);
    const std::string src = "a" + std::to_string(r + 1);
    const std::string dst = "b" + std::to_string(r + 1);
    const std::string srcLoc = rng.pick(out.nodes).id;
    req.endpoints.push_back({src, srcLoc});
    req.endpoints.push_back(
        {dst, rng.chance(0.25) ? srcLoc : rng.pick(out.nodes).id});
    req.pairs.push_back({src, dst});
    req.initialRate = Rational(rng.range(1, 5));

    const long nu = std::min(usesLeft, rng.range(1, 2));
    usesLeft -= nu;
    std::vector<std::string> ids;
    for (long u = 0; u < nu; ++u) {
      const std::string id = "u" + std::to_string(r + 1) + std::to_string(u + 1);
      req.uses.push_back({id, rng.pick(out.functions).id, {Rational(1)}});
      ids.push_back(id);
    }

    if (nu == 2 && rng.chance(0.35)) {
      req.chain = src + " . (" + ids[0] + ", " + ids[1] + ") . " + dst;
    } else {
      req.chain = src;
      for (const std::string& id : ids) req.chain += " . " + id;
      req.chain += " . " + dst;
    }

    if (rng.chance(0.5))
      req.latencyBounds.push_back({src, dst, Rational(rng.range(2, 20))});
    out.requests.push_back(std::move(req));
  }
  return out;
}

// A single request whose chain mixes plain, optional-order, split and
// parallel modules. Uses carry non-unit rate ratios so module ordering
// changes the summed edge rate; the orderable use count stays <= 5.
struct OrderableRequest {
  chainforge::DeploymentRequest request;
  long orderableUses = 0;
};

inline OrderableRequest randomOrderableRequest(Rng& rng) {
  using chainforge::Rational;
  OrderableRequest out;
  chainforge::DeploymentRequest& req = out.request;
  req.id = "ord";
  req.endpoints.push_back({"a", "x"});
  req.endpoints.push_back({"b", "y"});
  req.pairs.push_back({"a", "b"});
  req.initialRate = Rational(rng.range(1, 4));

  static const std::vector<Rational> kRatios = {
      Rational(1, 3), Rational(1, 2), Rational(1), Rational(2), Rational(3)};

  int nextId = 0;
  auto freshUse = [&](std::vector<Rational> ratios) {
    std::string id = "u" + std::to_string(++nextId);
    req.uses.push_back({id, "f", std::move(ratios)});
    return id;
  };
  auto single = [&] { return freshUse({rng.pick(kRatios)}); };

  long budget = 5;
  std::vector<std::string> mods;
  const long count = rng.range(1, 3);
  for (long k = 0; k < count; ++k) {
    const long kind = rng.range(0, 3);
    if (kind == 1 && budget >= 2) {
      const long n = rng.range(2, std::min<long>(3, budget));
      budget -= n;
      std::string m = "(" + single();
      for (long t = 1; t < n; ++t) m += ", " + single();
      mods.push_back(m + ")");
    } else if (kind == 2 && budget >= 2) {
      const long pre = rng.range(2, std::min<long>(3, budget));
      budget -= pre;
      const long branches = rng.range(2, 3);
      std::vector<Rational> headRatios(static_cast<size_t>(branches),
                                       Rational(1, branches));
      const std::string head = freshUse(headRatios);
      std::string m = head + "{" + head;
      for (long t = 1; t < pre; ++t) m += ", " + single();
      m += "; " + single() + "; " + std::to_string(branches) + "}";
      mods.push_back(m);
    } else if (kind == 3) {
      const std::string head = freshUse({rng.pick(kRatios), rng.pick(kRatios)});
      mods.push_back(head + "[" + single() + ", " + single() + "]");
    } else {
      mods.push_back(single());
    }
  }
  out.orderableUses = 5 - budget;

  req.chain = "a";
  for (const std::string& m : mods) req.chain += " . " + m;
  req.chain += " . b";
  return out;
}

}  // namespace testgen
