#include "chainforge/lp_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/errors.hpp"
#include "chainforge/model_io.hpp"
#include "chainforge/rational.hpp"

namespace chainforge::milp {

namespace {

// Solution values this close to an integer are rounded; anything farther
// is rejected as fractional.
constexpr double kBinaryTol = 1e-6;

// Multiplying a row (or the objective) by the positive lcm of its
// denominators keeps it exact while the file carries only integers.
mpz_class rowScale(const std::vector<LinTerm>& terms, const Rational& rhs) {
  mpz_class l(1);
  for (const LinTerm& t : terms)
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coef.get_den().get_mpz_t());
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), rhs.get_den().get_mpz_t());
  return l;
}

std::string intCoef(const Rational& coef, const mpz_class& scale) {
  Rational scaled = coef * Rational(scale);
  scaled.canonicalize();
  return scaled.get_num().get_str();
}

void appendTerm(std::string& line, std::string& out, bool first,
                const std::string& coef, const std::string& name) {
  std::string piece;
  if (coef.size() > 0 && coef[0] == '-')
    piece = (first ? "- " : " - ") + coef.substr(1) + " " + name;
  else
    piece = (first ? "" : " + ") + coef + " " + name;
  if (line.size() + piece.size() > 200) {
    out += line + "\n";
    line = "      ";
  }
  line += piece;
}

const char* relText(Rel r) {
  switch (r) {
    case Rel::Le:
      return "<=";
    case Rel::Eq:
      return "=";
    case Rel::Ge:
      return ">=";
  }
  return "=";
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool looksNumeric(const std::string& tok) {
  size_t i = 0;
  if (tok[i] == '+' || tok[i] == '-') ++i;
  return i < tok.size() &&
         (std::isdigit(static_cast<unsigned char>(tok[i])) != 0 ||
          tok[i] == '.');
}

std::map<int, long> latencyWeights(const VnfGraph& graph) {
  std::map<int, long> w;
  for (const auto& entry : graph.latencyBounds)
    for (const auto& path : graph.pairPaths.at(entry.first))
      for (int c : path) ++w[c];
  return w;
}

}  // namespace

std::string renderLp(const PlacementInstance& inst, Metric objective) {
  std::ostringstream out;
  out << "\\ placement program, objective " << metricName(objective) << "\n";
  out << (metricIsMaximize(objective) ? "Maximize" : "Minimize") << "\n";

  const LinExpr& obj = inst.objective(objective);
  {
    std::string body;
    std::string line = " obj:";
    if (obj.terms.empty()) {
      if (!inst.vars.empty()) line += " 0 " + inst.vars[0].name;
    } else {
      const mpz_class scale = rowScale(obj.terms, obj.constant);
      line += " ";
      bool first = true;
      for (const LinTerm& t : obj.terms) {
        appendTerm(line, body, first, intCoef(t.coef, scale),
                   inst.vars[static_cast<size_t>(t.var)].name);
        first = false;
      }
    }
    out << body << line << "\n";
  }

  out << "Subject To\n";
  for (const LinRow& row : inst.rows) {
    const mpz_class scale = rowScale(row.terms, row.rhs);
    std::string body;
    std::string line = " " + row.name + ":";
    if (row.terms.empty()) {
      if (!inst.vars.empty()) line += " 0 " + inst.vars[0].name;
    } else {
      line += " ";
      bool first = true;
      for (const LinTerm& t : row.terms) {
        appendTerm(line, body, first, intCoef(t.coef, scale),
                   inst.vars[static_cast<size_t>(t.var)].name);
        first = false;
      }
    }
    Rational rhs = row.rhs * Rational(scale);
    rhs.canonicalize();
    line += std::string(" ") + relText(row.rel) + " " + rhs.get_num().get_str();
    out << body << line << "\n";
  }

  out << "Bounds\n";
  for (const Var& v : inst.vars) {
    if (v.kind != VarKind::Continuous) continue;
    if (!v.lo && !v.hi) {
      out << " " << v.name << " free\n";
    } else {
      if (v.lo) out << " " << v.name << " >= " << formatRational(*v.lo) << "\n";
      if (v.hi) out << " " << v.name << " <= " << formatRational(*v.hi) << "\n";
    }
  }

  out << "Binaries\n";
  {
    std::string line;
    for (const Var& v : inst.vars) {
      if (v.kind != VarKind::Binary) continue;
      if (line.size() + v.name.size() + 1 > 200) {
        out << line << "\n";
        line.clear();
      }
      line += " " + v.name;
    }
    if (!line.empty()) out << line << "\n";
  }
  out << "End\n";
  return out.str();
}

void exportLp(const PlacementInstance& inst, Metric objective,
              const std::string& path) {
  writeFile(path, renderLp(inst, objective));
}

ParsedLp parseLp(const std::string& path) {
  const std::string text = readFile(path);

  std::vector<std::string> tokens;
  {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      const size_t cut = line.find('\\');
      if (cut != std::string::npos) line.erase(cut);
      std::istringstream words(line);
      std::string tok;
      while (words >> tok) tokens.push_back(tok);
    }
  }

  ParsedLp lp;
  auto harvest = [&lp](const std::string& name) -> VarRef {
    auto it = lp.varIndex.find(name);
    if (it != lp.varIndex.end()) return it->second;
    const VarRef ref = static_cast<VarRef>(lp.varNames.size());
    lp.varIndex.emplace(name, ref);
    lp.varNames.push_back(name);
    lp.isBinary.push_back(false);
    return ref;
  };
  auto isRel = [](const std::string& t) {
    return t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">";
  };
  auto toRel = [](const std::string& t) {
    if (t == "<=" || t == "<") return Rel::Le;
    if (t == ">=" || t == ">") return Rel::Ge;
    return Rel::Eq;
  };

  size_t pos = 0;
  auto atSection = [&](size_t p, std::string* name) {
    if (p >= tokens.size()) return false;
    const std::string t = lower(tokens[p]);
    if (t == "subject" && p + 1 < tokens.size() &&
        lower(tokens[p + 1]) == "to") {
      *name = "subject to";
      return true;
    }
    if (t == "st" || t == "s.t.") {
      *name = "subject to";
      return true;
    }
    if (t == "bounds" || t == "binaries" || t == "binary" || t == "end" ||
        t == "general" || t == "generals") {
      *name = t == "binary" ? "binaries" : t;
      return true;
    }
    return false;
  };
  auto parseExpr = [&](size_t* p, const std::string& stopAtRel,
                       std::vector<LinTerm>* terms) {
    int sign = 1;
    std::optional<Rational> coef;
    while (*p < tokens.size()) {
      std::string section;
      if (atSection(*p, &section)) break;
      const std::string& tok = tokens[*p];
      if (!stopAtRel.empty() && isRel(tok)) break;
      if (tok == "+") {
        ++*p;
        continue;
      }
      if (tok == "-") {
        sign = -sign;
        ++*p;
        continue;
      }
      if (looksNumeric(tok)) {
        if (coef)
          throw SchemaError("lp: two consecutive numbers near '" + tok + "'");
        coef = parseRational(tok);
        ++*p;
        continue;
      }
      Rational c = coef.value_or(Rational(1));
      if (sign < 0) c = -c;
      terms->push_back({c, harvest(tok)});
      sign = 1;
      coef.reset();
      ++*p;
    }
    if (coef) throw SchemaError("lp: dangling coefficient in expression");
  };

  if (pos >= tokens.size()) throw SchemaError("lp: empty file");
  {
    const std::string sense = lower(tokens[pos]);
    if (sense == "maximize" || sense == "maximise" || sense == "max")
      lp.maximize = true;
    else if (sense == "minimize" || sense == "minimise" || sense == "min")
      lp.maximize = false;
    else
      throw SchemaError("lp: expected objective sense, got '" + tokens[pos] +
                        "'");
    ++pos;
  }

  if (pos < tokens.size() && tokens[pos].size() > 1 &&
      tokens[pos].back() == ':')
    ++pos;
  parseExpr(&pos, "", &lp.objective.terms);

  std::string section;
  if (!atSection(pos, &section) || section != "subject to")
    throw SchemaError("lp: expected 'Subject To'");
  pos += lower(tokens[pos]) == "subject" ? 2 : 1;

  while (pos < tokens.size() && !atSection(pos, &section)) {
    LinRow row;
    if (tokens[pos].size() > 1 && tokens[pos].back() == ':') {
      row.name = tokens[pos].substr(0, tokens[pos].size() - 1);
      ++pos;
    }
    parseExpr(&pos, "stop", &row.terms);
    if (pos >= tokens.size() || !isRel(tokens[pos]))
      throw SchemaError("lp: constraint '" + row.name +
                        "' has no relation operator");
    row.rel = toRel(tokens[pos]);
    ++pos;
    if (pos >= tokens.size() || !looksNumeric(tokens[pos]))
      throw SchemaError("lp: constraint '" + row.name +
                        "' has no right-hand side");
    row.rhs = parseRational(tokens[pos]);
    ++pos;
    lp.rows.push_back(std::move(row));
  }

  while (pos < tokens.size()) {
    if (!atSection(pos, &section))
      throw SchemaError("lp: unexpected token '" + tokens[pos] + "'");
    if (section == "end") break;
    if (section == "subject to")
      throw SchemaError("lp: unexpected second constraint section");
    ++pos;
    if (section == "bounds") {
      while (pos < tokens.size() && !atSection(pos, &section)) {
        if (looksNumeric(tokens[pos])) {
          if (pos + 2 >= tokens.size() || !isRel(tokens[pos + 1]))
            throw SchemaError("lp: malformed bound near '" + tokens[pos] +
                              "'");
          harvest(tokens[pos + 2]);
          pos += 3;
          if (pos + 1 < tokens.size() && isRel(tokens[pos]) &&
              looksNumeric(tokens[pos + 1]))
            pos += 2;
        } else if (pos + 1 < tokens.size() &&
                   lower(tokens[pos + 1]) == "free") {
          harvest(tokens[pos]);
          pos += 2;
        } else if (pos + 2 < tokens.size() && isRel(tokens[pos + 1]) &&
                   looksNumeric(tokens[pos + 2])) {
          harvest(tokens[pos]);
          pos += 3;
        } else {
          throw SchemaError("lp: malformed bound near '" + tokens[pos] + "'");
        }
      }
    } else {
      const bool markBinary = section == "binaries";
      while (pos < tokens.size() && !atSection(pos, &section)) {
        const VarRef ref = harvest(tokens[pos]);
        if (markBinary) lp.isBinary[static_cast<size_t>(ref)] = true;
        ++pos;
      }
    }
  }
  return lp;
}

PlacementSolution solutionFromAssignment(const PlacementInstance& inst,
                                         const Assignment& asg) {
  const SubstrateNetwork& net = *inst.net;
  const VnfGraph& graph = *inst.graph;
  const auto& nodes = net.nodes();
  const auto& edges = net.edges();
  const int nv = static_cast<int>(nodes.size());
  const int ne = static_cast<int>(edges.size());

  std::map<NodeId, int> nodeIdx;
  for (int v = 0; v < nv; ++v) nodeIdx.emplace(nodes[v].id, v);
  std::vector<int> esrc(static_cast<size_t>(ne));
  std::vector<int> edst(static_cast<size_t>(ne));
  for (int t = 0; t < ne; ++t) {
    esrc[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].src);
    edst[static_cast<size_t>(t)] = nodeIdx.at(edges[static_cast<size_t>(t)].dst);
  }

  PlacementSolution sol;

  std::vector<int> host(graph.nodes.size(), -1);
  for (size_t gi = 0; gi < graph.nodes.size(); ++gi) {
    const std::string& id = graph.nodes[gi].id;
    for (int v = 0; v < nv; ++v) {
      auto it = asg.m.find({id, v});
      if (it == asg.m.end() || it->second == 0) continue;
      if (host[gi] != -1)
        throw SolutionImportError("node '" + id +
                                  "' is mapped to more than one network node");
      host[gi] = v;
    }
    if (host[gi] == -1)
      throw SolutionImportError("node '" + id + "' is not mapped anywhere");
    sol.mapping[id] = nodes[static_cast<size_t>(host[gi])].id;
  }

  for (size_t gi = 0; gi < graph.nodes.size(); ++gi) {
    const VnfNode& gn = graph.nodes[gi];
    if (gn.isEndpoint) continue;
    const int v = host[gi];
    const int ms = [&] {
      auto it = asg.ms.find({gn.id, v});
      return it == asg.ms.end() ? 0 : it->second;
    }();
    const int md = [&] {
      auto it = asg.md.find({gn.id, v});
      return it == asg.md.end() ? 0 : it->second;
    }();
    if (ms + md != 1)
      throw SolutionImportError("use '" + gn.id +
                                "' has no unambiguous role on its host");
    sol.roles[gn.id] = md == 1 ? Role::DataCenter : Role::Switch;
  }

  for (const auto& kv : asg.inst) {
    if (kv.second == 0) continue;
    sol.instanceCount[{kv.first.first,
                       nodes[static_cast<size_t>(kv.first.second)].id}] =
        kv.second;
  }
  for (const auto& kv : asg.used) {
    if (kv.second != 0)
      sol.usedNodes.insert(nodes[static_cast<size_t>(kv.first)].id);
  }

  std::vector<Rational> flow(static_cast<size_t>(ne), Rational(0));

  for (int c = 0; c < static_cast<int>(graph.edges.size()); ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const std::string& uid = graph.nodes[static_cast<size_t>(ge.src)].id;
    const std::string& upid = graph.nodes[static_cast<size_t>(ge.dst)].id;
    const int x = host[static_cast<size_t>(ge.src)];
    const int y = host[static_cast<size_t>(ge.dst)];
    const std::string what = "commodity " + uid + " -> " + upid;

    std::set<int> support;
    for (const auto& kv : asg.e) {
      if (kv.second == 0 || kv.first.commodity != c) continue;
      if (kv.first.x != x || kv.first.y != y) continue;
      support.insert(kv.first.edge);
    }

    std::vector<int> walk;
    if (x == y) {
      int selfEdge = -1;
      for (int t : support)
        if (esrc[static_cast<size_t>(t)] == x &&
            edst[static_cast<size_t>(t)] == x)
          selfEdge = t;
      if (selfEdge == -1)
        throw SolutionImportError(
            what + ": co-located ends need the node's self-loop edge");
      walk.push_back(selfEdge);
    } else {
      std::vector<int> parentEdge(static_cast<size_t>(nv), -1);
      std::vector<bool> seen(static_cast<size_t>(nv), false);
      std::deque<int> fifo;
      seen[static_cast<size_t>(x)] = true;
      fifo.push_back(x);
      while (!fifo.empty()) {
        const int cur = fifo.front();
        fifo.pop_front();
        if (cur == y) break;
        for (int t : support) {
          if (esrc[static_cast<size_t>(t)] != cur) continue;
          const int nxt = edst[static_cast<size_t>(t)];
          if (nxt == cur || seen[static_cast<size_t>(nxt)]) continue;
          seen[static_cast<size_t>(nxt)] = true;
          parentEdge[static_cast<size_t>(nxt)] = t;
          fifo.push_back(nxt);
        }
      }
      if (!seen[static_cast<size_t>(y)])
        throw SolutionImportError(what +
                                  ": active edges do not connect its hosts");
      for (int cur = y; cur != x;) {
        const int t = parentEdge[static_cast<size_t>(cur)];
        walk.push_back(t);
        cur = esrc[static_cast<size_t>(t)];
      }
      std::reverse(walk.begin(), walk.end());
    }

    std::vector<std::pair<NodeId, NodeId>> hops;
    Rational lat(0);
    for (int t : walk) {
      hops.emplace_back(edges[static_cast<size_t>(t)].src,
                        edges[static_cast<size_t>(t)].dst);
      lat += edges[static_cast<size_t>(t)].latency;
      flow[static_cast<size_t>(t)] += ge.rate;
    }
    sol.pathEdges[{uid, upid}] = std::move(hops);
    sol.pathLatency[{uid, upid}] = lat;
  }

  for (int t = 0; t < ne; ++t) {
    sol.remainingRate[{edges[static_cast<size_t>(t)].src,
                       edges[static_cast<size_t>(t)].dst}] =
        edges[static_cast<size_t>(t)].dataRate - flow[static_cast<size_t>(t)];
  }

  sol.objectiveValues.remdr = 0;
  for (int t = 0; t < ne; ++t)
    if (esrc[static_cast<size_t>(t)] != edst[static_cast<size_t>(t)])
      sol.objectiveValues.remdr += sol.remainingRate.at(
          {edges[static_cast<size_t>(t)].src, edges[static_cast<size_t>(t)].dst});
  sol.objectiveValues.usedNodes = static_cast<long>(sol.usedNodes.size());
  sol.objectiveValues.latency = 0;
  for (const auto& kv : latencyWeights(graph)) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(kv.first)];
    sol.objectiveValues.latency +=
        Rational(kv.second) *
        sol.pathLatency.at({graph.nodes[static_cast<size_t>(ge.src)].id,
                            graph.nodes[static_cast<size_t>(ge.dst)].id});
  }

  return sol;
}

PlacementSolution importSolution(const PlacementInstance& inst,
                                 const std::string& path) {
  const std::string text = readFile(path);

  std::vector<double> value(inst.vars.size(), 0.0);
  std::istringstream lines(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(lines, line)) {
    ++lineNo;
    std::istringstream words(line);
    std::string name;
    if (!(words >> name) || name[0] == '#') continue;
    std::string valTok;
    if (!(words >> valTok))
      throw SolutionImportError("line " + std::to_string(lineNo) +
                                ": expected '<variable> <value>'");
    auto it = inst.varIndex.find(name);
    if (it == inst.varIndex.end())
      throw SolutionImportError("line " + std::to_string(lineNo) +
                                ": unknown variable '" + name + "'");
    char* end = nullptr;
    const double v = std::strtod(valTok.c_str(), &end);
    if (end == nullptr || *end != '\0')
      throw SolutionImportError("line " + std::to_string(lineNo) +
                                ": unparsable value '" + valTok + "'");
    value[static_cast<size_t>(it->second)] = v;
  }

  Assignment asg;
  auto rounded = [&](VarRef ref) {
    const double v = value[static_cast<size_t>(ref)];
    const long r = std::lround(v);
    if (r < 0 || r > 1 || std::abs(v - static_cast<double>(r)) > kBinaryTol)
      throw SolutionImportError("variable '" +
                                inst.vars[static_cast<size_t>(ref)].name +
                                "' is not binary (value " +
                                std::to_string(v) + ")");
    return static_cast<int>(r);
  };

  const VnfGraph& graph = *inst.graph;
  for (const auto& kv : inst.mVar) {
    const int v = rounded(kv.second);
    if (v != 0)
      asg.m[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
             kv.first.second}] = v;
  }
  for (const auto& kv : inst.msVar) {
    const int v = rounded(kv.second);
    if (v != 0)
      asg.ms[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
              kv.first.second}] = v;
  }
  for (const auto& kv : inst.mdVar) {
    const int v = rounded(kv.second);
    if (v != 0)
      asg.md[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
              kv.first.second}] = v;
  }
  for (const auto& kv : inst.iVar) {
    const int v = rounded(kv.second);
    if (v != 0) asg.inst[kv.first] = v;
  }
  for (const auto& kv : inst.usedVar) {
    const int v = rounded(kv.second);
    if (v != 0) asg.used[kv.first] = v;
  }
  for (const auto& kv : inst.eVar) {
    const int v = rounded(kv.second);
    if (v != 0) asg.e[kv.first] = v;
  }

  PlacementSolution sol = solutionFromAssignment(inst, asg);

  // The walks above are reconstructions; reject files whose active edges
  // carry anything beyond them (stray cycles, duplicated groups).
  std::map<int, std::set<std::pair<NodeId, NodeId>>> walkEdges;
  for (int c = 0; c < static_cast<int>(graph.edges.size()); ++c) {
    const VnfEdge& ge = graph.edges[static_cast<size_t>(c)];
    const auto& hops =
        sol.pathEdges.at({graph.nodes[static_cast<size_t>(ge.src)].id,
                          graph.nodes[static_cast<size_t>(ge.dst)].id});
    walkEdges[c] = {hops.begin(), hops.end()};
  }
  for (const auto& kv : asg.e) {
    if (kv.second == 0) continue;
    const auto& se = inst.net->edges()[static_cast<size_t>(kv.first.edge)];
    if (walkEdges[kv.first.commodity].count({se.src, se.dst}) == 0)
      throw SolutionImportError(
          "active path variables include edges outside any commodity walk "
          "(near " +
          se.src + " -> " + se.dst + ")");
  }

  return sol;
}

}  // namespace chainforge::milp
