#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainforge/errors.hpp"
#include "chainforge/lp_io.hpp"
#include "chainforge/rational.hpp"
#include "chainforge/solve.hpp"

namespace chainforge::milp {

namespace {

constexpr uint64_t kTimeCheckMask = 1023;
constexpr uint64_t kProgressMask = (1 << 16) - 1;

struct BinRow {
  std::vector<std::pair<int, Rational>> terms;  // (local binary idx, coef)
  bool hasLo = false;
  bool hasHi = false;
  Rational lo;
  Rational hi;
};

struct ContDef {
  Rational constant;
  std::vector<std::pair<int, Rational>> terms;
};

}  // namespace

SolveResult solve(const PlacementInstance& inst, const SolveConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SolveResult res;
  res.objective = config.objective;
  res.label = "mono";

  // Local dense indexing of the binaries; continuous variables are
  // eliminated through their defining equalities.
  std::vector<int> binOf(inst.vars.size(), -1);
  std::vector<VarRef> binVars;
  for (size_t ref = 0; ref < inst.vars.size(); ++ref) {
    if (inst.vars[ref].kind == VarKind::Binary) {
      binOf[ref] = static_cast<int>(binVars.size());
      binVars.push_back(static_cast<VarRef>(ref));
    }
  }
  const int nb = static_cast<int>(binVars.size());

  std::vector<std::optional<ContDef>> contDef(inst.vars.size());
  std::vector<char> consumed(inst.rows.size(), 0);
  for (size_t ri = 0; ri < inst.rows.size(); ++ri) {
    const LinRow& row = inst.rows[ri];
    if (row.rel != Rel::Eq) continue;
    int contVar = -1;
    int contCount = 0;
    Rational contCoef;
    for (const LinTerm& t : row.terms) {
      if (inst.vars[static_cast<size_t>(t.var)].kind == VarKind::Continuous) {
        ++contCount;
        contVar = t.var;
        contCoef = t.coef;
      }
    }
    if (contCount != 1 || contDef[static_cast<size_t>(contVar)]) continue;
    ContDef def;
    def.constant = row.rhs / contCoef;
    for (const LinTerm& t : row.terms) {
      if (t.var == contVar) continue;
      if (inst.vars[static_cast<size_t>(t.var)].kind != VarKind::Binary)
        throw Error("row '" + row.name + "' mixes continuous variables");
      def.terms.push_back({binOf[static_cast<size_t>(t.var)],
                           -(t.coef / contCoef)});
    }
    contDef[static_cast<size_t>(contVar)] = std::move(def);
    consumed[ri] = 1;
  }

  // Substitutes continuous variables away; returns merged binary terms and
  // the constant they contribute.
  auto substitute = [&](const std::vector<LinTerm>& terms,
                        const Rational& constant) {
    std::map<int, Rational> acc;
    Rational c = constant;
    for (const LinTerm& t : terms) {
      if (inst.vars[static_cast<size_t>(t.var)].kind == VarKind::Binary) {
        acc[binOf[static_cast<size_t>(t.var)]] += t.coef;
        continue;
      }
      const auto& def = contDef[static_cast<size_t>(t.var)];
      if (!def)
        throw Error("continuous variable '" +
                    inst.vars[static_cast<size_t>(t.var)].name +
                    "' has no defining equality");
      c += t.coef * def->constant;
      for (const auto& bt : def->terms) acc[bt.first] += t.coef * bt.second;
    }
    std::vector<std::pair<int, Rational>> out;
    for (auto& kv : acc)
      if (sgn(kv.second) != 0) out.push_back({kv.first, std::move(kv.second)});
    return std::make_pair(std::move(out), std::move(c));
  };

  std::vector<BinRow> rows;
  bool rootInfeasible = false;
  auto pushRow = [&](std::vector<std::pair<int, Rational>> terms, Rel rel,
                     const Rational& rhs) {
    if (terms.empty()) {
      const bool ok = rel == Rel::Le   ? sgn(rhs) >= 0
                      : rel == Rel::Ge ? sgn(rhs) <= 0
                                       : sgn(rhs) == 0;
      if (!ok) rootInfeasible = true;
      return;
    }
    BinRow r;
    r.terms = std::move(terms);
    if (rel == Rel::Le || rel == Rel::Eq) {
      r.hasHi = true;
      r.hi = rhs;
    }
    if (rel == Rel::Ge || rel == Rel::Eq) {
      r.hasLo = true;
      r.lo = rhs;
    }
    rows.push_back(std::move(r));
  };

  for (size_t ri = 0; ri < inst.rows.size(); ++ri) {
    if (consumed[ri]) continue;
    const LinRow& row = inst.rows[ri];
    auto [terms, c] = substitute(row.terms, Rational(0));
    pushRow(std::move(terms), row.rel, row.rhs - c);
  }
  for (size_t ref = 0; ref < inst.vars.size(); ++ref) {
    const Var& v = inst.vars[ref];
    if (v.kind != VarKind::Continuous || !contDef[ref]) continue;
    if (v.lo) {
      auto terms = contDef[ref]->terms;
      pushRow(std::move(terms), Rel::Ge, *v.lo - contDef[ref]->constant);
    }
    if (v.hi) {
      auto terms = contDef[ref]->terms;
      pushRow(std::move(terms), Rel::Le, *v.hi - contDef[ref]->constant);
    }
  }
  for (const MetricBound& mb : config.extraBounds) {
    const LinExpr& expr = inst.objective(mb.metric);
    auto [terms, c] = substitute(expr.terms, expr.constant);
    pushRow(std::move(terms), mb.rel, mb.value - c);
  }

  // Objective as a minimization over the binaries.
  const bool maximize = metricIsMaximize(config.objective);
  std::vector<Rational> objCoef(static_cast<size_t>(nb), Rational(0));
  Rational objConst(0);
  {
    const LinExpr& expr = inst.objective(config.objective);
    auto [terms, c] = substitute(expr.terms, expr.constant);
    objConst = maximize ? Rational(-c) : c;
    for (auto& kv : terms)
      objCoef[static_cast<size_t>(kv.first)] =
          maximize ? Rational(-kv.second) : kv.second;
  }

  std::vector<std::vector<std::pair<int, Rational>>> varRows(
      static_cast<size_t>(nb));
  std::vector<Rational> minAct(rows.size(), Rational(0));
  std::vector<Rational> maxAct(rows.size(), Rational(0));
  for (size_t ri = 0; ri < rows.size(); ++ri) {
    for (const auto& term : rows[ri].terms) {
      varRows[static_cast<size_t>(term.first)].push_back(
          {static_cast<int>(ri), term.second});
      if (sgn(term.second) < 0)
        minAct[ri] += term.second;
      else
        maxAct[ri] += term.second;
    }
  }
  Rational objMin(objConst);
  for (int b = 0; b < nb; ++b)
    if (sgn(objCoef[static_cast<size_t>(b)]) < 0)
      objMin += objCoef[static_cast<size_t>(b)];

  // Branch order: mapping variables first since they decide the candidate
  // groups, then the path variables that carry the flow and latency
  // objectives. Role, instance and used markers go last; they are either
  // forced by propagation or objective-neutral, so the incumbent test
  // collapses their subtrees right after the first leaf.
  std::vector<int> order;
  order.reserve(static_cast<size_t>(nb));
  {
    std::vector<char> queued(static_cast<size_t>(nb), 0);
    auto enqueue = [&](VarRef ref) {
      const int b = binOf[static_cast<size_t>(ref)];
      if (b >= 0 && !queued[static_cast<size_t>(b)]) {
        queued[static_cast<size_t>(b)] = 1;
        order.push_back(b);
      }
    };
    for (const auto& kv : inst.mVar) enqueue(kv.second);
    for (const auto& kv : inst.eVar) enqueue(kv.second);
    for (const auto& kv : inst.iVar) enqueue(kv.second);
    for (const auto& kv : inst.usedVar) enqueue(kv.second);
    for (const auto& kv : inst.msVar) enqueue(kv.second);
    for (const auto& kv : inst.mdVar) enqueue(kv.second);
    for (int b = 0; b < nb; ++b)
      if (!queued[static_cast<size_t>(b)]) order.push_back(b);
  }

  std::vector<int8_t> val(static_cast<size_t>(nb), -1);
  std::vector<int> trail;
  trail.reserve(static_cast<size_t>(nb));

  auto applyAssign = [&](int b, int8_t w) {
    val[static_cast<size_t>(b)] = w;
    trail.push_back(b);
    const Rational& oc = objCoef[static_cast<size_t>(b)];
    if (w == 1)
      objMin += sgn(oc) < 0 ? Rational(0) : oc;
    else if (sgn(oc) < 0)
      objMin -= oc;
    for (const auto& rc : varRows[static_cast<size_t>(b)]) {
      const size_t ri = static_cast<size_t>(rc.first);
      const Rational& a = rc.second;
      if (w == 1) {
        if (sgn(a) < 0)
          maxAct[ri] += a;
        else
          minAct[ri] += a;
      } else {
        if (sgn(a) < 0)
          minAct[ri] -= a;
        else
          maxAct[ri] -= a;
      }
    }
  };
  auto undoAssign = [&](int b) {
    const int8_t w = val[static_cast<size_t>(b)];
    const Rational& oc = objCoef[static_cast<size_t>(b)];
    if (w == 1)
      objMin -= sgn(oc) < 0 ? Rational(0) : oc;
    else if (sgn(oc) < 0)
      objMin += oc;
    for (const auto& rc : varRows[static_cast<size_t>(b)]) {
      const size_t ri = static_cast<size_t>(rc.first);
      const Rational& a = rc.second;
      if (w == 1) {
        if (sgn(a) < 0)
          maxAct[ri] -= a;
        else
          minAct[ri] -= a;
      } else {
        if (sgn(a) < 0)
          minAct[ri] += a;
        else
          maxAct[ri] += a;
      }
    }
    val[static_cast<size_t>(b)] = -1;
  };

  // Fixpoint propagation over rows touched by new assignments. Returns
  // false on conflict.
  std::vector<int> dirty;
  auto propagate = [&](size_t trailFrom) -> bool {
    size_t cursor = trailFrom;
    while (true) {
      dirty.clear();
      if (cursor == trail.size()) break;
      for (; cursor < trail.size(); ++cursor)
        for (const auto& rc : varRows[static_cast<size_t>(trail[cursor])])
          dirty.push_back(rc.first);
      std::sort(dirty.begin(), dirty.end());
      dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
      for (int riInt : dirty) {
        const size_t ri = static_cast<size_t>(riInt);
        const BinRow& row = rows[ri];
        if (row.hasHi && minAct[ri] > row.hi) return false;
        if (row.hasLo && maxAct[ri] < row.lo) return false;
        for (const auto& term : row.terms) {
          const int b = term.first;
          if (val[static_cast<size_t>(b)] != -1) continue;
          const Rational& a = term.second;
          bool can0 = true;
          bool can1 = true;
          if (row.hasHi) {
            if (sgn(a) > 0 && minAct[ri] + a > row.hi) can1 = false;
            if (sgn(a) < 0 && minAct[ri] - a > row.hi) can0 = false;
          }
          if (row.hasLo) {
            if (sgn(a) < 0 && maxAct[ri] + a < row.lo) can1 = false;
            if (sgn(a) > 0 && maxAct[ri] - a < row.lo) can0 = false;
          }
          if (!can0 && !can1) return false;
          if (can0 != can1) applyAssign(b, can1 ? 1 : 0);
        }
      }
    }
    return true;
  };

  std::optional<Rational> incumbentCost;
  std::vector<int8_t> best;
  uint64_t explored = 0;
  bool outOfTime = false;

  auto report = [&] {
    if (config.progress == nullptr) return;
    const auto show = [&](const Rational& cost) {
      return formatRational(maximize ? Rational(-cost) : cost);
    };
    *config.progress << "explored=" << explored << " incumbent="
                     << (incumbentCost ? show(*incumbentCost)
                                       : std::string("none"))
                     << " bound=" << show(objMin) << "\n";
  };

  struct Frame {
    int pos;  // position in the branch order
    size_t mark;
    int next;  // branch value to try when revisited; -1 when exhausted
  };
  std::vector<Frame> stack;

  if (!rootInfeasible && propagate(0)) {
    int cursor = 0;
    bool descend = true;
    while (true) {
      if (outOfTime) break;
      if (descend) {
        while (cursor < nb &&
               val[static_cast<size_t>(order[static_cast<size_t>(cursor)])] !=
                   -1)
          ++cursor;
        if (cursor == nb) {
          if (!incumbentCost || objMin < *incumbentCost) {
            incumbentCost = objMin;
            best = val;
          }
          descend = false;
          continue;
        }
        const int pick = order[static_cast<size_t>(cursor)];
        stack.push_back({cursor, trail.size(), 1});
        ++explored;
        if ((explored & kTimeCheckMask) == 0 &&
            elapsed() > config.timeLimitSec)
          outOfTime = true;
        if ((explored & kProgressMask) == 0) report();
        applyAssign(pick, 0);
        const bool ok = propagate(stack.back().mark) &&
                        (!incumbentCost || objMin < *incumbentCost);
        if (!ok) descend = false;
        continue;
      }
      // Backtrack: revisit the deepest frame with an untried branch.
      if (stack.empty()) break;
      Frame& f = stack.back();
      while (trail.size() > f.mark) {
        undoAssign(trail.back());
        trail.pop_back();
      }
      cursor = f.pos;
      if (f.next == 1) {
        f.next = -1;
        ++explored;
        if ((explored & kTimeCheckMask) == 0 &&
            elapsed() > config.timeLimitSec)
          outOfTime = true;
        if ((explored & kProgressMask) == 0) report();
        applyAssign(order[static_cast<size_t>(f.pos)], 1);
        if (propagate(f.mark) && (!incumbentCost || objMin < *incumbentCost))
          descend = true;
      } else {
        stack.pop_back();
      }
    }
  }

  res.stats.nodesExplored = explored;
  res.stats.wallTimeSec = elapsed();

  if (incumbentCost) {
    Assignment asg;
    const VnfGraph& graph = *inst.graph;
    for (const auto& kv : inst.mVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.m[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
               kv.first.second}] = 1;
    }
    for (const auto& kv : inst.msVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.ms[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
                kv.first.second}] = 1;
    }
    for (const auto& kv : inst.mdVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.md[{graph.nodes[static_cast<size_t>(kv.first.first)].id,
                kv.first.second}] = 1;
    }
    for (const auto& kv : inst.iVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.inst[kv.first] = 1;
    }
    for (const auto& kv : inst.usedVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.used[kv.first] = 1;
    }
    for (const auto& kv : inst.eVar) {
      if (best[static_cast<size_t>(binOf[static_cast<size_t>(kv.second)])])
        asg.e[kv.first] = 1;
    }
    res.solution = solutionFromAssignment(inst, asg);
    res.status = outOfTime ? SolveStatus::TimeLimit : SolveStatus::Optimal;
    if (!outOfTime)
      res.bound = maximize ? Rational(-*incumbentCost) : *incumbentCost;
  } else {
    res.status = outOfTime ? SolveStatus::TimeLimit : SolveStatus::Infeasible;
  }
  if (config.progress != nullptr) report();
  return res;
}

}  // namespace chainforge::milp
