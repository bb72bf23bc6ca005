#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chainforge/chain_lang.hpp"
#include "chainforge/check.hpp"
#include "chainforge/errors.hpp"
#include "chainforge/graph_build.hpp"
#include "chainforge/lp_io.hpp"
#include "chainforge/manifest.hpp"
#include "chainforge/milp.hpp"
#include "chainforge/model_io.hpp"
#include "chainforge/pareto.hpp"
#include "chainforge/solution_io.hpp"
#include "chainforge/solve.hpp"

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace chainforge;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSyntax = 2;
constexpr int kExitSemantic = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitTimeLimit = 5;

bool logEnabled() {
  const char* env = std::getenv("CHAINFORGE_LOG");
  return env != nullptr && *env != '\0' && std::string(env) != "0";
}

void logLine(const std::string& msg) {
  if (logEnabled()) std::cerr << "[chainforge] " << msg << "\n";
}

struct InputPaths {
  std::string network;
  std::string catalog;
  std::string requests;
};

struct LoadedInputs {
  SubstrateNetwork net;
  FunctionCatalog catalog;
  std::vector<DeploymentRequest> requests;
};

LoadedInputs loadAll(const InputPaths& paths) {
  SubstrateNetwork net = loadNetwork(paths.network);
  logLine("loaded network " + paths.network + " (" +
          std::to_string(net.nodes().size()) + " nodes, " +
          std::to_string(net.edges().size()) + " edges)");
  FunctionCatalog catalog = loadCatalog(paths.catalog);
  logLine("loaded catalog " + paths.catalog + " (" +
          std::to_string(catalog.functions().size()) + " functions)");
  std::vector<DeploymentRequest> requests =
      loadRequests(paths.requests, catalog, net);
  logLine("loaded " + std::to_string(requests.size()) + " requests from " +
          paths.requests);
  return LoadedInputs{std::move(net), std::move(catalog), std::move(requests)};
}

std::vector<ManifestInput> hashInputs(const InputPaths& paths) {
  return {{"network", paths.network, sha256File(paths.network)},
          {"catalog", paths.catalog, sha256File(paths.catalog)},
          {"requests", paths.requests, sha256File(paths.requests)}};
}

void ensureOutDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

std::string joinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Applies recorded settings from --from-manifest for any flag the user did
// not pass explicitly on this invocation.
void applyManifestDefaults(const RunManifest& m, const CLI::App* cmd,
                           InputPaths* paths, std::string* mode,
                           std::string* objective, std::string* backend,
                           double* timeLimit, int* threads, uint64_t* seed,
                           int* remdrSteps, int* usedSteps) {
  auto fromRole = [&](const std::string& role) -> std::string {
    for (const ManifestInput& in : m.inputs)
      if (in.role == role) return in.path;
    throw SchemaError("manifest lists no input with role '" + role + "'");
  };
  if (cmd->count("--network") == 0) paths->network = fromRole("network");
  if (cmd->count("--catalog") == 0) paths->catalog = fromRole("catalog");
  if (cmd->count("--requests") == 0) paths->requests = fromRole("requests");
  if (mode != nullptr && cmd->count("--mode") == 0 && !m.mode.empty())
    *mode = m.mode;
  if (objective != nullptr && cmd->count("--objective") == 0 &&
      !m.objective.empty())
    *objective = m.objective;
  if (backend != nullptr && cmd->count("--backend") == 0 && !m.backend.empty())
    *backend = m.backend;
  if (timeLimit != nullptr && cmd->count("--time-limit") == 0 &&
      m.timeLimitSec > 0)
    *timeLimit = m.timeLimitSec;
  if (threads != nullptr && cmd->count("--threads") == 0) *threads = m.threads;
  if (seed != nullptr && cmd->count("--seed") == 0) *seed = m.seed;
  if (remdrSteps != nullptr && cmd->count("--remdr-steps") == 0 &&
      m.remdrSteps > 0)
    *remdrSteps = m.remdrSteps;
  if (usedSteps != nullptr && cmd->count("--used-steps") == 0 &&
      m.usedNodesSteps > 0)
    *usedSteps = m.usedNodesSteps;
}

// ---- parse ----------------------------------------------------------------

void dumpModules(const chain::ModuleSeq& seq, int depth, std::ostream& out);

void dumpModule(const chain::Module& m, int depth, std::ostream& out) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  if (const auto* t = std::get_if<chain::Term>(&m.node)) {
    out << pad << "term " << t->symbol << "\n";
  } else if (const auto* o = std::get_if<chain::OptOrder>(&m.node)) {
    out << pad << "any-order\n";
    for (const chain::Term& t2 : o->terms)
      out << pad << "  term " << t2.symbol << "\n";
  } else if (const auto* s = std::get_if<chain::Split>(&m.node)) {
    out << pad << "split " << s->splitter.symbol << "\n";
    for (size_t b = 0; b < s->branches.size(); ++b) {
      out << pad << "  branch " << (b + 1) << "\n";
      dumpModules(s->branches[b], depth + 2, out);
    }
  } else if (const auto* p = std::get_if<chain::Parallel>(&m.node)) {
    out << pad << "parallel " << p->splitter.symbol << " x" << p->count
        << "\n";
    out << pad << "  preamble";
    for (const chain::Term& t2 : p->preamble) out << " " << t2.symbol;
    out << "\n" << pad << "  body\n";
    dumpModules(p->body, depth + 2, out);
  }
}

void dumpModules(const chain::ModuleSeq& seq, int depth, std::ostream& out) {
  for (const chain::Module& m : seq) dumpModule(m, depth, out);
}

int cmdParse(const InputPaths& paths, const std::string& outDir) {
  const LoadedInputs in = loadAll(paths);
  std::ostringstream dump;
  for (const DeploymentRequest& req : in.requests) {
    const chain::ChainAst ast = chain::parseChain(req.chain, req);
    dump << "request " << req.id << ": ok\n";
    dumpModules(ast.root, 1, dump);
    dump << "  canonical: " << chain::unparse(ast) << "\n";
  }
  std::cout << dump.str();
  if (!outDir.empty()) {
    ensureOutDir(outDir);
    writeFile(joinPath(outDir, "ast.txt"), dump.str());
    RunManifest m;
    m.command = "parse";
    m.inputs = hashInputs(paths);
    m.outputs = {joinPath(outDir, "ast.txt")};
    saveManifest(m, joinPath(outDir, "manifest.json"));
  }
  return kExitOk;
}

// ---- expand ---------------------------------------------------------------

ordered_json graphJson(const VnfGraph& g) {
  ordered_json j;
  j["request"] = g.sourceRequest;
  j["nodes"] = ordered_json::array();
  for (const VnfNode& n : g.nodes) {
    ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = n.isEndpoint ? "endpoint" : "use";
    if (n.isEndpoint) {
      jn["loc"] = n.loc;
    } else {
      jn["function"] = n.function;
      ordered_json ratios = ordered_json::array();
      for (const Rational& r : n.ratios) ratios.push_back(formatRational(r));
      jn["ratios"] = ratios;
    }
    j["nodes"].push_back(jn);
  }
  j["edges"] = ordered_json::array();
  for (const VnfEdge& e : g.edges)
    j["edges"].push_back({{"src", g.nodes[static_cast<size_t>(e.src)].id},
                          {"dst", g.nodes[static_cast<size_t>(e.dst)].id},
                          {"rate", formatRational(e.rate)}});
  return j;
}

int cmdExpand(const InputPaths& paths, const std::string& mode, bool emitDot,
              const std::string& outDir) {
  const LoadedInputs in = loadAll(paths);
  ensureOutDir(outDir);

  ordered_json summary;
  summary["mode"] = mode;
  summary["requests"] = ordered_json::array();
  std::vector<std::string> outputs;
  unsigned long long totalCombinations = 1;

  std::cout << "request        combinations  nodes  edges\n";
  for (const DeploymentRequest& req : in.requests) {
    const chain::ChainAst ast = chain::parseChain(req.chain, req);
    ordered_json entry;
    entry["id"] = req.id;
    if (mode == "all") {
      const ExpansionSet set = expandAll(ast, req);
      entry["combinations"] = set.combinationCount;
      totalCombinations *= set.combinationCount;
      entry["graphs"] = ordered_json::array();
      for (const VnfGraph& g : set.graphs)
        entry["graphs"].push_back({{"nodes", g.nodes.size()},
                                   {"edges", g.edges.size()}});
      std::cout << req.id << "  " << set.combinationCount << "\n";
      if (emitDot) {
        if (set.graphs.size() > 256) {
          std::cerr << "note: " << req.id << " has " << set.graphs.size()
                    << " graphs; skipping per-graph DOT output\n";
        } else {
          for (size_t k = 0; k < set.graphs.size(); ++k) {
            const std::string p =
                joinPath(outDir, req.id + "-" + std::to_string(k + 1) + ".dot");
            writeFile(p, toDot(set.graphs[k]));
            outputs.push_back(p);
          }
        }
      }
    } else {
      const VnfGraph g = expandHeuristic(ast, req);
      entry["combinations"] = 1;
      entry["nodes"] = g.nodes.size();
      entry["edges"] = g.edges.size();
      const std::string gp = joinPath(outDir, req.id + ".graph.json");
      writeFile(gp, graphJson(g).dump(2) + "\n");
      outputs.push_back(gp);
      if (emitDot) {
        const std::string p = joinPath(outDir, req.id + ".dot");
        writeFile(p, toDot(g));
        outputs.push_back(p);
      }
      std::cout << req.id << "  1  " << g.nodes.size() << "  "
                << g.edges.size() << "\n";
    }
    summary["requests"].push_back(entry);
  }
  if (mode == "all") {
    summary["total_combinations"] = totalCombinations;
    std::cout << "total combinations across requests: " << totalCombinations
              << "\n";
  }

  const std::string sp = joinPath(outDir, "expansion.json");
  writeFile(sp, summary.dump(2) + "\n");
  outputs.push_back(sp);

  RunManifest m;
  m.command = "expand";
  m.inputs = hashInputs(paths);
  m.mode = mode;
  m.outputs = std::move(outputs);
  saveManifest(m, joinPath(outDir, "manifest.json"));
  return kExitOk;
}

// ---- place ----------------------------------------------------------------

VnfGraph buildCombinedGraph(const LoadedInputs& in) {
  std::vector<VnfGraph> graphs;
  for (const DeploymentRequest& req : in.requests) {
    const chain::ChainAst ast = chain::parseChain(req.chain, req);
    graphs.push_back(expandHeuristic(ast, req));
  }
  VnfGraph combined = combine(graphs);
  enumeratePaths(combined);
  logLine("combined graph: " + std::to_string(combined.nodes.size()) +
          " nodes, " + std::to_string(combined.edges.size()) + " edges");
  return combined;
}

void printObjectiveTriple(const milp::ObjectiveValues& v) {
  std::cout << "  remdr      " << formatRational(v.remdr) << "\n"
            << "  used_nodes " << v.usedNodes << "\n"
            << "  latency    " << formatRational(v.latency) << "\n";
}

int cmdPlace(const InputPaths& paths, const std::string& objectiveName,
             const std::string& backend, double timeLimit, int threads,
             uint64_t seed, const std::string& importPath,
             const std::string& outDir) {
  const LoadedInputs in = loadAll(paths);
  const VnfGraph graph = buildCombinedGraph(in);
  const milp::Metric objective = milp::metricFromName(objectiveName);
  ensureOutDir(outDir);

  RunManifest m;
  m.command = "place";
  m.inputs = hashInputs(paths);
  m.mode = "heuristic";
  m.objective = milp::metricName(objective);
  m.backend = backend;
  m.timeLimitSec = timeLimit;
  m.threads = threads;
  m.seed = seed;

  if (backend == "export") {
    const milp::PlacementInstance inst =
        milp::buildInstance(in.net, in.catalog, graph);
    const std::string lpPath = joinPath(outDir, "placement.lp");
    milp::exportLp(inst, objective, lpPath);
    m.outputs.push_back(lpPath);
    std::cout << "wrote " << lpPath << " (" << inst.vars.size()
              << " variables, " << inst.rows.size() << " rows)\n";

    int rc = kExitOk;
    if (!importPath.empty()) {
      const milp::PlacementSolution sol = milp::importSolution(inst, importPath);
      const milp::CheckReport report =
          milp::checkSolution(in.net, in.catalog, graph, sol);
      const std::string solPath = joinPath(outDir, "placement.json");
      const std::string checkPath = joinPath(outDir, "check.json");
      milp::saveSolution(sol, solPath);
      writeFile(checkPath, report.toJson());
      m.outputs.push_back(solPath);
      m.outputs.push_back(checkPath);
      std::cout << "imported solution: "
                << (report.clean() ? "clean" : "violations found") << "\n";
      printObjectiveTriple(report.recomputed);
      if (!report.clean()) rc = kExitError;
    }
    saveManifest(m, joinPath(outDir, "manifest.json"));
    return rc;
  }

  milp::SolveConfig config;
  config.objective = objective;
  config.timeLimitSec = timeLimit;
  config.threads = threads;
  config.seed = seed;
  if (logEnabled()) config.progress = &std::cerr;

  milp::SolveResult result;
  if (backend == "builtin") {
    result = milp::solveDecomposed(in.net, in.catalog, graph, config);
  } else if (backend == "mono") {
    const milp::PlacementInstance inst =
        milp::buildInstance(in.net, in.catalog, graph);
    result = milp::solve(inst, config);
  } else {
    throw ValidationError("unknown backend '" + backend + "'");
  }

  m.timingsSec["solve"] = result.stats.wallTimeSec;
  std::cout << "status     " << milp::solveStatusName(result.status) << "\n"
            << "objective  " << milp::metricName(result.objective) << "\n"
            << "explored   " << result.stats.nodesExplored << "\n"
            << "wall_time  " << result.stats.wallTimeSec << "s\n";

  int rc = kExitOk;
  if (result.solution) {
    const milp::CheckReport report =
        milp::checkSolution(in.net, in.catalog, graph, *result.solution);
    const std::string solPath = joinPath(outDir, "placement.json");
    const std::string checkPath = joinPath(outDir, "check.json");
    milp::saveSolution(*result.solution, solPath);
    writeFile(checkPath, report.toJson());
    m.outputs.push_back(solPath);
    m.outputs.push_back(checkPath);
    printObjectiveTriple(report.recomputed);
    std::cout << "check      "
              << (report.clean() ? "clean" : "VIOLATIONS FOUND") << "\n";
    if (!report.clean()) rc = kExitError;
  }
  if (result.status == milp::SolveStatus::Infeasible) rc = kExitInfeasible;
  if (result.status == milp::SolveStatus::TimeLimit) rc = kExitTimeLimit;

  saveManifest(m, joinPath(outDir, "manifest.json"));
  return rc;
}

// ---- pareto ---------------------------------------------------------------

int cmdPareto(const InputPaths& paths, int remdrSteps, int usedSteps,
              double timeLimit, int threads, uint64_t seed,
              const std::string& outDir) {
  const LoadedInputs in = loadAll(paths);
  const VnfGraph graph = buildCombinedGraph(in);
  ensureOutDir(outDir);

  milp::SolveConfig config;
  config.timeLimitSec = timeLimit;
  config.threads = threads;
  config.seed = seed;
  if (logEnabled()) config.progress = &std::cerr;

  const auto t0 = std::chrono::steady_clock::now();
  const milp::MetricRanges ranges =
      milp::estimateRanges(in.net, in.catalog, graph, config);
  logLine("ranges: remdr [" + formatRational(ranges.remdr.worst) + ", " +
          formatRational(ranges.remdr.best) + "], used_nodes [" +
          formatRational(ranges.usedNodes.best) + ", " +
          formatRational(ranges.usedNodes.worst) + "], latency [" +
          formatRational(ranges.latency.best) + ", " +
          formatRational(ranges.latency.worst) + "]");

  milp::SweepGrid grid;
  grid.remdrSteps = remdrSteps;
  grid.usedNodesSteps = usedSteps;
  const milp::ParetoFront front =
      milp::sweep(in.net, in.catalog, graph, ranges, grid, config);
  const double sweepSec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::vector<std::string> outputs;
  const std::string csvPath = joinPath(outDir, "front.csv");
  writeFile(csvPath, milp::frontCsv(front));
  outputs.push_back(csvPath);
  for (const milp::ParetoPoint& p : front.points) {
    const std::string sp = joinPath(outDir, "front_" + p.solutionId + ".json");
    milp::saveSolution(p.solution, sp);
    outputs.push_back(sp);
  }

  std::cout << "front points: " << front.points.size() << "\n";
  std::cout << "remdr  used_nodes  latency  id\n";
  for (const milp::ParetoPoint& p : front.points)
    std::cout << formatRational(p.remdr) << "  " << p.usedNodes << "  "
              << formatRational(p.latency) << "  " << p.solutionId << "\n";

  RunManifest m;
  m.command = "pareto";
  m.inputs = hashInputs(paths);
  m.mode = "heuristic";
  m.timeLimitSec = timeLimit;
  m.threads = threads;
  m.seed = seed;
  m.remdrSteps = remdrSteps;
  m.usedNodesSteps = usedSteps;
  m.outputs = std::move(outputs);
  m.timingsSec["sweep"] = sweepSec;
  saveManifest(m, joinPath(outDir, "manifest.json"));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chainforge: chaining-request parsing, expansion and placement"};
  app.require_subcommand(1);

  InputPaths paths;
  std::string outDir = "run";
  std::string mode = "heuristic";
  std::string objectiveName = "REMDR";
  std::string backend = "builtin";
  std::string importPath;
  std::string fromManifest;
  double timeLimit = 300.0;
  int threads = 1;
  uint64_t seed = 0;
  int remdrSteps = 8;
  int usedSteps = 0;
  bool emitDot = false;

  auto addCommon = [&](CLI::App* cmd) {
    cmd->add_option("--network", paths.network, "substrate network JSON");
    cmd->add_option("--catalog", paths.catalog, "function catalog JSON");
    cmd->add_option("--requests", paths.requests, "deployment requests JSON");
    cmd->add_option("--from-manifest", fromManifest,
                    "reuse inputs and settings from a previous run manifest");
    cmd->add_option("--out", outDir, "output directory");
  };

  CLI::App* parseCmd = app.add_subcommand("parse", "parse chains, dump ASTs");
  addCommon(parseCmd);

  CLI::App* expandCmd =
      app.add_subcommand("expand", "expand chains into annotated graphs");
  addCommon(expandCmd);
  expandCmd->add_option("--mode", mode, "all | heuristic")
      ->check(CLI::IsMember({"all", "heuristic"}));
  expandCmd->add_flag("--dot", emitDot, "emit Graphviz DOT files");

  CLI::App* placeCmd =
      app.add_subcommand("place", "optimize a placement for one objective");
  addCommon(placeCmd);
  placeCmd->add_option("--objective", objectiveName,
                       "REMDR | USED_NODES | LATENCY");
  placeCmd->add_option("--backend", backend, "builtin | mono | export")
      ->check(CLI::IsMember({"builtin", "mono", "export"}));
  placeCmd->add_option("--time-limit", timeLimit, "seconds per solve");
  placeCmd->add_option("--threads", threads, "worker threads");
  placeCmd->add_option("--seed", seed, "recorded in the manifest");
  placeCmd->add_option("--import", importPath,
                       "solution file from an external solver (with "
                       "--backend=export)");

  CLI::App* paretoCmd =
      app.add_subcommand("pareto", "sweep the three-objective trade-off");
  addCommon(paretoCmd);
  paretoCmd->add_option("--remdr-steps", remdrSteps,
                        "remdr thresholds in the sweep grid");
  paretoCmd->add_option("--used-steps", usedSteps,
                        "used-node caps in the sweep grid (0 = every integer)");
  paretoCmd->add_option("--time-limit", timeLimit, "seconds per solve");
  paretoCmd->add_option("--threads", threads, "worker threads");
  paretoCmd->add_option("--seed", seed, "recorded in the manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (!fromManifest.empty()) {
      const RunManifest m = loadManifest(fromManifest);
      applyManifestDefaults(m, cmd, &paths, &mode, &objectiveName, &backend,
                            &timeLimit, &threads, &seed, &remdrSteps,
                            &usedSteps);
    }
    if (paths.network.empty() || paths.catalog.empty() ||
        paths.requests.empty())
      throw ValidationError(
          "--network, --catalog and --requests are required (directly or via "
          "--from-manifest)");

    if (cmd == parseCmd)
      return cmdParse(paths, parseCmd->count("--out") != 0 ? outDir : "");
    if (cmd == expandCmd) return cmdExpand(paths, mode, emitDot, outDir);
    if (cmd == placeCmd)
      return cmdPlace(paths, objectiveName, backend, timeLimit, threads, seed,
                      importPath, outDir);
    if (cmd == paretoCmd)
      return cmdPareto(paths, remdrSteps, usedSteps, timeLimit, threads, seed,
                       outDir);
    return kExitError;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kExitSyntax;
  } catch (const SemanticError& e) {
    std::cerr << "semantic error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const TimeLimitError& e) {
    std::cerr << "time limit: " << e.what() << "\n";
    return kExitTimeLimit;
  } catch (const SolutionImportError& e) {
    std::cerr << "solution import error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const ExpansionError& e) {
    std::cerr << "expansion error: " << e.what() << "\n";
    return kExitSemantic;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitError;
  }
}
