#include "chainforge/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "chainforge/errors.hpp"
#include "json.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

json parseJsonFile(const std::string& path) {
  std::string text = readFile(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError(path + ": not valid JSON");
  }
  return j;
}

// Numbers must arrive as integers or strings so nothing is rounded on the
// way in. Float literals are refused loudly.
Rational numberField(const json& j, const std::string& where) {
  if (j.is_number_integer()) {
    return Rational(static_cast<long>(j.get<int64_t>()));
  }
  if (j.is_string()) {
    try {
      return parseRational(j.get<std::string>());
    } catch (const ValidationError& e) {
      throw SchemaError(where + ": " + e.what());
    }
  }
  if (j.is_number_float()) {
    throw SchemaError(where +
                      ": float literals are not accepted; quote the value "
                      "as a decimal string");
  }
  throw SchemaError(where + ": expected an integer or a numeric string");
}

long integerField(const json& j, const std::string& where) {
  if (!j.is_number_integer()) {
    throw SchemaError(where + ": expected an integer");
  }
  return j.get<long>();
}

std::string stringField(const json& j, const std::string& where) {
  if (!j.is_string()) {
    throw SchemaError(where + ": expected a string");
  }
  return j.get<std::string>();
}

const json& require(const json& obj, const std::string& key,
                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return *it;
}

}  // namespace

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read " + path);
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path);
  }
  out << content;
  if (!out) {
    throw IoError("short write to " + path);
  }
}

SubstrateNetwork loadNetwork(const std::string& path) {
  json j = parseJsonFile(path);
  if (!j.is_object()) throw SchemaError(path + ": expected an object");

  std::vector<NodeSpec> nodes;
  for (const auto& n : require(j, "nodes", path)) {
    std::string where = path + ": node";
    NodeSpec spec;
    spec.id = stringField(require(n, "id", where), where + ".id");
    where = path + ": node '" + spec.id + "'";
    spec.dcCapacity = numberField(require(n, "c_d", where), where + ".c_d");
    spec.switchCapacity =
        numberField(require(n, "c_s", where), where + ".c_s");
    nodes.push_back(std::move(spec));
  }

  std::vector<SubstrateEdge> edges;
  for (const auto& e : require(j, "edges", path)) {
    std::string where = path + ": edge";
    SubstrateEdge edge;
    edge.src = stringField(require(e, "src", where), where + ".src");
    edge.dst = stringField(require(e, "dst", where), where + ".dst");
    where = path + ": edge " + edge.src + "->" + edge.dst;
    edge.dataRate = numberField(require(e, "d", where), where + ".d");
    edge.latency = numberField(require(e, "l", where), where + ".l");
    edges.push_back(std::move(edge));
  }

  return SubstrateNetwork::create(std::move(nodes), std::move(edges));
}

void saveNetwork(const SubstrateNetwork& net, const std::string& path) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : net.nodes()) {
    j["nodes"].push_back({{"id", n.id},
                          {"c_d", formatRational(n.dcCapacity)},
                          {"c_s", formatRational(n.switchCapacity)}});
  }
  j["edges"] = json::array();
  for (const auto& e : net.edges()) {
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"d", formatRational(e.dataRate)},
                          {"l", formatRational(e.latency)}});
  }
  writeFile(path, j.dump(2) + "\n");
}

FunctionCatalog loadCatalog(const std::string& path) {
  json j = parseJsonFile(path);
  if (!j.is_object()) throw SchemaError(path + ": expected an object");

  std::vector<FunctionSpec> functions;
  for (const auto& f : require(j, "functions", path)) {
    std::string where = path + ": function";
    FunctionSpec spec;
    spec.id = stringField(require(f, "id", where), where + ".id");
    where = path + ": function '" + spec.id + "'";
    spec.dcDemand = numberField(require(f, "p_d", where), where + ".p_d");
    spec.switchDemand = numberField(require(f, "p_s", where), where + ".p_s");
    spec.maxInstances =
        integerField(require(f, "n_inst", where), where + ".n_inst");
    spec.maxRequests =
        integerField(require(f, "n_req", where), where + ".n_req");
    functions.push_back(std::move(spec));
  }
  return FunctionCatalog::create(std::move(functions));
}

std::vector<DeploymentRequest> loadRequests(const std::string& path,
                                            const FunctionCatalog& catalog,
                                            const SubstrateNetwork& net) {
  json j = parseJsonFile(path);
  if (!j.is_array()) {
    throw SchemaError(path + ": expected an array of requests");
  }

  std::vector<DeploymentRequest> out;
  std::set<std::string> seen;
  for (const auto& r : j) {
    DeploymentRequest req;
    std::string where = path + ": request";
    req.id = stringField(require(r, "id", where), where + ".id");
    where = path + ": request '" + req.id + "'";
    if (!seen.insert(req.id).second) {
      throw SchemaError(where + ": duplicate request id");
    }

    for (const auto& u : require(r, "uses", where)) {
      UseDecl use;
      use.id = stringField(require(u, "id", where), where + ": use.id");
      std::string uw = where + ": use '" + use.id + "'";
      use.function =
          stringField(require(u, "function", uw), uw + ".function");
      const json& ratios = require(u, "ratios", uw);
      if (!ratios.is_array() || ratios.empty()) {
        throw SchemaError(uw + ".ratios: expected a nonempty array");
      }
      for (const auto& q : ratios) {
        use.ratios.push_back(numberField(q, uw + ".ratios"));
      }
      req.uses.push_back(std::move(use));
    }

    req.chain = stringField(require(r, "chain", where), where + ".chain");

    for (const auto& a : require(r, "endpoints", where)) {
      EndpointDecl ep;
      ep.id = stringField(require(a, "id", where), where + ": endpoint.id");
      ep.loc = stringField(require(a, "loc", where),
                           where + ": endpoint '" + ep.id + "'.loc");
      req.endpoints.push_back(std::move(ep));
    }

    for (const auto& p : require(r, "pairs", where)) {
      if (!p.is_array() || p.size() != 2) {
        throw SchemaError(where + ".pairs: expected [src, dst] pairs");
      }
      req.pairs.emplace_back(stringField(p[0], where + ".pairs"),
                             stringField(p[1], where + ".pairs"));
    }

    req.initialRate = numberField(require(r, "d_in", where), where + ".d_in");

    if (r.contains("l_req")) {
      for (const auto& lb : r["l_req"]) {
        LatencyBound bound;
        bound.src = stringField(require(lb, "src", where), where + ".l_req");
        bound.dst = stringField(require(lb, "dst", where), where + ".l_req");
        bound.bound =
            numberField(require(lb, "bound", where), where + ".l_req.bound");
        req.latencyBounds.push_back(std::move(bound));
      }
    }

    validateRequest(req, catalog, net);
    out.push_back(std::move(req));
  }
  if (out.empty()) {
    throw SchemaError(path + ": no requests in file");
  }
  return out;
}

}  // namespace chainforge
