#include "chainforge/solution_io.hpp"

#include <string>
#include <utility>

#include "json.hpp"

#include "chainforge/errors.hpp"
#include "chainforge/model_io.hpp"
#include "chainforge/rational.hpp"

namespace chainforge::milp {

namespace {

using Json = nlohmann::ordered_json;

Rational ratField(const Json& j, const std::string& what) {
  if (j.is_string()) return parseRational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_unsigned()) return Rational(static_cast<long>(j.get<unsigned long>()));
  if (j.is_number_float())
    throw SchemaError(what +
                      ": float literals are not accepted; quote the value as "
                      "a decimal string");
  throw SchemaError(what + ": expected an integer or a numeric string");
}

const Json& member(const Json& j, const std::string& key,
                   const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

std::string str(const Json& j, const std::string& what) {
  if (!j.is_string()) throw SchemaError(what + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

std::string solutionToJson(const PlacementSolution& sol) {
  Json doc;
  doc["mapping"] = Json::object();
  for (const auto& kv : sol.mapping) doc["mapping"][kv.first] = kv.second;

  doc["roles"] = Json::object();
  for (const auto& kv : sol.roles)
    doc["roles"][kv.first] = kv.second == Role::DataCenter ? "dc" : "switch";

  doc["instances"] = Json::array();
  for (const auto& kv : sol.instanceCount) {
    Json item;
    item["function"] = kv.first.first;
    item["node"] = kv.first.second;
    item["count"] = kv.second;
    doc["instances"].push_back(std::move(item));
  }

  doc["paths"] = Json::array();
  for (const auto& kv : sol.pathEdges) {
    Json item;
    item["src"] = kv.first.first;
    item["dst"] = kv.first.second;
    item["edges"] = Json::array();
    for (const auto& hop : kv.second)
      item["edges"].push_back(Json::array({hop.first, hop.second}));
    doc["paths"].push_back(std::move(item));
  }

  doc["used_nodes"] = Json::array();
  for (const NodeId& v : sol.usedNodes) doc["used_nodes"].push_back(v);

  doc["remaining_rate"] = Json::array();
  for (const auto& kv : sol.remainingRate) {
    Json item;
    item["src"] = kv.first.first;
    item["dst"] = kv.first.second;
    item["value"] = formatRational(kv.second);
    doc["remaining_rate"].push_back(std::move(item));
  }

  doc["path_latency"] = Json::array();
  for (const auto& kv : sol.pathLatency) {
    Json item;
    item["src"] = kv.first.first;
    item["dst"] = kv.first.second;
    item["value"] = formatRational(kv.second);
    doc["path_latency"].push_back(std::move(item));
  }

  doc["objectives"]["remdr"] = formatRational(sol.objectiveValues.remdr);
  doc["objectives"]["used_nodes"] = sol.objectiveValues.usedNodes;
  doc["objectives"]["latency"] = formatRational(sol.objectiveValues.latency);

  return doc.dump(2) + "\n";
}

PlacementSolution solutionFromJson(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("solution file is not valid JSON: ") +
                      e.what());
  }
  if (!doc.is_object()) throw SchemaError("solution: expected a JSON object");

  PlacementSolution sol;

  for (const auto& kv : member(doc, "mapping", "solution").items())
    sol.mapping[kv.key()] = str(kv.value(), "mapping." + kv.key());

  for (const auto& kv : member(doc, "roles", "solution").items()) {
    const std::string role = str(kv.value(), "roles." + kv.key());
    if (role == "dc")
      sol.roles[kv.key()] = Role::DataCenter;
    else if (role == "switch")
      sol.roles[kv.key()] = Role::Switch;
    else
      throw SchemaError("roles." + kv.key() +
                        ": expected \"dc\" or \"switch\", got \"" + role +
                        "\"");
  }

  for (const Json& item : member(doc, "instances", "solution")) {
    const std::string f = str(member(item, "function", "instances"), "function");
    const std::string v = str(member(item, "node", "instances"), "node");
    const Json& cnt = member(item, "count", "instances");
    if (!cnt.is_number_integer() && !cnt.is_number_unsigned())
      throw SchemaError("instances.count: expected an integer");
    sol.instanceCount[{f, v}] = cnt.get<long>();
  }

  for (const Json& item : member(doc, "paths", "solution")) {
    const std::string s = str(member(item, "src", "paths"), "paths.src");
    const std::string d = str(member(item, "dst", "paths"), "paths.dst");
    std::vector<std::pair<NodeId, NodeId>> hops;
    for (const Json& hop : member(item, "edges", "paths")) {
      if (!hop.is_array() || hop.size() != 2)
        throw SchemaError("paths.edges: expected [src, dst] pairs");
      hops.emplace_back(str(hop[0], "paths.edges"), str(hop[1], "paths.edges"));
    }
    sol.pathEdges[{s, d}] = std::move(hops);
  }

  for (const Json& item : member(doc, "used_nodes", "solution"))
    sol.usedNodes.insert(str(item, "used_nodes"));

  for (const Json& item : member(doc, "remaining_rate", "solution")) {
    const std::string s = str(member(item, "src", "remaining_rate"), "src");
    const std::string d = str(member(item, "dst", "remaining_rate"), "dst");
    sol.remainingRate[{s, d}] =
        ratField(member(item, "value", "remaining_rate"), "remaining_rate");
  }

  for (const Json& item : member(doc, "path_latency", "solution")) {
    const std::string s = str(member(item, "src", "path_latency"), "src");
    const std::string d = str(member(item, "dst", "path_latency"), "dst");
    sol.pathLatency[{s, d}] =
        ratField(member(item, "value", "path_latency"), "path_latency");
  }

  const Json& obj = member(doc, "objectives", "solution");
  sol.objectiveValues.remdr = ratField(member(obj, "remdr", "objectives"), "objectives.remdr");
  const Json& un = member(obj, "used_nodes", "objectives");
  if (!un.is_number_integer() && !un.is_number_unsigned())
    throw SchemaError("objectives.used_nodes: expected an integer");
  sol.objectiveValues.usedNodes = un.get<long>();
  sol.objectiveValues.latency =
      ratField(member(obj, "latency", "objectives"), "objectives.latency");

  return sol;
}

void saveSolution(const PlacementSolution& sol, const std::string& path) {
  writeFile(path, solutionToJson(sol));
}

PlacementSolution loadSolution(const std::string& path) {
  return solutionFromJson(readFile(path));
}

}  // namespace chainforge::milp
