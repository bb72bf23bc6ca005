#pragma once

#include <string>
#include <vector>

#include "chainforge/model.hpp"

namespace chainforge {

// JSON loaders. All numeric fields accept integers or decimal/fraction
// strings and are parsed exactly; JSON float literals are rejected so no
// value is silently rounded.
SubstrateNetwork loadNetwork(const std::string& path);
FunctionCatalog loadCatalog(const std::string& path);

// Loads, validates and cross-references every request in the file.
std::vector<DeploymentRequest> loadRequests(const std::string& path,
                                            const FunctionCatalog& catalog,
                                            const SubstrateNetwork& net);

void saveNetwork(const SubstrateNetwork& net, const std::string& path);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

}  // namespace chainforge
