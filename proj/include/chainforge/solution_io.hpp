#pragma once

#include <string>

#include "chainforge/check.hpp"

namespace chainforge::milp {

// Solution files are JSON; rationals are serialized exactly (decimal when
// finite, "p/q" otherwise) and parsed back without loss.
std::string solutionToJson(const PlacementSolution& sol);
PlacementSolution solutionFromJson(const std::string& text);

void saveSolution(const PlacementSolution& sol, const std::string& path);
PlacementSolution loadSolution(const std::string& path);

}  // namespace chainforge::milp
