#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dgcan/core/grasp.hpp"

namespace dgcan::core {

nlohmann::json grasp_to_json(const PlanarGrasp& g);
PlanarGrasp grasp_from_json(const nlohmann::json& j);

// JSON-lines, one grasp record per line:
// {"u":..,"v":..,"d":..,"w":..,"h":..,"theta":..,"score":..}
void write_grasp_labels(const std::string& path, const std::vector<PlanarGrasp>& grasps);
std::vector<PlanarGrasp> read_grasp_labels(const std::string& path);

}  // namespace dgcan::core
