#include "dgcan/core/serialize.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace dgcan::core {

using nlohmann::json;

json grasp_to_json(const PlanarGrasp& g) {
  json j{{"u", g.u}, {"v", g.v}, {"d", g.d},
         {"w", g.w}, {"h", g.h}, {"theta", g.theta}};
  if (g.score) j["score"] = *g.score;
  return j;
}

PlanarGrasp grasp_from_json(const json& j) {
  PlanarGrasp g;
  g.u = j.at("u").get<double>();
  g.v = j.at("v").get<double>();
  g.d = j.at("d").get<double>();
  g.w = j.at("w").get<double>();
  g.h = j.at("h").get<double>();
  g.theta = j.at("theta").get<double>();
  if (j.contains("score")) g.score = j.at("score").get<double>();
  return g;
}

void write_grasp_labels(const std::string& path, const std::vector<PlanarGrasp>& grasps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write labels: " + path);
  for (const auto& g : grasps) out << grasp_to_json(g).dump() << '\n';
}

std::vector<PlanarGrasp> read_grasp_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read labels: " + path);
  std::vector<PlanarGrasp> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw std::runtime_error("malformed label line " + std::to_string(lineno) +
                               " in " + path);
    out.push_back(grasp_from_json(j));
  }
  return out;
}

}  // namespace dgcan::core
