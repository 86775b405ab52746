#include "dgcan/metrics/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dgcan::metrics {

using nlohmann::json;

double prediction_required_friction(const core::PlanarGrasp& pred,
                                    const scene::Scene& scene,
                                    const GripperModel& gripper) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (pred.d <= 0.0 || pred.w <= 0.0 || pred.h <= 0.0) return kInf;
  core::Grasp3D g_cam;
  try {
    g_cam = core::lift_planar_to_3d(pred, scene.intrinsics);
  } catch (const std::invalid_argument&) {
    return kInf;
  }
  if (g_cam.width > gripper.max_opening) return kInf;
  const core::Grasp3D g_world = grasp_camera_to_world(g_cam, scene.camera_pose);
  const auto contacts = compute_contacts(g_world, scene);
  if (!contacts) return kInf;
  if (collision_check(g_world, scene, gripper)) return kInf;
  return required_friction(contacts->first, contacts->second);
}

std::vector<double> precision_at_k(const std::vector<core::PlanarGrasp>& sorted_preds,
                                   const scene::Scene& scene, double mu,
                                   const GripperModel& gripper, int top_k) {
  for (std::size_t i = 1; i < sorted_preds.size(); ++i) {
    if (!sorted_preds[i].score || !sorted_preds[i - 1].score)
      throw std::invalid_argument("precision_at_k: missing score");
    if (*sorted_preds[i].score > *sorted_preds[i - 1].score)
      throw std::invalid_argument("precision_at_k: predictions not sorted by score");
  }
  std::vector<double> prec(top_k, 0.0);
  int tp = 0;
  for (int k = 1; k <= top_k; ++k) {
    if (k <= static_cast<int>(sorted_preds.size())) {
      const double req =
          prediction_required_friction(sorted_preds[k - 1], scene, gripper);
      if (req <= mu + 1e-12) ++tp;
    }
    prec[k - 1] = static_cast<double>(tp) / k;
  }
  return prec;
}

EvalReport evaluate_ap(const std::vector<std::vector<core::PlanarGrasp>>& predictions,
                       const std::vector<scene::Scene>& scenes,
                       const std::vector<std::string>& scene_ids,
                       const EvalConfig& cfg, const std::string& split_name) {
  if (scenes.empty()) throw std::invalid_argument("evaluate_ap: empty scene set");
  if (predictions.size() != scenes.size() || scene_ids.size() != scenes.size())
    throw std::invalid_argument("evaluate_ap: prediction/scene count mismatch");

  EvalReport report;
  report.split = split_name;
  report.per_scene.resize(scenes.size());

  for (std::size_t s = 0; s < scenes.size(); ++s) {
    auto preds = predictions[s];
    if (static_cast<int>(preds.size()) > cfg.top_k) preds.resize(cfg.top_k);
    // required friction is independent of mu; judge each prediction once
    std::vector<double> req(preds.size());
    for (std::size_t i = 0; i < preds.size(); ++i)
      req[i] = prediction_required_friction(preds[i], scenes[s], cfg.gripper);
    for (std::size_t i = 1; i < preds.size(); ++i) {
      if (!preds[i].score || !preds[i - 1].score)
        throw std::invalid_argument("evaluate_ap: missing score");
      if (*preds[i].score > *preds[i - 1].score)
        throw std::invalid_argument("evaluate_ap: predictions not sorted");
    }

    SceneEval& se = report.per_scene[s];
    se.scene_id = scene_ids[s];
    double ap_sum = 0.0;
    for (double mu : cfg.mu_list) {
      int tp = 0;
      double prec_sum = 0.0;
      for (int k = 1; k <= cfg.top_k; ++k) {
        if (k <= static_cast<int>(preds.size()) && req[k - 1] <= mu + 1e-12) ++tp;
        prec_sum += static_cast<double>(tp) / k;
      }
      const double ap_mu_scene = prec_sum / cfg.top_k;
      se.ap_mu[mu] = ap_mu_scene;
      ap_sum += ap_mu_scene;
    }
    se.ap = ap_sum / static_cast<double>(cfg.mu_list.size());
  }

  for (double mu : cfg.mu_list) {
    double total = 0.0;
    for (const auto& se : report.per_scene) total += se.ap_mu.at(mu);
    report.ap_mu[mu] = total / static_cast<double>(report.per_scene.size());
  }
  double ap = 0.0;
  for (const auto& [mu, v] : report.ap_mu) ap += v;
  report.ap = ap / static_cast<double>(report.ap_mu.size());
  return report;
}

std::string report_to_json(const EvalReport& report) {
  json j;
  j["split"] = report.split;
  j["AP"] = report.ap;
  json mu = json::object();
  for (const auto& [m, v] : report.ap_mu) {
    char key[16];
    std::snprintf(key, sizeof(key), "%.1f", m);
    mu[key] = v;
  }
  j["AP_mu"] = mu;
  json per = json::array();
  for (const auto& se : report.per_scene) {
    json js{{"id", se.scene_id}, {"AP", se.ap}};
    json jm = json::object();
    for (const auto& [m, v] : se.ap_mu) {
      char key[16];
      std::snprintf(key, sizeof(key), "%.1f", m);
      jm[key] = v;
    }
    js["AP_mu"] = jm;
    per.push_back(js);
  }
  j["per_scene"] = per;
  return j.dump(2);
}

EvalReport report_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  EvalReport report;
  report.split = j.at("split").get<std::string>();
  report.ap = j.at("AP").get<double>();
  for (const auto& [k, v] : j.at("AP_mu").items())
    report.ap_mu[std::stod(k)] = v.get<double>();
  for (const auto& js : j.at("per_scene")) {
    SceneEval se;
    se.scene_id = js.at("id").get<std::string>();
    se.ap = js.at("AP").get<double>();
    for (const auto& [k, v] : js.at("AP_mu").items())
      se.ap_mu[std::stod(k)] = v.get<double>();
    report.per_scene.push_back(se);
  }
  return report;
}

std::string report_to_text(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "split      AP       AP_0.8   AP_0.4\n";
  for (const auto& r : reports) {
    char line[128];
    const double ap08 = r.ap_mu.count(0.8) ? r.ap_mu.at(0.8) : 0.0;
    const double ap04 = r.ap_mu.count(0.4) ? r.ap_mu.at(0.4) : 0.0;
    std::snprintf(line, sizeof(line), "%-10s %-8.4f %-8.4f %-8.4f\n",
                  r.split.c_str(), r.ap, ap08, ap04);
    out << line;
  }
  return out.str();
}

}  // namespace dgcan::metrics
