#pragma once

#include <map>
#include <string>
#include <vector>

#include "dgcan/metrics/quality.hpp"

namespace dgcan::metrics {

struct EvalConfig {
  std::vector<double> mu_list = {0.2, 0.4, 0.6, 0.8, 1.0};
  int top_k = 10;
  core::GraspNmsConfig nms;
  GripperModel gripper;
};

struct SceneEval {
  std::string scene_id;
  double ap = 0.0;
  std::map<double, double> ap_mu;
};

struct EvalReport {
  std::string split;
  double ap = 0.0;
  std::map<double, double> ap_mu;
  std::vector<SceneEval> per_scene;
};

// Friction coefficient needed for this prediction to count as a true
// positive: contacts must exist, the grasp must be collision-free, and force
// closure must hold. Infinity when contacts/collision disqualify it.
double prediction_required_friction(const core::PlanarGrasp& pred,
                                    const scene::Scene& scene,
                                    const GripperModel& gripper);

// Precision@k for k = 1..top_k. Predictions must be sorted by score
// descending (already grasp-NMS deduplicated); entries beyond the prediction
// count keep the cumulative TP count with denominator k.
std::vector<double> precision_at_k(const std::vector<core::PlanarGrasp>& sorted_preds,
                                   const scene::Scene& scene, double mu,
                                   const GripperModel& gripper, int top_k);

// AP_mu = mean over scenes of mean over k of precision@k; AP = mean over the
// friction grid.
EvalReport evaluate_ap(const std::vector<std::vector<core::PlanarGrasp>>& predictions,
                       const std::vector<scene::Scene>& scenes,
                       const std::vector<std::string>& scene_ids,
                       const EvalConfig& cfg, const std::string& split_name);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& json_text);

// Table-style text grid with AP, AP_0.8 and AP_0.4 columns.
std::string report_to_text(const std::vector<EvalReport>& reports);

}  // namespace dgcan::metrics
