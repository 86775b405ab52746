#pragma once

#include <vector>

#include "dgcan/core/grasp.hpp"
#include "dgcan/metrics/quality.hpp"
#include "dgcan/scene/sampling.hpp"
#include "dgcan/scene/scene.hpp"

namespace dgcan::scene {

struct GraspLabelSet {
  std::vector<core::PlanarGrasp> labels;
  std::vector<int> object_ids;  // per-label source object
};

struct LabelPipelineConfig {
  int samples_per_object = 260;
  double max_approach_deg = 15.0;  // candidates farther from the view axis drop
  std::vector<double> mu_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double rect_height_m = 0.02;     // rectangle height = finger width
  GraspSampleConfig sampling;
  metrics::GripperModel gripper;
  core::GraspNmsConfig nms;
};

// Candidate 6-DoF grasps per object -> keep approaches within the view cone,
// snap them onto the camera view axis, recompute contacts along the snapped
// closing line, drop collisions and force-closure failures, score survivors
// s = 1.1 - mu_min, project into the image and de-duplicate with grasp-NMS.
GraspLabelSet label_pipeline(const Scene& scene, const LabelPipelineConfig& cfg = {});

// Single-candidate stage used by the pipeline (exposed for tests): returns
// the snapped, re-scored world-frame grasp or nullopt when any filter drops
// the candidate.
struct SnappedLabel {
  core::Grasp3D grasp_world;
  double mu_min = 0.0;
  int object_id = -1;
};
std::optional<SnappedLabel> snap_and_score(const core::Grasp3D& candidate_world,
                                           const Scene& scene,
                                           const LabelPipelineConfig& cfg);

}  // namespace dgcan::scene
