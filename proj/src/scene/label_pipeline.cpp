#include "dgcan/scene/label_pipeline.hpp"

#include <cmath>

namespace dgcan::scene {

std::optional<SnappedLabel> snap_and_score(const core::Grasp3D& candidate_world,
                                           const Scene& scene,
                                           const LabelPipelineConfig& cfg) {
  const Eigen::Vector3d view = scene.view_axis_world();
  const Eigen::Vector3d approach = candidate_world.rotation.col(2);
  const double cos_max = std::cos(cfg.max_approach_deg * M_PI / 180.0);
  if (approach.dot(view) < cos_max) return std::nullopt;

  // snap the approach onto the view axis; closing re-orthogonalized
  Eigen::Vector3d closing = candidate_world.rotation.col(0);
  closing -= closing.dot(view) * view;
  if (closing.norm() < 1e-9) return std::nullopt;
  closing.normalize();

  core::Grasp3D snapped = candidate_world;
  snapped.rotation.col(0) = closing;
  snapped.rotation.col(2) = view;
  snapped.rotation.col(1) = view.cross(closing);
  // wide virtual opening so the cast finds the full chord; re-fit below
  snapped.width = 2.4 * cfg.sampling.max_opening;

  const auto contacts = metrics::compute_contacts(snapped, scene);
  if (!contacts) return std::nullopt;

  // re-center between the recomputed contacts and re-fit the opening
  const double span = (contacts->second.point - contacts->first.point).norm();
  const double width = span + cfg.sampling.clearance;
  if (span < 1e-6 || width > cfg.sampling.max_opening) return std::nullopt;
  snapped.translation = (contacts->first.point + contacts->second.point) / 2.0;
  snapped.width = width;

  if (metrics::collision_check(snapped, scene, cfg.gripper)) return std::nullopt;

  const double required = metrics::required_friction(contacts->first, contacts->second);
  double mu_min = 0.0;
  bool closed = false;
  for (double mu : cfg.mu_grid) {
    if (required <= mu + 1e-12) {
      mu_min = mu;
      closed = true;
      break;
    }
  }
  if (!closed) return std::nullopt;

  SnappedLabel out;
  out.grasp_world = snapped;
  out.grasp_world.score = std::clamp(1.1 - mu_min, 0.0, 1.0);
  out.mu_min = mu_min;
  out.object_id = contacts->object_id;
  return out;
}

GraspLabelSet label_pipeline(const Scene& scene, const LabelPipelineConfig& cfg) {
  std::vector<core::PlanarGrasp> labels;
  std::vector<int> ids;
  const Eigen::Isometry3d cam_from_world = scene.camera_pose.inverse();

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto candidates = sample_antipodal_grasps_6dof(
        scene.objects[i], cfg.samples_per_object, scene.seed + 0x9e3779b9ULL * i,
        cfg.sampling);
    for (const auto& cand : candidates) {
      const auto snapped = snap_and_score(cand, scene, cfg);
      if (!snapped) continue;

      core::Grasp3D g_cam;
      g_cam.rotation = cam_from_world.linear() * snapped->grasp_world.rotation;
      g_cam.translation = cam_from_world * snapped->grasp_world.translation;
      g_cam.width = snapped->grasp_world.width;
      g_cam.score = snapped->grasp_world.score;
      core::PlanarGrasp planar;
      try {
        planar = core::project_3d_to_planar(g_cam, scene.intrinsics, cfg.rect_height_m);
      } catch (const std::invalid_argument&) {
        continue;
      }
      if (planar.u < 0 || planar.u > scene.intrinsics.width - 1 || planar.v < 0 ||
          planar.v > scene.intrinsics.height - 1)
        continue;
      planar.score = snapped->grasp_world.score;
      labels.push_back(planar);
      ids.push_back(snapped->object_id);
    }
  }

  GraspLabelSet out;
  for (std::size_t idx : core::grasp_nms_indices(labels, cfg.nms)) {
    out.labels.push_back(labels[idx]);
    out.object_ids.push_back(ids[idx]);
  }
  return out;
}

}  // namespace dgcan::scene
