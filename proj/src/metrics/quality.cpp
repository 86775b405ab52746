#include "dgcan/metrics/quality.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dgcan::metrics {

bool force_closure(const Contact& c1, const Contact& c2, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("force_closure: mu must be positive");
  const double req = required_friction(c1, c2);
  return req <= mu + 1e-12;
}

double required_friction(const Contact& c1, const Contact& c2) {
  const Eigen::Vector3d line = c2.point - c1.point;
  if (line.norm() < 1e-12)
    throw std::invalid_argument("force_closure: invalid-contact (coincident points)");
  const Eigen::Vector3d u = line.normalized();
  double worst = 0.0;
  for (const auto& [contact, toward] :
       {std::pair<const Contact&, Eigen::Vector3d>{c1, u},
        std::pair<const Contact&, Eigen::Vector3d>{c2, -u}}) {
    // grasp force at the contact points toward the other finger: inside the
    // cone iff angle(-toward, normal) <= atan(mu)
    const double c = std::clamp((-toward).dot(contact.normal.normalized()), -1.0, 1.0);
    if (c <= 0.0) return std::numeric_limits<double>::infinity();
    const double tan_angle = std::sqrt(std::max(0.0, 1.0 - c * c)) / c;
    worst = std::max(worst, tan_angle);
  }
  return worst;
}

std::optional<double> min_friction(const Contact& c1, const Contact& c2,
                                   const std::vector<double>& grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("min_friction: grid must be ascending");
  for (double mu : grid)
    if (force_closure(c1, c2, mu)) return mu;
  return std::nullopt;
}

std::optional<ContactPair> compute_contacts(const core::Grasp3D& grasp_world,
                                            const scene::Scene& scene) {
  const Eigen::Vector3d closing = grasp_world.rotation.col(0);
  const Eigen::Vector3d center = grasp_world.translation;
  const double w = grasp_world.width;
  if (w <= 0.0) return std::nullopt;

  auto first_hit = [&](const Eigen::Vector3d& origin, const Eigen::Vector3d& dir)
      -> std::optional<std::pair<scene::RayHit, int>> {
    std::optional<std::pair<scene::RayHit, int>> best;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      auto h = scene::intersect_primitive(scene.objects[i], origin, dir, 1e-9, w);
      if (h && (!best || h->t < best->first.t))
        best = {*h, static_cast<int>(i)};
    }
    return best;
  };

  const auto hit1 = first_hit(center - 0.5 * w * closing, closing);
  const auto hit2 = first_hit(center + 0.5 * w * closing, -closing);
  if (!hit1 || !hit2) return std::nullopt;
  if (hit1->second != hit2->second) return std::nullopt;
  ContactPair pair;
  pair.first = {hit1->first.point, hit1->first.normal};
  pair.second = {hit2->first.point, hit2->first.normal};
  pair.object_id = hit1->second;
  return pair;
}

std::vector<scene::ObbVolume> gripper_volumes(const core::Grasp3D& grasp_world,
                                              const GripperModel& gripper,
                                              double sweep_length,
                                              double contact_exclusion) {
  const double o = grasp_world.width / 2.0;
  const double ft = gripper.finger_thickness;
  const double fl = gripper.finger_length;
  const double fw = gripper.finger_width;
  const double retract = std::min(contact_exclusion, ft * 0.9);

  auto box_from_extents = [&](double x0, double x1, double y0, double y1,
                              double z0, double z1) {
    scene::ObbVolume box;
    const Eigen::Vector3d center_local((x0 + x1) / 2, (y0 + y1) / 2, (z0 + z1) / 2);
    box.half = Eigen::Vector3d((x1 - x0) / 2, (y1 - y0) / 2, (z1 - z0) / 2);
    box.pose = Eigen::Isometry3d::Identity();
    box.pose.linear() = grasp_world.rotation;
    box.pose.translation() =
        grasp_world.translation + grasp_world.rotation * center_local;
    return box;
  };

  std::vector<scene::ObbVolume> out;
  // fingers: inner faces retracted by the contact-patch exclusion
  out.push_back(box_from_extents(o + retract, o + ft, -fw / 2, fw / 2,
                                 -fl - sweep_length, 0.0));
  out.push_back(box_from_extents(-o - ft, -o - retract, -fw / 2, fw / 2,
                                 -fl - sweep_length, 0.0));
  // palm plate behind the fingers
  out.push_back(box_from_extents(-o - ft, o + ft, -fw / 2, fw / 2,
                                 -fl - gripper.palm_clearance - 0.02 - sweep_length,
                                 -fl - gripper.palm_clearance));
  return out;
}

bool collision_check(const core::Grasp3D& grasp_world, const scene::Scene& scene,
                     const GripperModel& gripper, double sweep_length,
                     double contact_exclusion) {
  const auto bodies = gripper_volumes(grasp_world, gripper, sweep_length, contact_exclusion);
  // plane strike: full finger boxes, no exclusion
  const auto full = gripper_volumes(grasp_world, gripper, sweep_length, 0.0);
  for (const auto& b : full)
    if (scene::min_z(b) < 0.0) return true;
  for (const auto& b : bodies)
    for (const auto& obj : scene.objects)
      if (scene::obb_primitive_overlap(b, obj)) return true;
  return false;
}

core::Grasp3D grasp_camera_to_world(const core::Grasp3D& g_cam,
                                    const Eigen::Isometry3d& camera_pose) {
  core::Grasp3D out = g_cam;
  out.rotation = camera_pose.linear() * g_cam.rotation;
  out.translation = camera_pose * g_cam.translation;
  return out;
}

}  // namespace dgcan::metrics
