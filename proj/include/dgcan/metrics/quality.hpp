#pragma once

#include <optional>
#include <vector>

#include "dgcan/core/grasp.hpp"
#include "dgcan/scene/scene.hpp"

namespace dgcan::metrics {

struct Contact {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // outward unit normal
};

// Parallel-jaw collision volume. Approach axis = grasp frame +z, closing
// axis = +x; fingertips lie in the z=0 plane of the grasp frame.
struct GripperModel {
  double max_opening = 0.10;
  double finger_length = 0.06;
  double finger_thickness = 0.01;
  double finger_width = 0.02;
  double palm_clearance = 0.005;  // gap between palm plate and finger base
};

// Two-finger antipodal force closure: the contact line must lie inside both
// friction cones, i.e. for each contact the angle between -line_toward_other
// and the outward normal is at most arctan(mu).
bool force_closure(const Contact& c1, const Contact& c2, double mu);

// Smallest grid value at which force closure holds; nullopt if none does.
// The grid must be ascending.
std::optional<double> min_friction(const Contact& c1, const Contact& c2,
                                   const std::vector<double>& grid);

// Exact friction coefficient required for closure: max over both contacts of
// tan(angle between contact line and normal); infinity if a cone is violated
// beyond 90 degrees.
double required_friction(const Contact& c1, const Contact& c2);

// Casts the closing line of a snapped top-down grasp (world frame) through
// the scene. Contacts are the first surface hits approaching from each
// fingertip inward; nullopt if a finger line misses or the hits land on
// different objects. Also reports the contacted object id.
struct ContactPair {
  Contact first, second;
  int object_id = -1;
};
std::optional<ContactPair> compute_contacts(const core::Grasp3D& grasp_world,
                                            const scene::Scene& scene);

// True if any gripper body (fingers, palm; swept upward along the approach)
// intersects an object or the ground plane. The finger inner faces are
// retracted by contact_exclusion so intended contact patches do not count.
bool collision_check(const core::Grasp3D& grasp_world, const scene::Scene& scene,
                     const GripperModel& gripper, double sweep_length = 0.05,
                     double contact_exclusion = 0.003);

// Gripper body boxes in world frame (exposed for tests and plotting).
std::vector<scene::ObbVolume> gripper_volumes(const core::Grasp3D& grasp_world,
                                              const GripperModel& gripper,
                                              double sweep_length,
                                              double contact_exclusion);

// Camera-frame grasp -> world frame using the scene camera pose.
core::Grasp3D grasp_camera_to_world(const core::Grasp3D& g_cam,
                                    const Eigen::Isometry3d& camera_pose);

}  // namespace dgcan::metrics
