#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <optional>

namespace dgcan::scene {

// Box: dims = full extents (x, y, z). Cylinder: dims = (radius, height, 0),
// axis along local +z, centered at the local origin.
struct PrimitiveObject {
  enum class Kind { kBox, kCylinder };
  Kind kind = Kind::kBox;
  Eigen::Vector3d dims = Eigen::Vector3d::Zero();
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();  // local -> world
  double friction = 1.0;
  Eigen::Vector3d albedo = Eigen::Vector3d(0.5, 0.5, 0.5);
};

struct RayHit {
  double t = 0.0;                                  // ray parameter
  Eigen::Vector3d point = Eigen::Vector3d::Zero(); // world
  Eigen::Vector3d normal = Eigen::Vector3d::Zero(); // outward, world
};

// First intersection of ray origin + t*dir (t in (t_min, t_max)) with the
// primitive surface. dir need not be normalized.
std::optional<RayHit> intersect_primitive(const PrimitiveObject& obj,
                                          const Eigen::Vector3d& origin,
                                          const Eigen::Vector3d& dir,
                                          double t_min = 1e-9,
                                          double t_max = 1e30);

bool point_inside(const PrimitiveObject& obj, const Eigen::Vector3d& p_world);

// Support point in the given world direction (for GJK).
Eigen::Vector3d support_point(const PrimitiveObject& obj, const Eigen::Vector3d& dir_world);

// Oriented box used for gripper bodies during collision checks.
struct ObbVolume {
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();  // box center frame
  Eigen::Vector3d half = Eigen::Vector3d::Zero();
};

Eigen::Vector3d support_point(const ObbVolume& box, const Eigen::Vector3d& dir_world);

// Lowest world-z over the box corners.
double min_z(const ObbVolume& box);

// Exact OBB-OBB overlap (separating axis test). Touching does not count.
bool obb_overlap(const ObbVolume& a, const ObbVolume& b);

// Convex-convex overlap via GJK on support functions. Touching within
// `margin` does not count as overlap.
bool obb_primitive_overlap(const ObbVolume& box, const PrimitiveObject& obj,
                           double margin = 1e-9);

// Pairwise object overlap (used by the scene generator and its tests).
bool primitives_overlap(const PrimitiveObject& a, const PrimitiveObject& b,
                        double margin = 1e-9);

// Conservative radius of the bounding sphere around the object's center.
double bounding_radius(const PrimitiveObject& obj);

}  // namespace dgcan::scene
