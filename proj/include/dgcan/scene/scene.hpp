#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgcan/core/grasp.hpp"
#include "dgcan/scene/primitives.hpp"

namespace dgcan::scene {

// Ground plane z=0, primitive objects resting on it (or stacked), and a
// camera looking down within 15 degrees of world -z.
struct Scene {
  std::vector<PrimitiveObject> objects;
  Eigen::Isometry3d camera_pose = Eigen::Isometry3d::Identity();  // camera -> world
  core::CameraIntrinsics intrinsics;
  std::uint64_t seed = 0;

  // Camera view direction (camera +z) in world coordinates.
  Eigen::Vector3d view_axis_world() const { return camera_pose.linear().col(2); }
  Eigen::Vector3d camera_position() const { return camera_pose.translation(); }
};

// Object size profile; splits hold out kinds/orientations and size bands.
enum class ObjectProfile { kTrain, kSimilar, kNovel };

struct SceneGenConfig {
  int image_width = 320;
  int image_height = 240;
  double focal = 300.0;             // pixels
  double camera_height_min = 0.5;   // meters above the plane
  double camera_height_max = 0.8;
  double max_tilt_deg = 15.0;
  double workspace_radius = 0.16;   // object centers within this radius
  double min_gap = 0.008;           // clearance between placed objects
  ObjectProfile profile = ObjectProfile::kTrain;
};

// Deterministic procedural scene. Throws std::runtime_error if placement
// fails after bounded retries.
Scene generate_scene(std::uint64_t seed, int n_objects, const SceneGenConfig& cfg = {});

const char* profile_name(ObjectProfile p);
ObjectProfile profile_from_name(const std::string& name);

}  // namespace dgcan::scene
