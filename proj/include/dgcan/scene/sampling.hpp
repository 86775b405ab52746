#pragma once

#include <cstdint>
#include <vector>

#include "dgcan/core/grasp.hpp"
#include "dgcan/scene/primitives.hpp"

namespace dgcan::scene {

struct GraspSampleConfig {
  double max_opening = 0.10;   // meters
  double clearance = 0.005;    // added to the contact distance
  double max_approach_off_vertical_deg = 30.0;  // sampling bias, not the label filter
};

// Parallel-jaw grasp candidates on a single primitive (world frame).
// Contact points come from casting the closing line through the object, so
// they lie exactly on the surface; width = contact distance + clearance.
// Approach directions point downward within the configured cone. Returns an
// empty list when no closing direction fits the jaw opening.
std::vector<core::Grasp3D> sample_antipodal_grasps_6dof(const PrimitiveObject& obj,
                                                        int n, std::uint64_t seed,
                                                        const GraspSampleConfig& cfg = {});

}  // namespace dgcan::scene
