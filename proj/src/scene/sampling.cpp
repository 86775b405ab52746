#include "dgcan/scene/sampling.hpp"

#include <cmath>

#include "dgcan/common/rng.hpp"

namespace dgcan::scene {

namespace {

// Random interior point in the object's local frame, kept off the surface.
Eigen::Vector3d interior_point(const PrimitiveObject& obj, Rng& rng) {
  if (obj.kind == PrimitiveObject::Kind::kBox) {
    const Eigen::Vector3d half = obj.dims * 0.4;
    return {rng.uniform(-half.x(), half.x()), rng.uniform(-half.y(), half.y()),
            rng.uniform(-half.z(), half.z())};
  }
  const double r = obj.dims.x() * 0.8 * std::sqrt(rng.uniform01());
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  const double hz = obj.dims.y() * 0.4;
  return {r * std::cos(phi), r * std::sin(phi), rng.uniform(-hz, hz)};
}

}  // namespace

std::vector<core::Grasp3D> sample_antipodal_grasps_6dof(const PrimitiveObject& obj,
                                                        int n, std::uint64_t seed,
                                                        const GraspSampleConfig& cfg) {
  Rng rng(seed ^ 0x67726173ULL);
  std::vector<core::Grasp3D> out;
  const double cast_len = cfg.max_opening * 1.6;
  const double cos_cone = std::cos(cfg.max_approach_off_vertical_deg * M_PI / 180.0);

  for (int attempt = 0; attempt < 8 * n && static_cast<int>(out.size()) < n; ++attempt) {
    Eigen::Vector3d center;
    Eigen::Vector3d closing;
    if (rng.bernoulli(0.5)) {
      // principal mode: pinch across natural opposing faces
      if (obj.kind == PrimitiveObject::Kind::kBox) {
        const int axis = rng.uniform_index(3);
        Eigen::Vector3d local = interior_point(obj, rng);
        local[axis] = 0.0;
        center = obj.pose * local;
        closing = obj.pose.linear().col(axis);
      } else if (rng.bernoulli(0.8)) {
        // diametral: center on the cylinder axis, radial closing
        const double z = rng.uniform(-0.4, 0.4) * obj.dims.y();
        center = obj.pose * Eigen::Vector3d(0.0, 0.0, z);
        const double a = rng.uniform(0.0, 2.0 * M_PI);
        closing = obj.pose.linear() * Eigen::Vector3d(std::cos(a), std::sin(a), 0.0);
      } else {
        // across the caps
        const Eigen::Vector3d local = interior_point(obj, rng);
        center = obj.pose * Eigen::Vector3d(local.x(), local.y(), 0.0);
        closing = obj.pose.linear().col(2);
      }
    } else {
      // free mode: horizontal-ish line through a random interior point
      center = obj.pose * interior_point(obj, rng);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double zc = rng.uniform(-0.2, 0.2);
      closing = Eigen::Vector3d(std::cos(phi), std::sin(phi), zc);
    }
    closing.normalize();

    // approach perpendicular to the closing axis, pointing down
    const Eigen::Vector3d ref =
        std::abs(closing.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
    const Eigen::Vector3d b1 = closing.cross(ref).normalized();
    const Eigen::Vector3d b2 = closing.cross(b1);
    const double psi = rng.uniform(0.0, 2.0 * M_PI);
    Eigen::Vector3d approach = std::cos(psi) * b1 + std::sin(psi) * b2;
    if (approach.z() > 0.0) approach = -approach;
    if (-approach.z() < cos_cone) continue;  // too far from top-down

    // cast the closing line inward from both sides
    const auto hit_pos =
        intersect_primitive(obj, center + cast_len * closing, -closing, 1e-9, 2 * cast_len);
    const auto hit_neg =
        intersect_primitive(obj, center - cast_len * closing, closing, 1e-9, 2 * cast_len);
    if (!hit_pos || !hit_neg) continue;

    const double span = (hit_pos->point - hit_neg->point).norm();
    const double width = span + cfg.clearance;
    if (width > cfg.max_opening || span < 1e-6) continue;

    core::Grasp3D g;
    g.translation = (hit_pos->point + hit_neg->point) / 2.0;
    g.width = width;
    g.rotation.col(0) = closing;
    g.rotation.col(2) = approach;
    g.rotation.col(1) = approach.cross(closing);
    g.score = 0.0;
    out.push_back(g);
  }
  return out;
}

}  // namespace dgcan::scene
