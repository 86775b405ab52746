#include "dgcan/core/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dgcan::core {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double canonicalize_angle(double theta) {
  double t = std::remainder(theta, M_PI);  // [-pi/2, pi/2]
  if (t <= -M_PI / 2.0) t = M_PI / 2.0;
  return t;
}

GpnTarget encode_gpn_offsets(const AnchorBox& box, const AnchorBox& anchor) {
  require(anchor.w > 0.0 && anchor.h > 0.0, "encode_gpn_offsets: invalid-geometry (anchor)");
  require(box.w > 0.0 && box.h > 0.0, "encode_gpn_offsets: invalid-geometry (box)");
  GpnTarget t;
  t.tu = (box.u - anchor.u) / anchor.w;
  t.tv = (box.v - anchor.v) / anchor.h;
  t.tw = std::log(box.w / anchor.w);
  t.th = std::log(box.h / anchor.h);
  return t;
}

AnchorBox decode_gpn_offsets(const GpnTarget& t, const AnchorBox& anchor) {
  require(anchor.w > 0.0 && anchor.h > 0.0, "decode_gpn_offsets: invalid-geometry (anchor)");
  require(std::isfinite(t.tu) && std::isfinite(t.tv) && std::isfinite(t.tw) &&
              std::isfinite(t.th),
          "decode_gpn_offsets: non-finite target");
  AnchorBox box;
  box.u = t.tu * anchor.w + anchor.u;
  box.v = t.tv * anchor.h + anchor.v;
  box.w = std::exp(std::clamp(t.tw, -10.0, 10.0)) * anchor.w;
  box.h = std::exp(std::clamp(t.th, -10.0, 10.0)) * anchor.h;
  return box;
}

void encode_angle(double theta, double& tsin, double& tcos) {
  tsin = std::sin(2.0 * theta);
  tcos = std::cos(2.0 * theta);
}

double decode_angle(double tsin, double tcos) {
  require(tsin != 0.0 || tcos != 0.0, "decode_angle: undefined-angle (zero vector)");
  return canonicalize_angle(0.5 * std::atan2(tsin, tcos));
}

double encode_depth(double d, double d_o) { return d - d_o; }

double decode_depth(double t_d, double d_o) { return d_o + t_d; }

Grasp3D lift_planar_to_3d(const PlanarGrasp& g, const CameraIntrinsics& cam) {
  require(g.d > 0.0, "lift_planar_to_3d: invalid-depth");
  require(cam.fx > 0.0 && cam.fy > 0.0, "lift_planar_to_3d: invalid intrinsics");
  Grasp3D out;
  out.translation = Eigen::Vector3d((g.u - cam.cx) * g.d / cam.fx,
                                    (g.v - cam.cy) * g.d / cam.fy, g.d);
  out.width = g.w * g.d / cam.fx;
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  out.rotation.col(0) = Eigen::Vector3d(c, s, 0.0);   // closing axis
  out.rotation.col(1) = Eigen::Vector3d(-s, c, 0.0);  // minor axis
  out.rotation.col(2) = Eigen::Vector3d(0.0, 0.0, 1.0);  // approach = camera +z
  out.score = g.score.value_or(0.0);
  return out;
}

PlanarGrasp project_3d_to_planar(const Grasp3D& G, const CameraIntrinsics& cam,
                                 double rect_height_m) {
  const Eigen::Vector3d approach = G.rotation.col(2);
  require((approach - Eigen::Vector3d::UnitZ()).norm() <= 1e-6,
          "project_3d_to_planar: not-planar (approach axis not camera +z)");
  require(G.translation.z() > 0.0, "project_3d_to_planar: invalid-depth");
  PlanarGrasp g;
  g.d = G.translation.z();
  g.u = cam.cx + cam.fx * G.translation.x() / g.d;
  g.v = cam.cy + cam.fy * G.translation.y() / g.d;
  g.w = G.width * cam.fx / g.d;
  g.h = rect_height_m * cam.fx / g.d;
  g.theta = canonicalize_angle(std::atan2(G.rotation(1, 0), G.rotation(0, 0)));
  g.score = G.score;
  return g;
}

std::array<Eigen::Vector2d, 4> rect_corners(const PlanarGrasp& g) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  const Eigen::Vector2d du(c * g.w / 2.0, s * g.w / 2.0);
  const Eigen::Vector2d dv(-s * g.h / 2.0, c * g.h / 2.0);
  const Eigen::Vector2d ctr(g.u, g.v);
  return {ctr - du - dv, ctr + du - dv, ctr + du + dv, ctr - du + dv};
}

namespace {

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(a) / 2.0;
}

// Clip subject polygon against the half-plane left of edge (a -> b).
std::vector<Eigen::Vector2d> clip_edge(const std::vector<Eigen::Vector2d>& subject,
                                       const Eigen::Vector2d& a,
                                       const Eigen::Vector2d& b) {
  std::vector<Eigen::Vector2d> out;
  const std::size_t n = subject.size();
  const Eigen::Vector2d e = b - a;
  auto side = [&](const Eigen::Vector2d& p) {
    return e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x());
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = subject[i];
    const Eigen::Vector2d& prev = subject[(i + n - 1) % n];
    const double sc = side(cur), sp = side(prev);
    if (sc >= 0.0) {
      if (sp < 0.0) {
        const double t = sp / (sp - sc);
        out.push_back(prev + t * (cur - prev));
      }
      out.push_back(cur);
    } else if (sp >= 0.0) {
      const double t = sp / (sp - sc);
      out.push_back(prev + t * (cur - prev));
    }
  }
  return out;
}

}  // namespace

double rotated_iou(const PlanarGrasp& a, const PlanarGrasp& b) {
  require(a.w > 0.0 && a.h > 0.0 && b.w > 0.0 && b.h > 0.0,
          "rotated_iou: invalid-geometry (degenerate rectangle)");
  const auto ca = rect_corners(a);
  const auto cb = rect_corners(b);
  std::vector<Eigen::Vector2d> poly(ca.begin(), ca.end());
  for (int i = 0; i < 4 && !poly.empty(); ++i)
    poly = clip_edge(poly, cb[i], cb[(i + 1) % 4]);
  const double inter = poly.size() >= 3 ? polygon_area(poly) : 0.0;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double aligned_iou(const AnchorBox& a, const AnchorBox& b) {
  const double ox = std::min(a.u + a.w / 2, b.u + b.w / 2) - std::max(a.u - a.w / 2, b.u - b.w / 2);
  const double oy = std::min(a.v + a.h / 2, b.v + b.h / 2) - std::max(a.v - a.h / 2, b.v - b.h / 2);
  if (ox <= 0.0 || oy <= 0.0) return 0.0;
  const double inter = ox * oy;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

AnchorBox aabb_of(const PlanarGrasp& g) {
  const double c = std::abs(std::cos(g.theta)), s = std::abs(std::sin(g.theta));
  AnchorBox box;
  box.u = g.u;
  box.v = g.v;
  box.w = c * g.w + s * g.h;
  box.h = s * g.w + c * g.h;
  return box;
}

namespace {

double angle_distance_mod_pi(double a, double b) {
  const double d = std::abs(std::remainder(a - b, M_PI));
  return d;  // in [0, pi/2]
}

}  // namespace

std::vector<std::size_t> grasp_nms_indices(const std::vector<PlanarGrasp>& grasps,
                                           const GraspNmsConfig& cfg) {
  for (const auto& g : grasps)
    require(g.score.has_value(), "grasp_nms: missing score");
  std::vector<std::size_t> order(grasps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t ia, std::size_t ib) {
    const PlanarGrasp& a = grasps[ia];
    const PlanarGrasp& b = grasps[ib];
    if (*a.score != *b.score) return *a.score > *b.score;
    return std::tie(a.u, a.v, a.d, a.w, a.h, a.theta) <
           std::tie(b.u, b.v, b.d, b.w, b.h, b.theta);
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const PlanarGrasp& g = grasps[idx];
    bool suppressed = false;
    for (std::size_t kidx : kept) {
      const PlanarGrasp& k = grasps[kidx];
      const double dist = std::hypot(g.u - k.u, g.v - k.v);
      if (dist < cfg.trans_thresh &&
          angle_distance_mod_pi(g.theta, k.theta) < cfg.rot_thresh &&
          std::abs(g.d - k.d) < cfg.depth_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<PlanarGrasp> grasp_nms(std::vector<PlanarGrasp> grasps,
                                   const GraspNmsConfig& cfg) {
  std::vector<PlanarGrasp> out;
  for (std::size_t idx : grasp_nms_indices(grasps, cfg)) out.push_back(grasps[idx]);
  return out;
}

std::optional<PlanarGrasp> transform_label(const PlanarGrasp& g,
                                           const LabelTransform& op,
                                           int image_width, int image_height) {
  PlanarGrasp out = g;
  if (op.kind == LabelTransform::Kind::kHFlip) {
    out.u = (image_width - 1) - g.u;
    out.theta = canonicalize_angle(-g.theta);
  } else {
    const double cx = (image_width - 1) / 2.0;
    const double cy = (image_height - 1) / 2.0;
    const double c = std::cos(op.angle), s = std::sin(op.angle);
    const double du = g.u - cx, dv = g.v - cy;
    out.u = cx + c * du - s * dv;
    out.v = cy + s * du + c * dv;
    out.theta = canonicalize_angle(g.theta + op.angle);
  }
  if (out.u < 0.0 || out.u > image_width - 1 || out.v < 0.0 || out.v > image_height - 1)
    return std::nullopt;
  return out;
}

}  // namespace dgcan::core
