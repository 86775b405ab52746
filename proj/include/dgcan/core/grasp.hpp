#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace dgcan::core {

// Planar grasp rectangle: center (u, v) in pixels, fingertip depth d in
// meters, width w (jaw opening direction) and height h (finger thickness
// direction) in pixels, rotation theta in radians within (-pi/2, pi/2].
struct PlanarGrasp {
  double u = 0.0;
  double v = 0.0;
  double d = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;
  std::optional<double> score;
};

// Axis-aligned box, center + size. Used for anchors, grasp proposals and
// enclosing boxes of rotated rectangles.
struct AnchorBox {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct GpnTarget {
  double tu = 0.0;
  double tv = 0.0;
  double tw = 0.0;
  double th = 0.0;
};

struct GroiTarget {
  double tu = 0.0;
  double tv = 0.0;
  double td = 0.0;
  double tw = 0.0;
  double th = 0.0;
  double tsin = 0.0;
  double tcos = 1.0;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

// Parallel-jaw grasp pose in camera frame. Rotation columns are
// (closing axis, minor axis, approach axis); width is the jaw opening in
// meters.
struct Grasp3D {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double width = 0.0;
  double score = 0.0;
};

// Maps theta into the canonical range (-pi/2, pi/2]; grasps are symmetric
// under rotation by pi.
double canonicalize_angle(double theta);

// Eq.-style anchor offset encoding: t_u=(u-u_a)/w_a, t_v=(v-v_a)/h_a,
// t_w=log(w/w_a), t_h=log(h/h_a).
GpnTarget encode_gpn_offsets(const AnchorBox& box, const AnchorBox& anchor);
// Exact algebraic inverse of encode_gpn_offsets. Log-ratios are clamped to
// |t| <= 10 to guard against degenerate regressor outputs.
AnchorBox decode_gpn_offsets(const GpnTarget& t, const AnchorBox& anchor);

// Angle encoded as (sin 2theta, cos 2theta); invariant under theta -> theta+pi.
void encode_angle(double theta, double& tsin, double& tcos);
// theta = atan2(tsin, tcos)/2, canonicalized. The pair need not be normalized
// (network predictions are accepted as-is); a zero vector is an error.
double decode_angle(double tsin, double tcos);

// Depth offset relative to a measured reference depth d_o.
double encode_depth(double d, double d_o);
double decode_depth(double t_d, double d_o);

// Pinhole lift of a planar grasp into a camera-frame 3D grasp. The approach
// axis is camera +z; the closing axis lies in the image plane at theta.
Grasp3D lift_planar_to_3d(const PlanarGrasp& g, const CameraIntrinsics& cam);

// Inverse projection. G's approach axis must align with camera +z within
// 1e-6. rect_height_m sets the rectangle height (finger thickness extent),
// which a Grasp3D does not carry.
PlanarGrasp project_3d_to_planar(const Grasp3D& G, const CameraIntrinsics& cam,
                                 double rect_height_m);

// Intersection-over-union of two rotated rectangles via Sutherland-Hodgman
// convex clipping.
double rotated_iou(const PlanarGrasp& a, const PlanarGrasp& b);

// IoU of axis-aligned boxes.
double aligned_iou(const AnchorBox& a, const AnchorBox& b);

// Corner points of the rotated rectangle, counter-clockwise.
std::array<Eigen::Vector2d, 4> rect_corners(const PlanarGrasp& g);

// Tightest axis-aligned box enclosing the rotated rectangle.
AnchorBox aabb_of(const PlanarGrasp& g);

struct GraspNmsConfig {
  double trans_thresh = 25.0;        // pixels
  double rot_thresh = M_PI / 6.0;    // radians, distance taken mod pi
  double depth_thresh = 0.02;        // meters
};

// Greedy score-descending suppression in grasp space: a grasp is suppressed
// when center, angle and depth distances are all below the thresholds.
// Output is sorted by score descending; ties broken by grasp coordinates so
// the result is invariant to input order. All grasps must carry scores.
std::vector<PlanarGrasp> grasp_nms(std::vector<PlanarGrasp> grasps,
                                   const GraspNmsConfig& cfg);

// Indices (into the input vector) of the kept grasps, score-descending.
std::vector<std::size_t> grasp_nms_indices(const std::vector<PlanarGrasp>& grasps,
                                           const GraspNmsConfig& cfg);

struct LabelTransform {
  enum class Kind { kHFlip, kRotate } kind = Kind::kHFlip;
  double angle = 0.0;  // rotation about the image center, radians, CCW
};

// Applies a horizontal flip or an in-plane rotation to a grasp label.
// Returns nullopt when the transformed center leaves the image.
std::optional<PlanarGrasp> transform_label(const PlanarGrasp& g,
                                           const LabelTransform& op,
                                           int image_width, int image_height);

}  // namespace dgcan::core
