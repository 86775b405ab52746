#include "dgcan/scene/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dgcan::scene {

namespace {

std::optional<RayHit> intersect_box_local(const Eigen::Vector3d& half,
                                          const Eigen::Vector3d& o,
                                          const Eigen::Vector3d& d,
                                          double t_min, double t_max) {
  double t0 = t_min, t1 = t_max;
  int axis0 = -1, axis1 = -1;
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (std::abs(o[a]) > half[a]) return std::nullopt;
      continue;
    }
    double ta = (-half[a] - o[a]) / d[a];
    double tb = (half[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    if (ta > t0) { t0 = ta; axis0 = a; }
    if (tb < t1) { t1 = tb; axis1 = a; }
    if (t0 > t1) return std::nullopt;
  }
  double t;
  int axis;
  if (t0 > t_min) {
    t = t0; axis = axis0;
  } else if (t1 < t_max) {
    t = t1; axis = axis1;  // origin inside: exit face
  } else {
    return std::nullopt;
  }
  if (axis < 0) return std::nullopt;
  RayHit hit;
  hit.t = t;
  hit.point = o + t * d;
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  n[axis] = hit.point[axis] > 0.0 ? 1.0 : -1.0;
  hit.normal = n;
  return hit;
}

std::optional<RayHit> intersect_cylinder_local(double radius, double height,
                                               const Eigen::Vector3d& o,
                                               const Eigen::Vector3d& d,
                                               double t_min, double t_max) {
  const double hz = height / 2.0;
  double best_t = t_max;
  Eigen::Vector3d best_n;
  bool found = false;

  // side surface: (ox + t dx)^2 + (oy + t dy)^2 = r^2
  const double a = d.x() * d.x() + d.y() * d.y();
  if (a > 1e-15) {
    const double b = 2.0 * (o.x() * d.x() + o.y() * d.y());
    const double c = o.x() * o.x() + o.y() * o.y() - radius * radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        if (t <= t_min || t >= best_t) continue;
        const double z = o.z() + t * d.z();
        if (std::abs(z) <= hz) {
          best_t = t;
          Eigen::Vector3d p = o + t * d;
          best_n = Eigen::Vector3d(p.x(), p.y(), 0.0).normalized();
          found = true;
        }
      }
    }
  }
  // caps
  if (std::abs(d.z()) > 1e-15) {
    for (double zcap : {-hz, hz}) {
      const double t = (zcap - o.z()) / d.z();
      if (t <= t_min || t >= best_t) continue;
      const Eigen::Vector3d p = o + t * d;
      if (p.x() * p.x() + p.y() * p.y() <= radius * radius) {
        best_t = t;
        best_n = Eigen::Vector3d(0.0, 0.0, zcap > 0.0 ? 1.0 : -1.0);
        found = true;
      }
    }
  }
  if (!found) return std::nullopt;
  RayHit hit;
  hit.t = best_t;
  hit.point = o + best_t * d;
  hit.normal = best_n;
  return hit;
}

}  // namespace

std::optional<RayHit> intersect_primitive(const PrimitiveObject& obj,
                                          const Eigen::Vector3d& origin,
                                          const Eigen::Vector3d& dir,
                                          double t_min, double t_max) {
  const Eigen::Isometry3d inv = obj.pose.inverse();
  const Eigen::Vector3d o = inv * origin;
  const Eigen::Vector3d d = inv.linear() * dir;
  std::optional<RayHit> hit;
  if (obj.kind == PrimitiveObject::Kind::kBox)
    hit = intersect_box_local(obj.dims / 2.0, o, d, t_min, t_max);
  else
    hit = intersect_cylinder_local(obj.dims.x(), obj.dims.y(), o, d, t_min, t_max);
  if (!hit) return std::nullopt;
  hit->point = obj.pose * hit->point;
  hit->normal = obj.pose.linear() * hit->normal;
  return hit;
}

bool point_inside(const PrimitiveObject& obj, const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p = obj.pose.inverse() * p_world;
  if (obj.kind == PrimitiveObject::Kind::kBox) {
    const Eigen::Vector3d half = obj.dims / 2.0;
    return std::abs(p.x()) <= half.x() && std::abs(p.y()) <= half.y() &&
           std::abs(p.z()) <= half.z();
  }
  const double r = obj.dims.x(), hz = obj.dims.y() / 2.0;
  return p.x() * p.x() + p.y() * p.y() <= r * r && std::abs(p.z()) <= hz;
}

Eigen::Vector3d support_point(const PrimitiveObject& obj, const Eigen::Vector3d& dir_world) {
  const Eigen::Vector3d d = obj.pose.linear().transpose() * dir_world;
  Eigen::Vector3d p;
  if (obj.kind == PrimitiveObject::Kind::kBox) {
    const Eigen::Vector3d half = obj.dims / 2.0;
    p = Eigen::Vector3d(d.x() >= 0 ? half.x() : -half.x(),
                        d.y() >= 0 ? half.y() : -half.y(),
                        d.z() >= 0 ? half.z() : -half.z());
  } else {
    const double r = obj.dims.x(), hz = obj.dims.y() / 2.0;
    const double nxy = std::hypot(d.x(), d.y());
    if (nxy > 1e-15)
      p = Eigen::Vector3d(r * d.x() / nxy, r * d.y() / nxy, d.z() >= 0 ? hz : -hz);
    else
      p = Eigen::Vector3d(0.0, 0.0, d.z() >= 0 ? hz : -hz);
  }
  return obj.pose * p;
}

Eigen::Vector3d support_point(const ObbVolume& box, const Eigen::Vector3d& dir_world) {
  const Eigen::Vector3d d = box.pose.linear().transpose() * dir_world;
  const Eigen::Vector3d p(d.x() >= 0 ? box.half.x() : -box.half.x(),
                          d.y() >= 0 ? box.half.y() : -box.half.y(),
                          d.z() >= 0 ? box.half.z() : -box.half.z());
  return box.pose * p;
}

double min_z(const ObbVolume& box) {
  // support in -z gives the lowest corner
  return support_point(box, Eigen::Vector3d(0, 0, -1)).z();
}

bool obb_overlap(const ObbVolume& a, const ObbVolume& b) {
  const Eigen::Matrix3d Ra = a.pose.linear(), Rb = b.pose.linear();
  const Eigen::Vector3d t = b.pose.translation() - a.pose.translation();
  auto separated = [&](const Eigen::Vector3d& axis) {
    const double len = axis.norm();
    if (len < 1e-12) return false;
    const Eigen::Vector3d L = axis / len;
    double ra = 0, rb = 0;
    for (int i = 0; i < 3; ++i) {
      ra += a.half[i] * std::abs(Ra.col(i).dot(L));
      rb += b.half[i] * std::abs(Rb.col(i).dot(L));
    }
    return std::abs(t.dot(L)) >= ra + rb;
  };
  for (int i = 0; i < 3; ++i) {
    if (separated(Ra.col(i))) return false;
    if (separated(Rb.col(i))) return false;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (separated(Ra.col(i).cross(Rb.col(j)))) return false;
  return true;
}

namespace {

// Boolean GJK: does the Minkowski difference contain the origin (within
// margin)? Supports any pair of convex support functions.
template <class SupportA, class SupportB>
bool gjk_overlap(const SupportA& sa, const SupportB& sb, double margin) {
  auto support = [&](const Eigen::Vector3d& d) { return sa(d) - sb(-d); };
  Eigen::Vector3d dir(1, 0, 0);
  std::vector<Eigen::Vector3d> simplex;
  simplex.push_back(support(dir));
  dir = -simplex[0];
  for (int iter = 0; iter < 64; ++iter) {
    if (dir.norm() < margin) return true;  // origin on the simplex
    const Eigen::Vector3d p = support(dir.normalized());
    if (p.dot(dir.normalized()) < margin) return false;  // no progress past origin
    simplex.push_back(p);
    // nearest-point simplex reduction
    if (simplex.size() == 2) {
      const Eigen::Vector3d a = simplex[1], b = simplex[0];
      const Eigen::Vector3d ab = b - a, ao = -a;
      if (ab.dot(ao) > 0)
        dir = ab.cross(ao).cross(ab);
      else {
        simplex = {a};
        dir = ao;
      }
    } else if (simplex.size() == 3) {
      const Eigen::Vector3d a = simplex[2], b = simplex[1], c = simplex[0];
      const Eigen::Vector3d ab = b - a, ac = c - a, ao = -a;
      const Eigen::Vector3d abc = ab.cross(ac);
      if (abc.cross(ac).dot(ao) > 0) {
        if (ac.dot(ao) > 0) {
          simplex = {c, a};
          dir = ac.cross(ao).cross(ac);
        } else {
          simplex = {b, a};
          dir = ab.cross(ao).cross(ab);
        }
      } else if (ab.cross(abc).dot(ao) > 0) {
        simplex = {b, a};
        dir = ab.cross(ao).cross(ab);
      } else {
        if (abc.dot(ao) > 0) {
          dir = abc;
        } else {
          simplex = {b, c, a};
          dir = -abc;
        }
      }
    } else {  // tetrahedron
      const Eigen::Vector3d a = simplex[3], b = simplex[2], c = simplex[1], d = simplex[0];
      const Eigen::Vector3d ao = -a;
      const Eigen::Vector3d abc = (b - a).cross(c - a);
      const Eigen::Vector3d acd = (c - a).cross(d - a);
      const Eigen::Vector3d adb = (d - a).cross(b - a);
      if (abc.dot(ao) > 0) {
        simplex = {c, b, a};
        dir = abc;
      } else if (acd.dot(ao) > 0) {
        simplex = {d, c, a};
        dir = acd;
      } else if (adb.dot(ao) > 0) {
        simplex = {b, d, a};
        dir = adb;
      } else {
        return true;  // origin enclosed
      }
      continue;
    }
  }
  return true;  // ambiguous after max iterations: treat as touching
}

}  // namespace

bool obb_primitive_overlap(const ObbVolume& box, const PrimitiveObject& obj,
                           double margin) {
  if (obj.kind == PrimitiveObject::Kind::kBox) {
    ObbVolume other{obj.pose, obj.dims / 2.0};
    return obb_overlap(box, other);
  }
  return gjk_overlap(
      [&](const Eigen::Vector3d& d) { return support_point(box, d); },
      [&](const Eigen::Vector3d& d) { return support_point(obj, d); }, margin);
}

bool primitives_overlap(const PrimitiveObject& a, const PrimitiveObject& b,
                        double margin) {
  if (a.kind == PrimitiveObject::Kind::kBox) {
    ObbVolume box{a.pose, a.dims / 2.0};
    return obb_primitive_overlap(box, b, margin);
  }
  if (b.kind == PrimitiveObject::Kind::kBox) {
    ObbVolume box{b.pose, b.dims / 2.0};
    return obb_primitive_overlap(box, a, margin);
  }
  return gjk_overlap(
      [&](const Eigen::Vector3d& d) { return support_point(a, d); },
      [&](const Eigen::Vector3d& d) { return support_point(b, d); }, margin);
}

double bounding_radius(const PrimitiveObject& obj) {
  if (obj.kind == PrimitiveObject::Kind::kBox) return obj.dims.norm() / 2.0;
  return std::hypot(obj.dims.x(), obj.dims.y() / 2.0);
}

}  // namespace dgcan::scene
