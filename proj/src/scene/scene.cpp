#include "dgcan/scene/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "dgcan/common/rng.hpp"

namespace dgcan::scene {

namespace {

PrimitiveObject inflated(const PrimitiveObject& obj, double gap) {
  PrimitiveObject out = obj;
  if (obj.kind == PrimitiveObject::Kind::kBox)
    out.dims = obj.dims + Eigen::Vector3d::Constant(2.0 * gap);
  else
    out.dims = Eigen::Vector3d(obj.dims.x() + gap, obj.dims.y() + 2.0 * gap, 0.0);
  return out;
}

Eigen::Vector3d random_albedo(Rng& rng) {
  // bright-ish colors, away from the gray plane
  const double hue = rng.uniform(0.0, 6.0);
  const double sat = rng.uniform(0.55, 1.0);
  const double val = rng.uniform(0.55, 1.0);
  const int i = static_cast<int>(hue);
  const double f = hue - i;
  const double p = val * (1 - sat), q = val * (1 - sat * f), t = val * (1 - sat * (1 - f));
  switch (i % 6) {
    case 0: return {val, t, p};
    case 1: return {q, val, p};
    case 2: return {p, val, t};
    case 3: return {p, q, val};
    case 4: return {t, p, val};
    default: return {val, p, q};
  }
}

struct Sampled {
  PrimitiveObject obj;
  bool lying = false;  // cylinder on its side
};

Sampled sample_object(Rng& rng, ObjectProfile profile) {
  Sampled s;
  PrimitiveObject& o = s.obj;
  o.friction = rng.uniform(0.3, 1.0);
  switch (profile) {
    case ObjectProfile::kTrain: {
      if (rng.bernoulli(0.6)) {
        o.kind = PrimitiveObject::Kind::kBox;
        o.dims = {rng.uniform(0.025, 0.065), rng.uniform(0.025, 0.065),
                  rng.uniform(0.012, 0.08)};
      } else {
        o.kind = PrimitiveObject::Kind::kCylinder;
        o.dims = {rng.uniform(0.015, 0.032), rng.uniform(0.02, 0.08), 0.0};
      }
      break;
    }
    case ObjectProfile::kSimilar: {
      // same kinds, held-out size band
      if (rng.bernoulli(0.6)) {
        o.kind = PrimitiveObject::Kind::kBox;
        o.dims = {rng.uniform(0.065, 0.085), rng.uniform(0.03, 0.075),
                  rng.uniform(0.015, 0.09)};
      } else {
        o.kind = PrimitiveObject::Kind::kCylinder;
        o.dims = {rng.uniform(0.032, 0.042), rng.uniform(0.025, 0.09), 0.0};
      }
      break;
    }
    case ObjectProfile::kNovel: {
      // held out from training: lying cylinders and thin plates
      if (rng.bernoulli(0.5)) {
        o.kind = PrimitiveObject::Kind::kCylinder;
        o.dims = {rng.uniform(0.012, 0.03), rng.uniform(0.05, 0.1), 0.0};
        s.lying = true;
      } else {
        o.kind = PrimitiveObject::Kind::kBox;
        o.dims = {rng.uniform(0.03, 0.09), rng.uniform(0.03, 0.07),
                  rng.uniform(0.008, 0.014)};
      }
      break;
    }
  }
  return s;
}

Eigen::Isometry3d camera_pose_from(Rng& rng, const SceneGenConfig& cfg) {
  const double height = rng.uniform(cfg.camera_height_min, cfg.camera_height_max);
  const double tilt = rng.uniform(0.0, cfg.max_tilt_deg * 0.93) * M_PI / 180.0;
  const double azimuth = rng.uniform(0.0, 2.0 * M_PI);
  const double roll = rng.uniform(0.0, 2.0 * M_PI);
  const Eigen::Vector3d target(rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03), 0.0);

  Eigen::Vector3d view(std::cos(azimuth) * std::sin(tilt),
                       std::sin(azimuth) * std::sin(tilt), -std::cos(tilt));
  const double dist = height / std::cos(tilt);
  const Eigen::Vector3d position = target - dist * view;

  Eigen::Vector3d ref = std::abs(view.x()) < 0.9 ? Eigen::Vector3d::UnitX()
                                                 : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = view.cross(ref).normalized();
  const Eigen::Vector3d e2 = view.cross(e1);
  const Eigen::Vector3d x_cam = std::cos(roll) * e1 + std::sin(roll) * e2;
  const Eigen::Vector3d y_cam = view.cross(x_cam);

  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  Eigen::Matrix3d R;
  R.col(0) = x_cam;
  R.col(1) = y_cam;
  R.col(2) = view;
  pose.linear() = R;
  pose.translation() = position;
  return pose;
}

}  // namespace

Scene generate_scene(std::uint64_t seed, int n_objects, const SceneGenConfig& cfg) {
  if (n_objects < 1 || n_objects > 10)
    throw std::invalid_argument("generate_scene: n_objects must be in [1, 10]");
  Rng rng(seed);
  Scene scene;
  scene.seed = seed;
  scene.intrinsics.fx = cfg.focal;
  scene.intrinsics.fy = cfg.focal;
  scene.intrinsics.cx = (cfg.image_width - 1) / 2.0;
  scene.intrinsics.cy = (cfg.image_height - 1) / 2.0;
  scene.intrinsics.width = cfg.image_width;
  scene.intrinsics.height = cfg.image_height;
  scene.camera_pose = camera_pose_from(rng, cfg);

  // index of the box each object is stacked on, -1 if on the plane
  std::vector<int> stacked_on;

  for (int i = 0; i < n_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
      Sampled s = sample_object(rng, cfg.profile);
      PrimitiveObject& obj = s.obj;
      const double yaw = rng.uniform(0.0, 2.0 * M_PI);
      int base = -1;

      // occasionally stack a small box on a previously placed plane-resting box
      if (obj.kind == PrimitiveObject::Kind::kBox && rng.bernoulli(0.2)) {
        std::vector<int> candidates;
        for (std::size_t j = 0; j < scene.objects.size(); ++j) {
          const auto& b = scene.objects[j];
          if (b.kind == PrimitiveObject::Kind::kBox && stacked_on[j] == -1 &&
              b.dims.x() > 0.04 && b.dims.y() > 0.04)
            candidates.push_back(static_cast<int>(j));
        }
        if (!candidates.empty()) base = candidates[rng.uniform_index(static_cast<int>(candidates.size()))];
      }

      if (base >= 0) {
        const auto& b = scene.objects[base];
        obj.dims.x() = std::min(obj.dims.x(), b.dims.x() * 0.7);
        obj.dims.y() = std::min(obj.dims.y(), b.dims.y() * 0.7);
        obj.dims.z() = std::min(obj.dims.z(), 0.05);
        // same yaw as the base, offset keeps the footprint supported
        const double mx = (b.dims.x() - obj.dims.x()) / 2.0;
        const double my = (b.dims.y() - obj.dims.y()) / 2.0;
        const Eigen::Vector3d local(rng.uniform(-mx, mx), rng.uniform(-my, my),
                                    b.dims.z() / 2.0 + obj.dims.z() / 2.0);
        obj.pose = b.pose * Eigen::Translation3d(local);
      } else {
        const double r = cfg.workspace_radius * std::sqrt(rng.uniform01());
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        double rest_z;
        Eigen::Matrix3d R;
        if (s.lying) {
          R = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
               Eigen::AngleAxisd(M_PI / 2.0, Eigen::Vector3d::UnitY()))
                  .toRotationMatrix();
          rest_z = obj.dims.x();  // radius
        } else {
          R = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
          rest_z = obj.kind == PrimitiveObject::Kind::kBox ? obj.dims.z() / 2.0
                                                           : obj.dims.y() / 2.0;
        }
        obj.pose = Eigen::Isometry3d::Identity();
        obj.pose.linear() = R;
        obj.pose.translation() = Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), rest_z);
      }

      bool collides = false;
      const PrimitiveObject grown = inflated(obj, cfg.min_gap);
      for (std::size_t j = 0; j < scene.objects.size() && !collides; ++j) {
        if (static_cast<int>(j) == base) continue;  // resting contact intended
        if (primitives_overlap(grown, scene.objects[j])) collides = true;
      }
      if (collides) continue;

      obj.albedo = random_albedo(rng);
      scene.objects.push_back(obj);
      stacked_on.push_back(base);
      placed = true;
    }
    if (!placed)
      throw std::runtime_error("generate_scene: placement failed for seed " +
                               std::to_string(seed));
  }
  return scene;
}

const char* profile_name(ObjectProfile p) {
  switch (p) {
    case ObjectProfile::kTrain: return "train";
    case ObjectProfile::kSimilar: return "similar";
    default: return "novel";
  }
}

ObjectProfile profile_from_name(const std::string& name) {
  if (name == "train" || name == "seen") return ObjectProfile::kTrain;
  if (name == "similar") return ObjectProfile::kSimilar;
  if (name == "novel") return ObjectProfile::kNovel;
  throw std::invalid_argument("unknown profile: " + name);
}

}  // namespace dgcan::scene
