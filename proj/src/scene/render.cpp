#include "dgcan/scene/render.hpp"

#include <algorithm>
#include <cmath>

#include "dgcan/common/rng.hpp"

namespace dgcan::scene {

namespace {

constexpr double kDepthMin = 0.2;
constexpr double kDepthMax = 2.0;
const Eigen::Vector3d kPlaneAlbedo(0.45, 0.45, 0.45);
const Eigen::Vector3d kLightDir = Eigen::Vector3d(-0.35, -0.25, -1.0).normalized();

struct PixelHit {
  double depth;
  int id;  // -1 plane
  Eigen::Vector3d normal;
};

PixelHit trace_pixel(const Scene& scene, int y, int x) {
  const auto& K = scene.intrinsics;
  // camera-frame direction with unit z: the ray parameter equals depth
  const Eigen::Vector3d dir_cam((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
  const Eigen::Vector3d dir = scene.camera_pose.linear() * dir_cam;
  const Eigen::Vector3d origin = scene.camera_position();

  PixelHit hit{kDepthMax, -2, Eigen::Vector3d::UnitZ()};
  if (dir.z() < -1e-12) {
    const double t = -origin.z() / dir.z();
    if (t > 0.0 && t < hit.depth) hit = {t, -1, Eigen::Vector3d::UnitZ()};
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    auto h = intersect_primitive(scene.objects[i], origin, dir, 1e-9, hit.depth);
    if (h && h->t < hit.depth)
      hit = {h->t, static_cast<int>(i), h->normal};
  }
  return hit;
}

}  // namespace

RenderBuffers render_depth_ids(const Scene& scene) {
  const int H = scene.intrinsics.height, W = scene.intrinsics.width;
  RenderBuffers out{DepthImage(H, W), Image<int>(H, W, 1, -2)};
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const PixelHit hit = trace_pixel(scene, y, x);
      out.depth(y, x) = std::clamp(hit.depth, kDepthMin, kDepthMax);
      out.object_ids(y, x) = hit.id;
    }
  return out;
}

DepthImage render_depth(const Scene& scene) { return render_depth_ids(scene).depth; }

ColorImage render_color(const Scene& scene, const RenderOptions& opts) {
  const int H = scene.intrinsics.height, W = scene.intrinsics.width;
  ColorImage img(H, W, 3);
  Rng rng(scene.seed ^ 0x636f6c6fULL);  // independent color-noise stream
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const PixelHit hit = trace_pixel(scene, y, x);
      const Eigen::Vector3d albedo =
          hit.id >= 0 ? scene.objects[hit.id].albedo : kPlaneAlbedo;
      double shade = 1.0;
      if (opts.shading)
        shade = 0.45 + 0.55 * std::max(0.0, hit.normal.dot(-kLightDir));
      for (int c = 0; c < 3; ++c) {
        double v = albedo[c] * shade;
        if (opts.color_noise) v += rng.normal(0.0, 2.0 / 255.0);
        img(y, x, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(v * 255.0), 0L, 255L));
      }
    }
  return img;
}

Image<std::uint8_t> depth_edge_mask(const DepthImage& depth, double threshold) {
  const int H = depth.height(), W = depth.width();
  Image<std::uint8_t> mask(H, W, 1, 0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const double d = depth(y, x);
      if (d == 0.0) continue;
      const int dy[4] = {0, 0, 1, -1}, dx[4] = {1, -1, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const int ny = y + dy[k], nx = x + dx[k];
        if (!depth.in_bounds(ny, nx)) continue;
        const double dn = depth(ny, nx);
        if (dn != 0.0 && std::abs(dn - d) > threshold) {
          mask(y, x) = 1;
          break;
        }
      }
    }
  return mask;
}

DepthImage corrupt_depth(const DepthImage& depth, std::uint64_t seed,
                         const DepthCorruptionConfig& cfg) {
  const int H = depth.height(), W = depth.width();
  DepthImage out = depth;
  Rng rng(seed ^ 0x64657074ULL);

  const auto edges = depth_edge_mask(depth, cfg.edge_threshold);

  if (cfg.gaussian_sigma > 0.0 || cfg.edge_noise_sigma > 0.0) {
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        if (out(y, x) == 0.0) continue;
        double v = out(y, x);
        if (cfg.gaussian_sigma > 0.0) v += rng.normal(0.0, cfg.gaussian_sigma);
        if (cfg.edge_noise_sigma > 0.0 && edges(y, x))
          v *= 1.0 + rng.normal(0.0, cfg.edge_noise_sigma);
        out(y, x) = std::clamp(v, kDepthMin, kDepthMax);
      }
  }

  const double frac = cfg.dropout_max > cfg.dropout_min
                          ? rng.uniform(cfg.dropout_min, cfg.dropout_max)
                          : cfg.dropout_min;
  const std::size_t n_holes =
      static_cast<std::size_t>(std::llround(frac * static_cast<double>(H) * W));
  if (n_holes == 0) return out;

  // candidate pool: pixels within 1 px of a depth edge
  std::vector<std::size_t> near_edge;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      bool close = false;
      for (int oy = -1; oy <= 1 && !close; ++oy)
        for (int ox = -1; ox <= 1 && !close; ++ox) {
          const int ny = y + oy, nx = x + ox;
          if (edges.in_bounds(ny, nx) && edges(ny, nx)) close = true;
        }
      if (close) near_edge.push_back(static_cast<std::size_t>(y) * W + x);
    }
  rng.shuffle(near_edge);

  std::vector<std::uint8_t> is_hole(static_cast<std::size_t>(H) * W, 0);
  std::size_t placed = 0;
  const std::size_t edge_target =
      std::min(near_edge.size(), static_cast<std::size_t>(0.7 * n_holes));
  for (std::size_t i = 0; i < near_edge.size() && placed < edge_target; ++i) {
    if (!is_hole[near_edge[i]]) {
      is_hole[near_edge[i]] = 1;
      ++placed;
    }
  }
  while (placed < n_holes) {
    const std::size_t p = rng.uniform_int(static_cast<std::uint64_t>(H) * W);
    if (!is_hole[p]) {
      is_hole[p] = 1;
      ++placed;
    }
  }
  for (std::size_t p = 0; p < is_hole.size(); ++p)
    if (is_hole[p]) out.raw()[p] = 0.0;
  return out;
}

}  // namespace dgcan::scene
