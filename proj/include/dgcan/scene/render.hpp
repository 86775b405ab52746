#pragma once

#include <cstdint>

#include "dgcan/common/image.hpp"
#include "dgcan/scene/scene.hpp"

namespace dgcan::scene {

struct RenderOptions {
  bool shading = true;
  bool color_noise = true;
};

// Per-pixel object id: index into scene.objects, -1 for the ground plane.
struct RenderBuffers {
  DepthImage depth;       // meters along the camera z axis
  Image<int> object_ids;
};

// Nearest ray-primitive intersection per pixel (z-buffer semantics), plane
// included. Depth is the camera-frame z of the hit point.
RenderBuffers render_depth_ids(const Scene& scene);
DepthImage render_depth(const Scene& scene);

// Flat per-object albedo with Lambert shading and mild sensor noise,
// deterministic from the scene seed.
ColorImage render_color(const Scene& scene, const RenderOptions& opts = {});

struct DepthCorruptionConfig {
  double gaussian_sigma = 0.002;    // meters
  double edge_noise_sigma = 0.01;   // multiplicative, at depth edges
  double dropout_min = 0.02;        // fraction of pixels set to 0
  double dropout_max = 0.08;
  double edge_threshold = 0.005;    // meters, defines a depth edge
};

// Simulated sensor degradation: additive Gaussian noise, multiplicative
// noise at depth edges, and hole dropout clustered at discontinuities.
DepthImage corrupt_depth(const DepthImage& depth, std::uint64_t seed,
                         const DepthCorruptionConfig& cfg = {});

// Mask of pixels whose 4-neighborhood contains a depth step above the
// threshold (holes excluded from differencing).
Image<std::uint8_t> depth_edge_mask(const DepthImage& depth, double threshold);

}  // namespace dgcan::scene
