#pragma once

#include <vector>

#include "dgcan/common/image.hpp"
#include "dgcan/common/rng.hpp"
#include "dgcan/core/grasp.hpp"

namespace dgcan::harness {

struct AugmentConfig {
  bool enabled = true;
  double flip_prob = 0.5;
  std::vector<double> rotations_deg = {0.0, 15.0, -15.0};
};

struct TrainSample {
  ColorImage color;
  DepthImage depth;  // preprocessed, hole-free
  std::vector<core::PlanarGrasp> labels;
};

// Horizontal flip with probability flip_prob, then a rotation drawn from the
// configured set. Color is resampled bilinearly, depth nearest-neighbor
// (border values replicated); labels go through transform_label and are
// dropped when their center leaves the image.
TrainSample augment(const TrainSample& in, const AugmentConfig& cfg, Rng& rng);

ColorImage hflip_color(const ColorImage& img);
DepthImage hflip_depth(const DepthImage& img);
ColorImage rotate_color(const ColorImage& img, double angle_rad);
DepthImage rotate_depth(const DepthImage& img, double angle_rad);

}  // namespace dgcan::harness
