#pragma once

#include "dgcan/common/image.hpp"

namespace dgcan::harness {

struct DepthFilterConfig {
  double spatial_sigma = 5.0;   // pixels
  double range_sigma = 0.01;    // meters
  int radius = 10;              // window half-size
};

// Nearest-valid-neighbor propagation; throws if the image has no valid pixel.
DepthImage fill_holes(const DepthImage& depth);

// Gaussian bilateral filter; range weights cut off at 4 range sigmas so flat
// regions separated by large steps do not mix.
DepthImage bilateral_filter(const DepthImage& depth, const DepthFilterConfig& cfg = {});

// Hole filling followed by the bilateral filter; output is hole-free.
DepthImage preprocess_depth(const DepthImage& depth, const DepthFilterConfig& cfg = {});

}  // namespace dgcan::harness
