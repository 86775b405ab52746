#pragma once

#include <string>

#include "dgcan/common/image.hpp"

namespace dgcan {

// 8-bit RGB PNG.
void write_color_png(const std::string& path, const ColorImage& img);
ColorImage read_color_png(const std::string& path);

// Depth stored as 16-bit grayscale PNG in millimeters (0 = hole).
// Quantization error is at most 0.5 mm.
void write_depth_png(const std::string& path, const DepthImage& depth);
DepthImage read_depth_png(const std::string& path);

}  // namespace dgcan
