#include "dgcan/harness/preprocess.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace dgcan::harness {

DepthImage fill_holes(const DepthImage& depth) {
  const int H = depth.height(), W = depth.width();
  DepthImage out = depth;
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      if (out(y, x) != 0.0) queue.emplace_back(y, x);
  if (queue.empty()) throw std::runtime_error("fill_holes: fully empty depth image");

  // multi-source BFS: each hole takes the value of the first valid pixel to
  // reach it (ties resolved by raster seeding order)
  const int dy[4] = {0, 0, 1, -1}, dx[4] = {1, -1, 0, 0};
  while (!queue.empty()) {
    const auto [y, x] = queue.front();
    queue.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int ny = y + dy[k], nx = x + dx[k];
      if (ny < 0 || ny >= H || nx < 0 || nx >= W || out(ny, nx) != 0.0) continue;
      out(ny, nx) = out(y, x);
      queue.emplace_back(ny, nx);
    }
  }
  return out;
}

DepthImage bilateral_filter(const DepthImage& depth, const DepthFilterConfig& cfg) {
  const int H = depth.height(), W = depth.width();
  const int r = cfg.radius;
  std::vector<double> spatial((2 * r + 1) * (2 * r + 1));
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      spatial[(dy + r) * (2 * r + 1) + (dx + r)] =
          std::exp(-(dy * dy + dx * dx) / (2.0 * cfg.spatial_sigma * cfg.spatial_sigma));

  // range-weight lookup with a hard cutoff at 4 sigmas
  constexpr int kLut = 4096;
  const double cutoff = 4.0 * cfg.range_sigma;
  std::vector<double> lut(kLut);
  for (int i = 0; i < kLut; ++i) {
    const double d = cutoff * (i + 0.5) / kLut;
    lut[i] = std::exp(-d * d / (2.0 * cfg.range_sigma * cfg.range_sigma));
  }

  DepthImage out(H, W);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const double center = depth(y, x);
      double acc = 0.0, norm = 0.0;
      const int y0 = std::max(0, y - r), y1 = std::min(H - 1, y + r);
      const int x0 = std::max(0, x - r), x1 = std::min(W - 1, x + r);
      for (int ny = y0; ny <= y1; ++ny)
        for (int nx = x0; nx <= x1; ++nx) {
          const double v = depth(ny, nx);
          const double ad = std::abs(v - center);
          if (ad >= cutoff) continue;
          const double w = spatial[(ny - y + r) * (2 * r + 1) + (nx - x + r)] *
                           lut[static_cast<int>(ad / cutoff * kLut)];
          acc += w * v;
          norm += w;
        }
      out(y, x) = acc / norm;
    }
  return out;
}

DepthImage preprocess_depth(const DepthImage& depth, const DepthFilterConfig& cfg) {
  return bilateral_filter(fill_holes(depth), cfg);
}

}  // namespace dgcan::harness
