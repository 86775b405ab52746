#include <chrono>
#include <cstdio>
#include "dgcan/net/model.hpp"
#include "dgcan/net/optimizer.hpp"
#include "dgcan/common/rng.hpp"

using namespace dgcan;
using namespace dgcan::net;
using Clock = std::chrono::steady_clock;

template <class T>
double bench(int batch, int rois_per_img, int iters, bool rgb_only) {
  ModelConfig cfg;
  cfg.rgb_only = rgb_only;
  DgcanModel<T> model(cfg);
  SgdOptimizer<T> opt(model.parameters(), 5e-4, 0.9, 1e-4);
  Rng rng(3);
  Tensor<T> rgb({batch, 3, 240, 320}), dep({batch, 1, 240, 320});
  for (int i = 0; i < rgb.size(); ++i) rgb[i] = (T)rng.normal(0, 0.5);
  for (int i = 0; i < dep.size(); ++i) dep[i] = (T)rng.normal(0, 0.5);

  auto t0 = Clock::now();
  for (int it = 0; it < iters; ++it) {
    opt.zero_grad();
    auto bb = model.forward_backbone(rgb, dep);
    // sampled GPN loss: 512 anchors/img
    std::vector<std::array<int,4>> cls_idx; std::vector<int> labels;
    std::vector<std::array<int,4>> reg_idx;
    Rng r2(it);
    for (int n = 0; n < batch; ++n)
      for (int s = 0; s < 512; ++s) {
        int a = r2.uniform_index(12), y = r2.uniform_index(15), x = r2.uniform_index(20);
        cls_idx.push_back({n, a*2, y, x});
        cls_idx.push_back({n, a*2+1, y, x});
        labels.push_back(s % 2);
        if (s < 128) for (int c = 0; c < 4; ++c) reg_idx.push_back({n, a*4+c, y, x});
      }
    auto cls = reshape(gather_nchw(bb.cls_map, cls_idx), {batch*512, 2});
    auto reg = reshape(gather_nchw(bb.reg_map, reg_idx), {batch*128, 4});
    Tensor<T> regt({batch*128, 4}, T(0.1));
    auto gl = gpn_loss<T>(cls, labels, &reg, &regt, 1.0);
    // GRoI on sampled proposals
    std::vector<RoiBox> rois;
    for (int n = 0; n < batch; ++n)
      for (int i = 0; i < rois_per_img; ++i)
        rois.push_back({n, (double)r2.uniform_index(10), (double)r2.uniform_index(8),
                        10.0 + r2.uniform_index(9), 8.0 + r2.uniform_index(6)});
    auto go = model.forward_groi(bb.feat, rois);
    std::vector<int> qlab(rois.size(), 1);
    Tensor<T> treg({(int)rois.size(), 7}, T(0.1));
    Tensor<T> tsc({(int)rois.size(), 1}, T(0.5));
    auto gr = groi_loss<T>(go.cls, qlab, &go.reg, &treg, &go.score, &tsc, 1.0, 4.0);
    auto loss = total_loss(gl.total, gr.total);
    backward(loss);
    opt.step();
  }
  auto t1 = Clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / iters;
}

int main() {
  std::printf("float  b2 r128 full: %.3f s/iter\n", bench<float>(2, 128, 6, false));
  std::printf("float  b2 r128 rgb : %.3f s/iter\n", bench<float>(2, 128, 6, true));
  std::printf("double b2 r128 full: %.3f s/iter\n", bench<double>(2, 128, 4, false));
  return 0;
}
