#pragma once

#include "dgcan/net/anchors.hpp"
#include "dgcan/net/layers.hpp"

namespace dgcan::net {

struct ModelConfig {
  std::array<int, 4> stage_channels = {16, 32, 64, 128};
  int stem_channels = 8;
  int gpn_head_channels = 64;
  int roi_size = 7;
  LcaConfig lca;
  AnchorConfig anchors;
  bool rgb_only = false;  // depth stream zeroed; fusion sees zeros
  std::uint64_t init_seed = 1234;
};

// Two identical convolutional streams (RGB / depth replicated to 3
// channels); LCA fuses them after stages 1-3, the fused map feeding the next
// RGB stage while the depth stream continues unfused. Total stride 16 at
// stage 3, whose fused map is the detection feature.
template <class T>
class DgcanModel {
 public:
  explicit DgcanModel(const ModelConfig& cfg) : cfg_(cfg) {
    Rng rng(cfg.init_seed);
    const auto& ch = cfg.stage_channels;
    auto make_stream = [&](Stream& s) {
      s.stem = Conv2dLayer<T>(3, cfg.stem_channels, 3, 2, 1, rng);
      s.stage1 = Conv2dLayer<T>(cfg.stem_channels, ch[0], 3, 2, 1, rng);
      s.stage2 = Conv2dLayer<T>(ch[0], ch[1], 3, 2, 1, rng);
      s.stage3 = Conv2dLayer<T>(ch[1], ch[2], 3, 2, 1, rng);
    };
    make_stream(rgb_);
    make_stream(depth_);
    const int div = cfg.lca.embed_divisor;
    lca1_ = LcaBlock<T>(ch[0], std::max(4, ch[0] / div), cfg.lca.window[0],
                        cfg.lca.heads, cfg.lca.pos_scale, rng);
    lca2_ = LcaBlock<T>(ch[1], std::max(4, ch[1] / div), cfg.lca.window[1],
                        cfg.lca.heads, cfg.lca.pos_scale, rng);
    lca3_ = LcaBlock<T>(ch[2], std::max(4, ch[2] / div), cfg.lca.window[2],
                        cfg.lca.heads, cfg.lca.pos_scale, rng);
    const int A = cfg.anchors.per_cell();
    gpn_conv_ = Conv2dLayer<T>(ch[2], cfg.gpn_head_channels, 3, 1, 1, rng);
    gpn_cls_ = Conv2dLayer<T>(cfg.gpn_head_channels, 2 * A, 1, 1, 0, rng);
    gpn_reg_ = Conv2dLayer<T>(cfg.gpn_head_channels, 4 * A, 1, 1, 0, rng);
    groi_conv_ = Conv2dLayer<T>(ch[2], ch[3], 3, 2, 1, rng);
    groi_reg_ = LinearLayer<T>(ch[3], 7, rng);
    groi_cls_ = LinearLayer<T>(ch[3], 2, rng);
    groi_score_ = LinearLayer<T>(ch[3], 1, rng);
    collect_params();
  }

  const ModelConfig& config() const { return cfg_; }

  struct BackboneOut {
    Var<T> feat;     // [N, C3, Hf, Wf]
    Var<T> cls_map;  // [N, 2A, Hf, Wf]
    Var<T> reg_map;  // [N, 4A, Hf, Wf]
  };

  // rgb: [N,3,H,W] normalized; depth: [N,1,H,W] normalized.
  BackboneOut forward_backbone(const Var<T>& rgb, const Var<T>& depth) const {
    const auto& rs = rgb->value.shape();
    const auto& ds = depth->value.shape();
    if (rs[0] != ds[0] || rs[2] != ds[2] || rs[3] != ds[3])
      throw std::invalid_argument("forward_backbone: modality size mismatch");

    Var<T> r1 = relu(rgb_.stage1(relu(rgb_.stem(rgb))));

    BackboneOut out;
    if (cfg_.rgb_only) {
      // depth stream zeroed: the fusion blocks see zero refined features
      Var<T> f1 = fuse_with_zero(lca1_, r1);
      Var<T> r2 = relu(rgb_.stage2(f1));
      Var<T> f2 = fuse_with_zero(lca2_, r2);
      Var<T> r3 = relu(rgb_.stage3(f2));
      out.feat = fuse_with_zero(lca3_, r3);
    } else {
      Var<T> x_depth = replicate_channels3(depth);
      Var<T> d1 = relu(depth_.stage1(relu(depth_.stem(x_depth))));
      Var<T> f1 = lca1_(r1, d1);
      Var<T> r2 = relu(rgb_.stage2(f1));
      Var<T> d2 = relu(depth_.stage2(d1));
      Var<T> f2 = lca2_(r2, d2);
      Var<T> r3 = relu(rgb_.stage3(f2));
      Var<T> d3 = relu(depth_.stage3(d2));
      out.feat = lca3_(r3, d3);
    }
    Var<T> g = relu(gpn_conv_(out.feat));
    out.cls_map = gpn_cls_(g);
    out.reg_map = gpn_reg_(g);
    return out;
  }

  BackboneOut forward_backbone(const Tensor<T>& rgb, const Tensor<T>& depth) const {
    return forward_backbone(make_const(rgb), make_const(depth));
  }

  struct GroiOut {
    Var<T> reg;    // [M, 7] (tu, tv, td, tw, th, tsin, tcos)
    Var<T> cls;    // [M, 2]
    Var<T> score;  // [M, 1], sigmoid
  };

  GroiOut forward_groi(const Var<T>& feat, const std::vector<RoiBox>& rois) const {
    Var<T> pooled = roi_align(feat, rois, cfg_.roi_size);
    Var<T> c4 = relu(groi_conv_(pooled));
    Var<T> flat = global_avg_pool(c4);
    GroiOut out;
    out.reg = groi_reg_(flat);
    out.cls = groi_cls_(flat);
    out.score = sigmoid(groi_score_(flat));
    return out;
  }

  ParamList<T>& parameters() { return params_; }
  const ParamList<T>& parameters() const { return params_; }

  // Regression component layout in GroiOut::reg rows.
  static constexpr int kTu = 0, kTv = 1, kTd = 2, kTw = 3, kTh = 4, kTsin = 5, kTcos = 6;

 private:
  struct Stream {
    Conv2dLayer<T> stem, stage1, stage2, stage3;
  };

  static Var<T> fuse_with_zero(const LcaBlock<T>& lca, const Var<T>& x_rgb) {
    Var<T> zeros = make_const(Tensor<T>(x_rgb->value.shape(), T(0)));
    return lca.fuse_proj(concat_channels(x_rgb, zeros));
  }

  void collect_params() {
    params_.clear();
    rgb_.stem.collect("rgb.stem", params_);
    rgb_.stage1.collect("rgb.stage1", params_);
    rgb_.stage2.collect("rgb.stage2", params_);
    rgb_.stage3.collect("rgb.stage3", params_);
    depth_.stem.collect("depth.stem", params_);
    depth_.stage1.collect("depth.stage1", params_);
    depth_.stage2.collect("depth.stage2", params_);
    depth_.stage3.collect("depth.stage3", params_);
    lca1_.collect("lca1", params_);
    lca2_.collect("lca2", params_);
    lca3_.collect("lca3", params_);
    gpn_conv_.collect("gpn.conv", params_);
    gpn_cls_.collect("gpn.cls", params_);
    gpn_reg_.collect("gpn.reg", params_);
    groi_conv_.collect("groi.conv", params_);
    groi_reg_.collect("groi.reg", params_);
    groi_cls_.collect("groi.cls", params_);
    groi_score_.collect("groi.score", params_);
  }

  ModelConfig cfg_;
  Stream rgb_, depth_;
  LcaBlock<T> lca1_, lca2_, lca3_;
  Conv2dLayer<T> gpn_conv_, gpn_cls_, gpn_reg_;
  Conv2dLayer<T> groi_conv_;
  LinearLayer<T> groi_reg_, groi_cls_, groi_score_;
  ParamList<T> params_;
};

// ---- loss assembly (Eq.-style two-stage objective) ----

template <class T>
struct StageLoss {
  Var<T> total;
  double cls_value = 0.0;
  double reg_value = 0.0;
  double score_value = 0.0;
};

// cls_logits: [N_cls, 2] sampled anchors; reg_pred: [N_reg, 4] positives.
// total = CE/N_cls + lambda1 * SL1/N_reg (reg term 0 when no positives).
template <class T>
StageLoss<T> gpn_loss(const Var<T>& cls_logits, const std::vector<int>& cls_labels,
                      const Var<T>* reg_pred, const Tensor<T>* reg_target,
                      double lambda1) {
  StageLoss<T> out;
  const int n_cls = cls_logits->value.dim(0);
  Var<T> cls = scale(softmax_ce_sum(cls_logits, cls_labels), T(1.0 / n_cls));
  out.cls_value = cls->value[0];
  out.total = cls;
  if (reg_pred && *reg_pred && reg_target && (*reg_pred)->value.size() > 0) {
    const int n_reg = (*reg_pred)->value.dim(0);
    Var<T> reg = scale(smooth_l1_sum(*reg_pred, *reg_target),
                       static_cast<T>(lambda1 / n_reg));
    out.reg_value = reg->value[0];
    out.total = add(out.total, reg);
  }
  return out;
}

// total = CE/M_cls + lambda2 * SL1(t)/M_reg + lambda3 * SL1(s)/M_reg.
template <class T>
StageLoss<T> groi_loss(const Var<T>& cls_logits, const std::vector<int>& cls_labels,
                       const Var<T>* reg_pred, const Tensor<T>* reg_target,
                       const Var<T>* score_pred, const Tensor<T>* score_target,
                       double lambda2, double lambda3) {
  StageLoss<T> out;
  const int m_cls = cls_logits->value.dim(0);
  Var<T> cls = scale(softmax_ce_sum(cls_logits, cls_labels), T(1.0 / m_cls));
  out.cls_value = cls->value[0];
  out.total = cls;
  if (reg_pred && *reg_pred && reg_target && (*reg_pred)->value.size() > 0) {
    const int m_reg = (*reg_pred)->value.dim(0);
    Var<T> reg = scale(smooth_l1_sum(*reg_pred, *reg_target),
                       static_cast<T>(lambda2 / m_reg));
    out.reg_value = reg->value[0];
    out.total = add(out.total, reg);
    if (score_pred && *score_pred && score_target) {
      Var<T> sc = scale(smooth_l1_sum(*score_pred, *score_target),
                        static_cast<T>(lambda3 / m_reg));
      out.score_value = sc->value[0];
      out.total = add(out.total, sc);
    }
  }
  return out;
}

template <class T>
Var<T> total_loss(const Var<T>& gpn_total, const Var<T>& groi_total) {
  return add(gpn_total, groi_total);
}

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 4.0;
};

}  // namespace dgcan::net
