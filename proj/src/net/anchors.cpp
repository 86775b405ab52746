#include "dgcan/net/anchors.hpp"

#include <algorithm>
#include <cmath>

namespace dgcan::net {

std::vector<core::AnchorBox> generate_anchors(int feat_h, int feat_w,
                                              const AnchorConfig& cfg) {
  std::vector<core::AnchorBox> out;
  out.reserve(static_cast<std::size_t>(feat_h) * feat_w * cfg.per_cell());
  for (int y = 0; y < feat_h; ++y)
    for (int x = 0; x < feat_w; ++x) {
      const double cu = x * cfg.stride + (cfg.stride - 1) / 2.0;
      const double cv = y * cfg.stride + (cfg.stride - 1) / 2.0;
      for (double ratio : cfg.ratios)
        for (double scale : cfg.scales) {
          core::AnchorBox a;
          a.u = cu;
          a.v = cv;
          a.w = scale * std::sqrt(ratio);
          a.h = scale / std::sqrt(ratio);
          out.push_back(a);
        }
    }
  return out;
}

namespace {

struct BestMatch {
  double best_iou = 0.0;
  int chosen_gt = -1;  // candidate above pos threshold with highest score
  double chosen_iou = 0.0;
};

BestMatch match_one(const core::AnchorBox& box,
                    const std::vector<core::AnchorBox>& gt_boxes,
                    const std::vector<core::PlanarGrasp>& gts, double pos_iou) {
  BestMatch m;
  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    const double iou = core::aligned_iou(box, gt_boxes[g]);
    m.best_iou = std::max(m.best_iou, iou);
    if (iou < pos_iou) continue;
    const double score = gts[g].score.value_or(0.0);
    bool better = false;
    if (m.chosen_gt < 0) {
      better = true;
    } else {
      const double cur = gts[m.chosen_gt].score.value_or(0.0);
      if (score > cur) better = true;
      else if (score == cur && iou > m.chosen_iou) better = true;
    }
    if (better) {
      m.chosen_gt = static_cast<int>(g);
      m.chosen_iou = iou;
    }
  }
  return m;
}

}  // namespace

GpnAssignment assign_gpn_targets(const std::vector<core::AnchorBox>& anchors,
                                 const std::vector<core::PlanarGrasp>& gts,
                                 double pos_iou, double neg_iou) {
  GpnAssignment out;
  out.label.assign(anchors.size(), MatchLabel::kNegative);
  out.gt_index.assign(anchors.size(), -1);
  out.target.assign(anchors.size(), {});

  std::vector<core::AnchorBox> gt_boxes(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) gt_boxes[g] = core::aabb_of(gts[g]);

  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const BestMatch m = match_one(anchors[a], gt_boxes, gts, pos_iou);
    if (m.chosen_gt >= 0) {
      out.label[a] = MatchLabel::kPositive;
      out.gt_index[a] = m.chosen_gt;
      out.target[a] = core::encode_gpn_offsets(gt_boxes[m.chosen_gt], anchors[a]);
    } else if (m.best_iou < neg_iou) {
      out.label[a] = MatchLabel::kNegative;
    } else {
      out.label[a] = MatchLabel::kIgnore;
    }
  }
  return out;
}

GroiAssignment assign_groi_targets(const std::vector<core::AnchorBox>& proposals,
                                   const std::vector<core::PlanarGrasp>& gts,
                                   const DepthImage& preprocessed_depth,
                                   double pos_iou, double neg_lo) {
  GroiAssignment out;
  out.label.assign(proposals.size(), MatchLabel::kNegative);
  out.gt_index.assign(proposals.size(), -1);
  out.target.assign(proposals.size(), {});
  out.score_target.assign(proposals.size(), 0.0);
  out.d_o.assign(proposals.size(), 0.0);

  std::vector<core::AnchorBox> gt_boxes(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) gt_boxes[g] = core::aabb_of(gts[g]);

  for (std::size_t p = 0; p < proposals.size(); ++p) {
    const int px = std::clamp(static_cast<int>(std::lround(proposals[p].u)), 0,
                              preprocessed_depth.width() - 1);
    const int py = std::clamp(static_cast<int>(std::lround(proposals[p].v)), 0,
                              preprocessed_depth.height() - 1);
    const double d_o = preprocessed_depth(py, px);
    out.d_o[p] = d_o;

    const BestMatch m = match_one(proposals[p], gt_boxes, gts, pos_iou);
    if (m.chosen_gt >= 0) {
      if (d_o <= 0.0) {  // unfilled hole: no usable reference depth
        out.label[p] = MatchLabel::kIgnore;
        continue;
      }
      const auto& gt = gts[m.chosen_gt];
      out.label[p] = MatchLabel::kPositive;
      out.gt_index[p] = m.chosen_gt;
      const core::GpnTarget box_t = core::encode_gpn_offsets(
          core::AnchorBox{gt.u, gt.v, gt.w, gt.h}, proposals[p]);
      core::GroiTarget t;
      t.tu = box_t.tu;
      t.tv = box_t.tv;
      t.tw = box_t.tw;
      t.th = box_t.th;
      core::encode_angle(gt.theta, t.tsin, t.tcos);
      t.td = core::encode_depth(gt.d, d_o);
      out.target[p] = t;
      out.score_target[p] = gt.score.value_or(0.0);
    } else if (m.best_iou >= neg_lo && m.best_iou < pos_iou) {
      out.label[p] = MatchLabel::kNegative;
    } else {
      out.label[p] = MatchLabel::kIgnore;
    }
  }
  return out;
}

std::vector<int> aligned_nms(const std::vector<core::AnchorBox>& boxes,
                             const std::vector<double>& scores, double iou_thresh,
                             int max_keep) {
  std::vector<int> order(boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::vector<int> kept;
  for (int idx : order) {
    bool suppressed = false;
    for (int k : kept) {
      if (core::aligned_iou(boxes[idx], boxes[k]) > iou_thresh) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(idx);
      if (static_cast<int>(kept.size()) >= max_keep) break;
    }
  }
  return kept;
}

core::AnchorBox clip_box(const core::AnchorBox& box, int width, int height) {
  double x0 = std::clamp(box.u - box.w / 2, 0.0, static_cast<double>(width - 1));
  double x1 = std::clamp(box.u + box.w / 2, 0.0, static_cast<double>(width - 1));
  double y0 = std::clamp(box.v - box.h / 2, 0.0, static_cast<double>(height - 1));
  double y1 = std::clamp(box.v + box.h / 2, 0.0, static_cast<double>(height - 1));
  core::AnchorBox out;
  out.u = (x0 + x1) / 2;
  out.v = (y0 + y1) / 2;
  out.w = std::max(x1 - x0, 1.0);
  out.h = std::max(y1 - y0, 1.0);
  return out;
}

}  // namespace dgcan::net
