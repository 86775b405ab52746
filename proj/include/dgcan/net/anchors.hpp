#pragma once

#include <cstdint>
#include <vector>

#include "dgcan/common/image.hpp"
#include "dgcan/core/grasp.hpp"

namespace dgcan::net {

struct AnchorConfig {
  std::vector<double> ratios = {0.5, 1.0, 2.0};        // w/h
  std::vector<double> scales = {32.0, 64.0, 128.0, 256.0};  // sqrt(area), pixels
  int stride = 16;
  int per_cell() const { return static_cast<int>(ratios.size() * scales.size()); }
};

// One anchor set per feature cell, centered on the cell's image coordinate.
// Index layout: ((y * W + x) * ratios + ri) * scales + si.
std::vector<core::AnchorBox> generate_anchors(int feat_h, int feat_w,
                                              const AnchorConfig& cfg);

enum class MatchLabel : std::int8_t { kNegative = 0, kPositive = 1, kIgnore = -1 };

struct GpnAssignment {
  std::vector<MatchLabel> label;
  std::vector<int> gt_index;            // valid where positive
  std::vector<core::GpnTarget> target;  // valid where positive
};

// IoU is computed between the anchor and the axis-aligned enclosing box of
// each rotated ground truth. Among candidates above the positive threshold
// the GT with the highest grasp score wins (ties: larger IoU, then lower
// label index). Anchors whose best IoU falls below the negative threshold
// become negatives; everything else is ignored.
GpnAssignment assign_gpn_targets(const std::vector<core::AnchorBox>& anchors,
                                 const std::vector<core::PlanarGrasp>& gts,
                                 double pos_iou = 0.5, double neg_iou = 0.3);

struct GroiAssignment {
  std::vector<MatchLabel> label;
  std::vector<int> gt_index;
  std::vector<core::GroiTarget> target;   // valid where positive
  std::vector<double> score_target;       // valid where positive
  std::vector<double> d_o;                // reference depth at proposal center
};

// Same matching rule as GPN; positives regress the rotated rectangle
// (center/size against the proposal box), the sin/cos angle pair and the
// depth offset against the hole-filled reference depth at the proposal
// center. Negatives are proposals with best IoU in [neg_lo, pos_iou).
GroiAssignment assign_groi_targets(const std::vector<core::AnchorBox>& proposals,
                                   const std::vector<core::PlanarGrasp>& gts,
                                   const DepthImage& preprocessed_depth,
                                   double pos_iou = 0.5, double neg_lo = 0.1);

// Greedy axis-aligned NMS over decoded boxes sorted by score; returns kept
// indices, at most max_keep.
std::vector<int> aligned_nms(const std::vector<core::AnchorBox>& boxes,
                             const std::vector<double>& scores, double iou_thresh,
                             int max_keep);

// Clips a center/size box so it stays inside the image bounds.
core::AnchorBox clip_box(const core::AnchorBox& box, int width, int height);

}  // namespace dgcan::net
