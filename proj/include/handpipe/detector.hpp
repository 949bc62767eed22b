#ifndef HANDPIPE_DETECTOR_HPP_
#define HANDPIPE_DETECTOR_HPP_

#include <vector>

#include "handpipe/types.hpp"

namespace handpipe {

// SSD-style detection geometry for square palm boxes: anchor grid
// generation, raw-output decoding, greedy NMS and a focal-loss utility.

// Square prior box. Side is a fixed fraction of the layer stride scaled by
// the per-cell scale ladder.
struct Anchor {
  double cx = 0.0;   // normalized center
  double cy = 0.0;
  double side = 0.0; // normalized length
};

struct AnchorLayer {
  int stride = 0;                // pixels; must divide input_size
  std::vector<double> scales;    // one anchor per cell per scale
};

struct AnchorConfig {
  int input_size = 192;  // square input, pixels
  std::vector<AnchorLayer> layers;

  // Stride-8 and stride-16 ladder spanning roughly a 20x box-size range.
  static AnchorConfig defaults();

  int anchor_count() const;
};

// Stand-in for the detector network's output tensors: one logit plus box and
// keypoint offsets per anchor, all in anchor-relative units.
struct RawDetectorOutput {
  struct BoxOffsets {
    double dx = 0.0;
    double dy = 0.0;
    double ds = 0.0;  // log-scale
  };

  std::vector<double> logits;
  std::vector<BoxOffsets> boxes;
  std::vector<std::array<Vec2, palm_kp::kNumKeypoints>> keypoints;

  void resize(size_t n) {
    logits.assign(n, 0.0);
    boxes.assign(n, {});
    keypoints.assign(n, {});
  }
  size_t size() const { return logits.size(); }
};

enum class NmsMode { kGreedy, kBlend };

// Row-major per layer: cells ordered by row then column, then by scale
// within the cell. Cell centers sit at ((col+.5)*stride, (row+.5)*stride).
// Throws ConfigError when a stride does not divide input_size.
std::vector<Anchor> generate_anchors(const AnchorConfig& config);

// Same grid replicated over a list of aspect ratios; exists to make the
// square-only anchor-count reduction an exact arithmetic identity.
struct AspectAnchor {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};
std::vector<AspectAnchor> generate_multi_aspect_anchors(const AnchorConfig& config,
                                                        const std::vector<double>& aspect_ratios);

// score = sigmoid(logit); center = anchor + (dx,dy)*side; side = side*exp(ds);
// keypoints decoded the same way. Entries below score_threshold are dropped.
// Throws std::invalid_argument on length mismatch.
std::vector<Detection> decode_boxes(const RawDetectorOutput& raw,
                                    const std::vector<Anchor>& anchors,
                                    double score_threshold);

// Inverse of the box part of decode_boxes; decode(encode(gt)) == gt within 1e-9.
// Throws std::invalid_argument on a zero-side anchor.
RawDetectorOutput::BoxOffsets encode_boxes(const Detection& gt, const Anchor& anchor);

// Keypoint analogue of encode_boxes.
Vec2 encode_keypoint(const Vec2& point, const Anchor& anchor);

// Greedy suppression: sort by score descending (stable on ties), keep a
// detection iff its IoU with every kept detection is below iou_threshold.
// kBlend additionally score-averages each kept box with the detections it
// suppressed.
std::vector<Detection> non_max_suppression(const std::vector<Detection>& dets,
                                           double iou_threshold,
                                           NmsMode mode = NmsMode::kGreedy);

// FL(p_t) = -alpha * (1 - p_t)^gamma * log(p_t) with p_t = p if y==1 else
// 1-p, p clamped to [1e-7, 1-1e-7]. gamma=0, alpha=1 is plain cross entropy.
double focal_loss(double p, int y, double alpha = 0.25, double gamma = 2.0);

double sigmoid(double x);
double logit(double p);

}  // namespace handpipe

#endif  // HANDPIPE_DETECTOR_HPP_
