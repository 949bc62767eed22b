#include "handpipe/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "handpipe/error.hpp"

namespace handpipe {

AnchorConfig AnchorConfig::defaults() {
  AnchorConfig cfg;
  cfg.input_size = 192;
  cfg.layers = {
      {8, {1.0, 1.4}},
      {16, {1.0, 1.26, 1.59, 2.0, 2.52, 3.17}},
  };
  return cfg;
}

int AnchorConfig::anchor_count() const {
  int total = 0;
  for (const auto& layer : layers) {
    int cells = input_size / layer.stride;
    total += cells * cells * static_cast<int>(layer.scales.size());
  }
  return total;
}

static void check_config(const AnchorConfig& config) {
  if (config.input_size <= 0) throw ConfigError("anchor config: input_size must be positive");
  for (const auto& layer : config.layers) {
    if (layer.stride <= 0 || config.input_size % layer.stride != 0) {
      throw ConfigError("anchor config: stride " + std::to_string(layer.stride) +
                        " does not divide input size " + std::to_string(config.input_size));
    }
    if (layer.scales.empty()) throw ConfigError("anchor config: layer without scales");
  }
}

std::vector<Anchor> generate_anchors(const AnchorConfig& config) {
  check_config(config);
  std::vector<Anchor> anchors;
  anchors.reserve(config.anchor_count());
  const double inv = 1.0 / config.input_size;
  for (const auto& layer : config.layers) {
    const int cells = config.input_size / layer.stride;
    for (int row = 0; row < cells; ++row) {
      for (int col = 0; col < cells; ++col) {
        const double cx = (col + 0.5) * layer.stride * inv;
        const double cy = (row + 0.5) * layer.stride * inv;
        for (double scale : layer.scales) {
          anchors.push_back({cx, cy, layer.stride * inv * scale});
        }
      }
    }
  }
  return anchors;
}

std::vector<AspectAnchor> generate_multi_aspect_anchors(const AnchorConfig& config,
                                                        const std::vector<double>& aspect_ratios) {
  check_config(config);
  if (aspect_ratios.empty()) throw ConfigError("aspect ratio list is empty");
  std::vector<AspectAnchor> anchors;
  for (const Anchor& a : generate_anchors(config)) {
    for (double r : aspect_ratios) {
      // Area-preserving: w/h = r, w*h = side^2.
      const double sq = std::sqrt(r);
      anchors.push_back({a.cx, a.cy, a.side * sq, a.side / sq});
    }
  }
  return anchors;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

static AxisAlignedBox square_box(double cx, double cy, double side) {
  const double h = 0.5 * side;
  return {cx - h, cy - h, cx + h, cy + h};
}

std::vector<Detection> decode_boxes(const RawDetectorOutput& raw,
                                    const std::vector<Anchor>& anchors,
                                    double score_threshold) {
  if (raw.logits.size() != anchors.size() || raw.boxes.size() != anchors.size() ||
      raw.keypoints.size() != anchors.size()) {
    throw std::invalid_argument("decode_boxes: raw output length does not match anchor count");
  }
  std::vector<Detection> dets;
  for (size_t i = 0; i < anchors.size(); ++i) {
    const double score = sigmoid(raw.logits[i]);
    if (score < score_threshold) continue;
    const Anchor& a = anchors[i];
    const auto& off = raw.boxes[i];
    Detection det;
    det.score = score;
    det.box = square_box(a.cx + off.dx * a.side, a.cy + off.dy * a.side, a.side * std::exp(off.ds));
    for (int k = 0; k < palm_kp::kNumKeypoints; ++k) {
      det.keypoints[k] = {a.cx + raw.keypoints[i][k].x * a.side,
                          a.cy + raw.keypoints[i][k].y * a.side};
    }
    dets.push_back(det);
  }
  return dets;
}

RawDetectorOutput::BoxOffsets encode_boxes(const Detection& gt, const Anchor& anchor) {
  if (anchor.side <= 0.0) throw std::invalid_argument("encode_boxes: zero-side anchor");
  const double side = gt.side();
  if (side <= 0.0) throw std::invalid_argument("encode_boxes: degenerate ground-truth box");
  const Vec2 c = gt.box.center();
  return {(c.x - anchor.cx) / anchor.side, (c.y - anchor.cy) / anchor.side,
          std::log(side / anchor.side)};
}

Vec2 encode_keypoint(const Vec2& point, const Anchor& anchor) {
  if (anchor.side <= 0.0) throw std::invalid_argument("encode_keypoint: zero-side anchor");
  return {(point.x - anchor.cx) / anchor.side, (point.y - anchor.cy) / anchor.side};
}

std::vector<Detection> non_max_suppression(const std::vector<Detection>& dets,
                                           double iou_threshold, NmsMode mode) {
  std::vector<size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  // Ties keep input order for determinism.
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return dets[a].score > dets[b].score; });

  std::vector<Detection> kept;
  std::vector<size_t> kept_idx;
  std::vector<std::vector<size_t>> absorbed;  // per kept detection, for blending
  for (size_t i : order) {
    bool suppressed = false;
    for (size_t k = 0; k < kept.size(); ++k) {
      if (box_iou(dets[i].box, kept[k].box) >= iou_threshold) {
        suppressed = true;
        if (mode == NmsMode::kBlend) absorbed[k].push_back(i);
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(dets[i]);
      kept_idx.push_back(i);
      absorbed.push_back({});
    }
  }

  if (mode == NmsMode::kBlend) {
    for (size_t k = 0; k < kept.size(); ++k) {
      double wsum = dets[kept_idx[k]].score;
      double cx = dets[kept_idx[k]].box.center().x * wsum;
      double cy = dets[kept_idx[k]].box.center().y * wsum;
      double side = dets[kept_idx[k]].side() * wsum;
      std::array<Vec2, palm_kp::kNumKeypoints> kps{};
      for (int j = 0; j < palm_kp::kNumKeypoints; ++j)
        kps[j] = dets[kept_idx[k]].keypoints[j] * wsum;
      for (size_t i : absorbed[k]) {
        const double w = dets[i].score;
        wsum += w;
        cx += dets[i].box.center().x * w;
        cy += dets[i].box.center().y * w;
        side += dets[i].side() * w;
        for (int j = 0; j < palm_kp::kNumKeypoints; ++j)
          kps[j] = kps[j] + dets[i].keypoints[j] * w;
      }
      kept[k].box = square_box(cx / wsum, cy / wsum, side / wsum);
      for (int j = 0; j < palm_kp::kNumKeypoints; ++j) kept[k].keypoints[j] = kps[j] * (1.0 / wsum);
    }
  }
  return kept;
}

double focal_loss(double p, int y, double alpha, double gamma) {
  constexpr double kEps = 1e-7;
  p = std::clamp(p, kEps, 1.0 - kEps);
  const double pt = (y == 1) ? p : 1.0 - p;
  return -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
}

}  // namespace handpipe
