#include "handpipe/backend.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "handpipe/error.hpp"
#include "handpipe/rng.hpp"

namespace handpipe {

const char* backend_tier_name(BackendTier tier) {
  switch (tier) {
    case BackendTier::kLight: return "light";
    case BackendTier::kFull: return "full";
    case BackendTier::kHeavy: return "heavy";
  }
  return "full";
}

BackendCapability BackendCapability::for_tier(BackendTier tier) {
  switch (tier) {
    case BackendTier::kLight: return {tier, 0.02, 0.02, 50};
    case BackendTier::kFull: return {tier, 0.01, 0.01, 150};
    case BackendTier::kHeavy: return {tier, 0.005, 0.005, 400};
  }
  return {BackendTier::kFull, 0.01, 0.01, 150};
}

BackendCapability BackendCapability::noiseless() {
  return {BackendTier::kFull, 0.0, 0.0, 0};
}

namespace {

void spin_for(int64_t cost_us) {
  if (cost_us <= 0) return;
  const auto until = std::chrono::steady_clock::now() + std::chrono::microseconds(cost_us);
  while (std::chrono::steady_clock::now() < until) {
  }
}

double presence_from_iou(double iou) {
  // Monotone in IoU: aligned crops (IoU >= 0.5) saturate near 1, everything
  // else stays at or below 0.1.
  if (iou >= 0.5) return 0.95 + 0.1 * (iou - 0.5);
  return 0.2 * iou;
}

uint64_t rect_hash(const OrientedRect& rect) {
  uint64_t h = bits_of(rect.cx);
  h = mix_u64(h, bits_of(rect.cy));
  h = mix_u64(h, bits_of(rect.w));
  h = mix_u64(h, bits_of(rect.h));
  h = mix_u64(h, bits_of(rect.theta));
  return h;
}

}  // namespace

OracleLandmarkBackend::OracleLandmarkBackend(BackendCapability capability, CropConfig crop,
                                             uint64_t seed)
    : capability_(capability), crop_(crop), seed_(seed) {}

HandLandmarks OracleLandmarkBackend::infer(const BackendRequest& request) const {
  if (request.rect.w <= 0.0 || request.rect.h <= 0.0) {
    throw std::invalid_argument("infer_landmarks: degenerate rect");
  }
  if (request.scene == nullptr) {
    throw std::invalid_argument("infer_landmarks: oracle request without scene handle");
  }
  spin_for(capability_.sim_cost_us);

  const auto projected = sim::project(*request.scene);
  const AxisAlignedBox request_bounds = rect_bounds(request.rect);

  // A crop counts as aligned when it matches either canonical framing of the
  // hand: the landmark-derived rect (tracking path) or the detection-style
  // rect around the palm (detector path).
  int best = -1;
  double best_iou = 0.0;
  for (size_t g = 0; g < projected.size(); ++g) {
    const auto& lm = projected[g].landmarks;
    const double lm_iou = box_iou(
        request_bounds, rect_bounds(rect_from_landmarks(lm, crop_.landmark_expand)));
    const double det_iou = box_iou(
        request_bounds,
        rect_bounds(rect_from_detection(projected[g].palm, crop_.detection_expand,
                                        crop_.detection_shift)));
    const double iou = std::max(lm_iou, det_iou);
    if (best < 0 || iou > best_iou) {
      best = static_cast<int>(g);
      best_iou = iou;
    }
  }

  if (best < 0) {
    // Empty scene: nothing to project; report an absent hand at the crop center.
    HandLandmarks lm;
    for (auto& p : lm.points) p = {request.rect.cx, request.rect.cy, 0.0};
    lm.presence = 0.0;
    lm.handedness = 0.5;
    return lm;
  }

  const CropTransform transform = make_crop_transform(request.rect);
  HandLandmarks lm = landmarks_to_crop_space(projected[best].landmarks, transform);

  Rng rng(mix_u64(seed_, mix_u64(static_cast<uint64_t>(request.t_us), rect_hash(request.rect))));
  if (capability_.noise_sigma > 0.0) {
    for (auto& p : lm.points) {
      p.x += rng.gaussian(0.0, capability_.noise_sigma);
      p.y += rng.gaussian(0.0, capability_.noise_sigma);
      p.z += rng.gaussian(0.0, capability_.noise_sigma);
    }
  }

  lm = landmarks_to_image_space(lm, transform);
  const double wrist_z = lm.points[topo::kWrist].z;
  for (auto& p : lm.points) p.z -= wrist_z;

  lm.presence = presence_from_iou(best_iou);
  const bool is_right = request.scene->hands[best].handedness == Handedness::kRight;
  double handedness = is_right ? 0.98 : 0.02;
  if (capability_.flip_probability > 0.0 && rng.uniform() < capability_.flip_probability) {
    handedness = 1.0 - handedness;
  }
  lm.handedness = handedness;
  return lm;
}

OraclePalmDetector::OraclePalmDetector(DetectorParams params, uint64_t seed)
    : params_(std::move(params)), anchors_(generate_anchors(params_.anchors)), seed_(seed) {}

std::vector<Detection> OraclePalmDetector::detect(const HandScene& scene) const {
  const RawDetectorOutput raw =
      sim::synthesize_raw_output(scene, anchors_, params_.noise_sigma, seed_);
  return non_max_suppression(decode_boxes(raw, anchors_, params_.score_threshold),
                             params_.iou_threshold, params_.nms);
}

FileRawPalmDetector::FileRawPalmDetector(std::map<int64_t, RawDetectorOutput> raw_by_timestamp,
                                         DetectorParams params)
    : raw_(std::move(raw_by_timestamp)),
      params_(std::move(params)),
      anchors_(generate_anchors(params_.anchors)) {}

std::vector<Detection> FileRawPalmDetector::detect(const HandScene& scene) const {
  auto it = raw_.find(scene.t_us);
  if (it == raw_.end()) {
    throw MismatchError("raw detector output missing for timestamp " +
                        std::to_string(scene.t_us));
  }
  return non_max_suppression(decode_boxes(it->second, anchors_, params_.score_threshold),
                             params_.iou_threshold, params_.nms);
}

}  // namespace handpipe
