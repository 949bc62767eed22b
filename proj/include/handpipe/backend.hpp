#ifndef HANDPIPE_BACKEND_HPP_
#define HANDPIPE_BACKEND_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "handpipe/crop.hpp"
#include "handpipe/detector.hpp"
#include "handpipe/simulator.hpp"
#include "handpipe/types.hpp"

namespace handpipe {

// Inference-backend contracts for the two model stages, plus oracle
// implementations driven by simulator ground truth. Oracles make the full
// pipeline runnable and verifiable without trained networks; trained models
// can be plugged in later through the raw-output file format.

enum class BackendTier : int { kLight = 0, kFull = 1, kHeavy = 2 };

const char* backend_tier_name(BackendTier tier);

// Simulated compute tier: noise falls and per-call cost rises from Light to
// Heavy. The numbers are synthetic; only the ordering is meaningful.
struct BackendCapability {
  BackendTier tier = BackendTier::kFull;
  double noise_sigma = 0.01;      // landmark noise, fraction of crop size
  double flip_probability = 0.01; // handedness flips
  int64_t sim_cost_us = 0;        // busy-wait per call

  static BackendCapability for_tier(BackendTier tier);
  static BackendCapability noiseless();
};

struct BackendRequest {
  OrientedRect rect;
  const HandScene* scene = nullptr;  // ground-truth handle, oracles only
  int64_t t_us = 0;
};

// Must be safe for concurrent calls from multiple graph nodes.
class LandmarkBackend {
 public:
  virtual ~LandmarkBackend() = default;
  virtual HandLandmarks infer(const BackendRequest& request) const = 0;
};

// Projects ground-truth joints into crop space, adds tier noise, and maps
// back. Presence reflects how well the request rect overlaps the hand rect
// (IoU >= 0.5 reads as aligned); handedness comes from the ground-truth
// label with a tier-dependent flip probability. Noise is derived from
// (seed, timestamp, rect bits) so results never depend on call order.
class OracleLandmarkBackend : public LandmarkBackend {
 public:
  OracleLandmarkBackend(BackendCapability capability, CropConfig crop, uint64_t seed);

  HandLandmarks infer(const BackendRequest& request) const override;

  const BackendCapability& capability() const { return capability_; }

 private:
  BackendCapability capability_;
  CropConfig crop_;
  uint64_t seed_;
};

class PalmDetector {
 public:
  virtual ~PalmDetector() = default;
  virtual std::vector<Detection> detect(const HandScene& scene) const = 0;
};

struct DetectorParams {
  AnchorConfig anchors = AnchorConfig::defaults();
  double score_threshold = 0.5;
  double iou_threshold = 0.3;
  NmsMode nms = NmsMode::kGreedy;
  double noise_sigma = 0.0;
};

// synthesize_raw_output -> decode_boxes -> non_max_suppression, sorted by
// score descending.
class OraclePalmDetector : public PalmDetector {
 public:
  OraclePalmDetector(DetectorParams params, uint64_t seed);

  std::vector<Detection> detect(const HandScene& scene) const override;

  const std::vector<Anchor>& anchors() const { return anchors_; }
  const DetectorParams& params() const { return params_; }

 private:
  DetectorParams params_;
  std::vector<Anchor> anchors_;
  uint64_t seed_;
};

// Decodes pre-recorded raw detector outputs keyed by timestamp (the plug-in
// path for external model dumps). Throws MismatchError on a missing frame.
class FileRawPalmDetector : public PalmDetector {
 public:
  FileRawPalmDetector(std::map<int64_t, RawDetectorOutput> raw_by_timestamp, DetectorParams params);

  std::vector<Detection> detect(const HandScene& scene) const override;

 private:
  std::map<int64_t, RawDetectorOutput> raw_;
  DetectorParams params_;
  std::vector<Anchor> anchors_;
};

}  // namespace handpipe

#endif  // HANDPIPE_BACKEND_HPP_
