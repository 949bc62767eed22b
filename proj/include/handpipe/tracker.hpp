#ifndef HANDPIPE_TRACKER_HPP_
#define HANDPIPE_TRACKER_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "handpipe/backend.hpp"
#include "handpipe/crop.hpp"
#include "handpipe/gesture.hpp"
#include "handpipe/types.hpp"

namespace handpipe {

// Detector-gating tracker: the palm detector runs on the first frame, when a
// tracked hand is lost, or when a lost hand's probe rect sees the hand again;
// otherwise each hand's crop comes from its previous-frame landmarks.
//
// When a hand drops below the presence threshold its last rect stays behind
// as a probe. Probes keep receiving landmark inference; a probe whose
// presence recovers triggers a detector pass to formally re-acquire the
// hand. With no hands and no probes the tracker scans: the detector runs
// every frame until something is found.

struct TrackerConfig {
  int max_hands = 2;
  double presence_threshold = 0.5;
  double association_iou = 0.5;  // on axis-aligned bounds of oriented rects
  int redetect_interval = 0;     // opt-in periodic refresh while below capacity; 0 = never
  int probe_max_age = 90;        // frames a lost hand's rect keeps being probed
  bool gating = true;            // false = detector every frame
  CropConfig crop;
  GestureConfig gesture = GestureConfig::defaults();
};

struct TrackedHand {
  int id = 0;
  OrientedRect rect;  // crop for the next frame
  HandLandmarks last_landmarks;
  int age = 0;  // frames tracked
};

struct LostProbe {
  int id = 0;
  OrientedRect rect;
  int age = 0;
};

struct TrackerState {
  TrackerConfig config;
  std::vector<TrackedHand> hands;
  std::vector<LostProbe> probes;
  int64_t frame_index = 0;
  int next_id = 0;
  int64_t frames_since_detector = -1;  // -1 = detector never ran

  static TrackerState initial(TrackerConfig config) {
    TrackerState s;
    s.config = std::move(config);
    return s;
  }
};

struct TrackedOutput {
  int id = 0;
  HandLandmarks landmarks;
  GestureLabel gesture = GestureLabel::kUnknown;
};

struct TrackStepReport {
  int64_t t_us = 0;
  bool detector_ran = false;
  int hands_added = 0;
  int hands_dropped = 0;
  std::vector<TrackedOutput> outputs;
};

// Landmark-stage half of a tracking step: per-hand and per-probe inference,
// drop handling, next-frame rects, and the detector gating decision. The
// scene is carried by value so the result is self-contained.
struct StepPhase1 {
  TrackerState state;      // survivors and surviving probes applied
  TrackStepReport report;  // survivor outputs; detector_ran not yet set
  bool detector_need = false;
  bool probe_recovered = false;
  double aspect = 1.0;  // camera aspect, for gesture angles
  HandScene scene;
};

StepPhase1 track_phase1(const TrackerState& state, const HandScene& frame,
                        const LandmarkBackend& backend);

// Detector-merge half: associates detections with tracked hands, spawns new
// tracks for unmatched ones, and finalizes counters. detections is empty
// when the detector was gated off this step.
std::pair<TrackerState, TrackStepReport> track_phase2(
    StepPhase1 phase1, const std::optional<std::vector<Detection>>& detections,
    const LandmarkBackend& backend);

// phase1 + detector-if-needed + phase2. Failures propagate with the input
// state untouched.
std::pair<TrackerState, TrackStepReport> track_step(const TrackerState& state,
                                                    const HandScene& frame,
                                                    const LandmarkBackend& backend,
                                                    const PalmDetector& detector);

// Greedy best-IoU matching between detection-derived rects and tracked
// rects; unmatched detections are flagged new.
struct Association {
  std::vector<std::pair<int, int>> matches;  // (detection index, hand index)
  std::vector<int> unmatched_detections;
};

Association associate(const std::vector<Detection>& detections,
                      const std::vector<TrackedHand>& hands, double iou_threshold,
                      const CropConfig& crop = CropConfig{});

}  // namespace handpipe

#endif  // HANDPIPE_TRACKER_HPP_
