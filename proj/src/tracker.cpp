#include "handpipe/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace handpipe {

namespace {

double camera_aspect(const HandScene& frame) {
  if (frame.camera.width <= 0.0 || frame.camera.height <= 0.0) return 1.0;
  return frame.camera.width / frame.camera.height;
}

}  // namespace

StepPhase1 track_phase1(const TrackerState& state, const HandScene& frame,
                        const LandmarkBackend& backend) {
  const TrackerConfig& cfg = state.config;

  StepPhase1 p1;
  p1.state = state;
  p1.state.hands.clear();
  p1.state.probes.clear();
  p1.scene = frame;
  p1.aspect = camera_aspect(frame);
  p1.report.t_us = frame.t_us;

  int dropped = 0;
  for (const TrackedHand& hand : state.hands) {
    const HandLandmarks lm = backend.infer({hand.rect, &frame, frame.t_us});
    if (lm.presence < cfg.presence_threshold) {
      ++dropped;
      p1.state.probes.push_back({hand.id, hand.rect, 0});
      continue;
    }
    TrackedHand next = hand;
    next.last_landmarks = lm;
    next.rect = rect_from_landmarks(lm, cfg.crop.landmark_expand);
    next.age = hand.age + 1;
    p1.state.hands.push_back(next);
    p1.report.outputs.push_back({hand.id, lm, recognize_gesture(lm, cfg.gesture, p1.aspect)});
  }

  for (const LostProbe& probe : state.probes) {
    const HandLandmarks lm = backend.infer({probe.rect, &frame, frame.t_us});
    if (lm.presence >= cfg.presence_threshold) {
      p1.probe_recovered = true;  // probe retires; the detector re-acquires
      continue;
    }
    if (probe.age + 1 < cfg.probe_max_age) {
      p1.state.probes.push_back({probe.id, probe.rect, probe.age + 1});
    }
  }

  p1.report.hands_dropped = dropped;

  bool need = false;
  if (!cfg.gating) {
    need = true;
  } else {
    if (state.frame_index == 0) need = true;
    if (dropped > 0) need = true;
    if (p1.probe_recovered) need = true;
    if (p1.state.hands.empty() && p1.state.probes.empty()) need = true;
    if (cfg.redetect_interval > 0 && static_cast<int>(p1.state.hands.size()) < cfg.max_hands &&
        state.frames_since_detector >= 0 &&
        state.frames_since_detector + 1 >= cfg.redetect_interval) {
      need = true;
    }
  }
  p1.detector_need = need;
  return p1;
}

std::pair<TrackerState, TrackStepReport> track_phase2(
    StepPhase1 phase1, const std::optional<std::vector<Detection>>& detections,
    const LandmarkBackend& backend) {
  TrackerState state = std::move(phase1.state);
  TrackStepReport report = std::move(phase1.report);
  const TrackerConfig& cfg = state.config;

  report.detector_ran = detections.has_value();

  if (detections.has_value()) {
    const Association assoc =
        associate(*detections, state.hands, cfg.association_iou, cfg.crop);
    for (int det_index : assoc.unmatched_detections) {
      if (static_cast<int>(state.hands.size()) >= cfg.max_hands) break;
      const OrientedRect rect = rect_from_detection(
          (*detections)[det_index], cfg.crop.detection_expand, cfg.crop.detection_shift);
      const HandLandmarks lm = backend.infer({rect, &phase1.scene, phase1.scene.t_us});
      if (lm.presence < cfg.presence_threshold) continue;  // spurious detection

      TrackedHand hand;
      hand.id = state.next_id++;
      hand.last_landmarks = lm;
      hand.rect = rect_from_landmarks(lm, cfg.crop.landmark_expand);
      hand.age = 1;
      state.hands.push_back(hand);
      report.outputs.push_back({hand.id, lm, recognize_gesture(lm, cfg.gesture, phase1.aspect)});
      ++report.hands_added;
    }
  }

  state.frame_index += 1;
  state.frames_since_detector = report.detector_ran ? 0
                                : state.frames_since_detector >= 0
                                    ? state.frames_since_detector + 1
                                    : -1;
  return {std::move(state), std::move(report)};
}

std::pair<TrackerState, TrackStepReport> track_step(const TrackerState& state,
                                                    const HandScene& frame,
                                                    const LandmarkBackend& backend,
                                                    const PalmDetector& detector) {
  StepPhase1 p1 = track_phase1(state, frame, backend);
  std::optional<std::vector<Detection>> detections;
  if (p1.detector_need) detections = detector.detect(frame);
  return track_phase2(std::move(p1), detections, backend);
}

Association associate(const std::vector<Detection>& detections,
                      const std::vector<TrackedHand>& hands, double iou_threshold,
                      const CropConfig& crop) {
  Association out;

  std::vector<AxisAlignedBox> det_bounds;
  det_bounds.reserve(detections.size());
  for (const Detection& det : detections) {
    det_bounds.push_back(
        rect_bounds(rect_from_detection(det, crop.detection_expand, crop.detection_shift)));
  }
  // Tracked hands are compared through the same palm-style rect so the match
  // is pose-independent (a fist's landmark rect is much tighter than its
  // detection rect).
  std::vector<AxisAlignedBox> hand_bounds;
  hand_bounds.reserve(hands.size());
  for (const TrackedHand& hand : hands) {
    hand_bounds.push_back(rect_bounds(
        rect_from_detection(palm_detection_from_landmarks(hand.last_landmarks),
                            crop.detection_expand, crop.detection_shift)));
  }

  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> hand_used(hands.size(), false);
  while (true) {
    double best = -1.0;
    int best_det = -1, best_hand = -1;
    for (size_t d = 0; d < detections.size(); ++d) {
      if (det_used[d]) continue;
      for (size_t h = 0; h < hands.size(); ++h) {
        if (hand_used[h]) continue;
        const double iou = box_iou(det_bounds[d], hand_bounds[h]);
        if (iou >= iou_threshold && iou > best) {
          best = iou;
          best_det = static_cast<int>(d);
          best_hand = static_cast<int>(h);
        }
      }
    }
    if (best_det < 0) break;
    det_used[best_det] = true;
    hand_used[best_hand] = true;
    out.matches.emplace_back(best_det, best_hand);
  }

  for (size_t d = 0; d < detections.size(); ++d) {
    if (!det_used[d]) out.unmatched_detections.push_back(static_cast<int>(d));
  }
  return out;
}

}  // namespace handpipe
