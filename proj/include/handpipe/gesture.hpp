#ifndef HANDPIPE_GESTURE_HPP_
#define HANDPIPE_GESTURE_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "handpipe/types.hpp"

namespace handpipe {

// Static gesture recognition: per-finger state from accumulated joint angles
// in 2D, then a finger-state pattern lookup.

enum class FingerStateKind : int { kStraight = 0, kBent = 1, kUnknown = 2 };

struct FingerState {
  FingerStateKind state = FingerStateKind::kUnknown;
  double flexion_deg = 0.0;  // accumulated bend along the chain
};

enum class GestureLabel : int {
  kOpenPalm = 0,
  kFist,
  kPointingUp,
  kVictory,
  kThumbsUp,
  kOk,
  kUnknown,
};

const char* gesture_label_name(GestureLabel label);
std::optional<GestureLabel> gesture_label_from_name(const std::string& name);

// One row of the pattern table. Per-finger requirement: Straight, Bent, or
// "any" (nullopt). require_pinch adds the thumb-tip-to-index-tip distance
// test used by the OK sign.
struct GestureRule {
  std::array<std::optional<FingerStateKind>, topo::kNumFingers> pattern{};
  bool require_pinch = false;
  GestureLabel label = GestureLabel::kUnknown;
};

struct GestureConfig {
  double straight_max_deg = 60.0;
  double bent_min_deg = 120.0;
  double thumb_straight_max_deg = 80.0;  // thumb chains are never collinear
  double pinch_max_fraction = 0.2;       // of hand size (wrist to middle MCP)
  std::vector<GestureRule> rules;        // first match wins

  static GestureConfig defaults();
};

// Sum over the chain's interior joints of the angle between successive bone
// directions, computed on x,y only, in [0, 540) degrees. aspect rescales x
// before measuring so anisotropic normalized coordinates can be corrected
// (pass image width/height). Throws on a degenerate zero-length bone.
double accumulated_flexion(const HandLandmarks& lm, int finger, double aspect = 1.0);

std::array<FingerState, topo::kNumFingers> finger_states(const HandLandmarks& lm,
                                                         const GestureConfig& config = GestureConfig::defaults(),
                                                         double aspect = 1.0);

// Pattern lookup over the config rules; any Unknown finger state yields
// kUnknown. Total and deterministic.
GestureLabel classify_gesture(const std::array<FingerState, topo::kNumFingers>& states,
                              const HandLandmarks& lm,
                              const GestureConfig& config = GestureConfig::defaults(),
                              double aspect = 1.0);

GestureLabel recognize_gesture(const HandLandmarks& lm,
                               const GestureConfig& config = GestureConfig::defaults(),
                               double aspect = 1.0);

}  // namespace handpipe

#endif  // HANDPIPE_GESTURE_HPP_
