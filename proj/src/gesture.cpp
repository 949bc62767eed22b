#include "handpipe/gesture.hpp"

#include <cmath>
#include <stdexcept>

namespace handpipe {

const char* gesture_label_name(GestureLabel label) {
  switch (label) {
    case GestureLabel::kOpenPalm: return "OPEN_PALM";
    case GestureLabel::kFist: return "FIST";
    case GestureLabel::kPointingUp: return "POINTING_UP";
    case GestureLabel::kVictory: return "VICTORY";
    case GestureLabel::kThumbsUp: return "THUMBS_UP";
    case GestureLabel::kOk: return "OK";
    case GestureLabel::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

std::optional<GestureLabel> gesture_label_from_name(const std::string& name) {
  for (GestureLabel l : {GestureLabel::kOpenPalm, GestureLabel::kFist, GestureLabel::kPointingUp,
                         GestureLabel::kVictory, GestureLabel::kThumbsUp, GestureLabel::kOk,
                         GestureLabel::kUnknown}) {
    if (name == gesture_label_name(l)) return l;
  }
  return std::nullopt;
}

GestureConfig GestureConfig::defaults() {
  constexpr auto S = FingerStateKind::kStraight;
  constexpr auto B = FingerStateKind::kBent;
  const std::optional<FingerStateKind> any = std::nullopt;

  GestureConfig cfg;
  cfg.rules = {
      {{S, S, S, S, S}, false, GestureLabel::kOpenPalm},
      {{B, B, B, B, B}, false, GestureLabel::kFist},
      {{B, S, B, B, B}, false, GestureLabel::kPointingUp},
      {{any, S, S, B, B}, false, GestureLabel::kVictory},
      {{S, B, B, B, B}, false, GestureLabel::kThumbsUp},
      {{any, any, S, S, S}, true, GestureLabel::kOk},
  };
  return cfg;
}

double accumulated_flexion(const HandLandmarks& lm, int finger, double aspect) {
  if (finger < 0 || finger >= topo::kNumFingers) {
    throw std::invalid_argument("accumulated_flexion: bad finger index");
  }
  const auto& chain = topo::kFingerChains[finger];
  double total = 0.0;
  Vec2 prev{};
  for (int seg = 0; seg < topo::kChainLength - 1; ++seg) {
    const auto& a = lm.points[chain[seg]];
    const auto& b = lm.points[chain[seg + 1]];
    const Vec2 bone{(b.x - a.x) * aspect, b.y - a.y};
    const double len = bone.norm();
    if (len < 1e-12) throw std::invalid_argument("accumulated_flexion: degenerate zero-length bone");
    if (seg > 0) {
      const double cosang = std::clamp(prev.dot(bone) / (prev.norm() * len), -1.0, 1.0);
      total += std::acos(cosang);
    }
    prev = bone;
  }
  return total * 180.0 / M_PI;
}

std::array<FingerState, topo::kNumFingers> finger_states(const HandLandmarks& lm,
                                                         const GestureConfig& config,
                                                         double aspect) {
  std::array<FingerState, topo::kNumFingers> states{};
  for (int f = 0; f < topo::kNumFingers; ++f) {
    const double deg = accumulated_flexion(lm, f, aspect);
    const double straight_max =
        f == topo::kThumb ? config.thumb_straight_max_deg : config.straight_max_deg;
    FingerStateKind kind = FingerStateKind::kUnknown;
    if (deg < straight_max) {
      kind = FingerStateKind::kStraight;
    } else if (deg > config.bent_min_deg) {
      kind = FingerStateKind::kBent;
    }
    states[f] = {kind, deg};
  }
  return states;
}

namespace {

bool pinch_close(const HandLandmarks& lm, double max_fraction, double aspect) {
  auto at = [&](int i) { return Vec2{lm.points[i].x * aspect, lm.points[i].y}; };
  const double hand_size = (at(topo::kMiddleMcp) - at(topo::kWrist)).norm();
  if (hand_size < 1e-12) return false;
  const double d = (at(topo::kThumbTip) - at(topo::kIndexTip)).norm();
  return d < max_fraction * hand_size;
}

}  // namespace

GestureLabel classify_gesture(const std::array<FingerState, topo::kNumFingers>& states,
                              const HandLandmarks& lm, const GestureConfig& config,
                              double aspect) {
  for (const auto& s : states) {
    if (s.state == FingerStateKind::kUnknown) return GestureLabel::kUnknown;
  }
  for (const auto& rule : config.rules) {
    bool match = true;
    for (int f = 0; f < topo::kNumFingers; ++f) {
      if (rule.pattern[f].has_value() && states[f].state != *rule.pattern[f]) {
        match = false;
        break;
      }
    }
    if (match && rule.require_pinch && !pinch_close(lm, config.pinch_max_fraction, aspect)) {
      match = false;
    }
    if (match) return rule.label;
  }
  return GestureLabel::kUnknown;
}

GestureLabel recognize_gesture(const HandLandmarks& lm, const GestureConfig& config,
                               double aspect) {
  return classify_gesture(finger_states(lm, config, aspect), lm, config, aspect);
}

}  // namespace handpipe
