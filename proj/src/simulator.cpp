#include "handpipe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "handpipe/crop.hpp"
#include "handpipe/error.hpp"
#include "handpipe/rng.hpp"

namespace handpipe::sim {

namespace {

constexpr double kDeg = M_PI / 180.0;

JointLimits finger_mcp_limits() { return {-10 * kDeg, 110 * kDeg, -15 * kDeg, 15 * kDeg}; }
JointLimits finger_pip_limits() { return {0.0, 115 * kDeg, 0.0, 0.0}; }
JointLimits finger_dip_limits() { return {0.0, 90 * kDeg, 0.0, 0.0}; }

FingerGeometry make_finger(Vec3 base, std::array<double, 3> bones) {
  return {base, bones, {finger_mcp_limits(), finger_pip_limits(), finger_dip_limits()}};
}

}  // namespace

const HandModel& HandModel::average_adult() {
  static const HandModel model = [] {
    HandModel m;
    // Segment lengths in meters, rounded from adult-hand anthropometry.
    m.fingers[topo::kThumb] = {{-0.028, -0.025, 0.0},
                               {0.046, 0.032, 0.026},
                               {{{-10 * kDeg, 60 * kDeg, -10 * kDeg, 40 * kDeg},
                                 {0.0, 70 * kDeg, 0.0, 0.0},
                                 {0.0, 90 * kDeg, 0.0, 0.0}}}};
    m.fingers[topo::kIndex] = make_finger({-0.024, -0.088, 0.0}, {0.045, 0.025, 0.022});
    m.fingers[topo::kMiddle] = make_finger({0.0, -0.092, 0.0}, {0.049, 0.028, 0.023});
    m.fingers[topo::kRing] = make_finger({0.022, -0.086, 0.0}, {0.045, 0.027, 0.023});
    m.fingers[topo::kPinky] = make_finger({0.042, -0.076, 0.0}, {0.036, 0.021, 0.020});
    m.palm_width = 0.085;
    m.thumb_opposition = 50 * kDeg;
    return m;
  }();
  return model;
}

const char* pose_family_name(PoseFamily family) {
  switch (family) {
    case PoseFamily::kOpen: return "open";
    case PoseFamily::kFist: return "fist";
    case PoseFamily::kPoint: return "point";
    case PoseFamily::kVictory: return "victory";
    case PoseFamily::kThumbsUp: return "thumbs_up";
    case PoseFamily::kOk: return "ok";
    case PoseFamily::kRandom: return "random";
  }
  return "random";
}

std::optional<PoseFamily> pose_family_from_name(const std::string& name) {
  for (PoseFamily f : {PoseFamily::kOpen, PoseFamily::kFist, PoseFamily::kPoint,
                       PoseFamily::kVictory, PoseFamily::kThumbsUp, PoseFamily::kOk,
                       PoseFamily::kRandom}) {
    if (name == pose_family_name(f)) return f;
  }
  return std::nullopt;
}

static void check_limit(double value, double lo, double hi, const char* what) {
  constexpr double kTol = 1e-9;
  if (value < lo - kTol || value > hi + kTol) {
    throw std::invalid_argument(std::string("pose outside joint limits: ") + what);
  }
}

std::array<Vec3, topo::kNumLandmarks> forward_kinematics(const HandModel& model,
                                                         const PoseParams& pose) {
  std::array<Vec3, topo::kNumLandmarks> joints{};
  joints[topo::kWrist] = {0.0, 0.0, 0.0};

  for (int f = 0; f < topo::kNumFingers; ++f) {
    const FingerGeometry& geo = model.fingers[f];
    const FingerPose& fp = pose.fingers[f];
    check_limit(fp.abduction, geo.limits[0].abd_min, geo.limits[0].abd_max, "abduction");
    for (int j = 0; j < 3; ++j) {
      check_limit(fp.flexion[j], geo.limits[j].flex_min, geo.limits[j].flex_max, "flexion");
    }

    // Chain frame: y along the rest direction, z the flexion target, x the
    // abduction axis. Bases lie in the palm plane, so y and the palm normal
    // are exactly orthogonal. The thumb's flexion plane is tilted about the
    // bone axis so its tip sweeps across the palm toward the fingertips.
    const Vec3 yhat = geo.base.normalized();
    const Vec3 palm_normal{0.0, 0.0, -1.0};
    Vec3 zhat = palm_normal;
    if (f == topo::kThumb && model.thumb_opposition != 0.0) {
      const Vec3 side = yhat.cross(palm_normal);
      zhat = palm_normal * std::cos(model.thumb_opposition) +
             side * std::sin(model.thumb_opposition);
    }
    const Vec3 xhat = yhat.cross(zhat);
    Mat3 frame = Mat3::from_columns(xhat, yhat, zhat);

    Vec3 p = geo.base;
    const auto& chain = topo::kFingerChains[f];
    joints[chain[1]] = p;
    for (int j = 0; j < 3; ++j) {
      const double abd = (j == 0) ? fp.abduction : 0.0;
      frame = frame * Mat3::rot_z(abd) * Mat3::rot_x(fp.flexion[j]);
      p = p + frame * Vec3{0.0, geo.bone_lengths[j], 0.0};
      joints[chain[j + 2]] = p;
    }
  }

  if (pose.handedness == Handedness::kLeft) {
    for (auto& j : joints) j.x = -j.x;
  }

  const Mat3 wrist_rot = Mat3::rot_z(pose.roll) * Mat3::rot_y(pose.tilt_y) * Mat3::rot_x(pose.tilt_x);
  for (auto& j : joints) j = wrist_rot * j + pose.wrist_position;
  return joints;
}

PinholeCamera default_camera() { return {500.0, 500.0, 320.0, 320.0, 640.0, 640.0}; }

std::vector<ProjectedHand> project(const HandScene& scene) {
  const PinholeCamera& cam = scene.camera;
  if (cam.fx <= 0.0 || cam.fy <= 0.0 || cam.width <= 0.0 || cam.height <= 0.0) {
    throw std::invalid_argument("project: invalid camera");
  }

  std::vector<ProjectedHand> out;
  out.reserve(scene.hands.size());
  for (const auto& hand : scene.hands) {
    std::array<Vec2, topo::kNumLandmarks> px{};
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      const Vec3& j = hand.joints3d[i];
      if (j.z <= 1e-6) throw std::invalid_argument("project: joint behind camera");
      px[i] = {cam.fx * j.x / j.z + cam.cx, cam.fy * j.y / j.z + cam.cy};
    }

    const double hand_size_px = (px[topo::kMiddleMcp] - px[topo::kWrist]).norm();
    if (hand_size_px < 1e-9) throw std::invalid_argument("project: degenerate hand projection");
    // Meters per hand-size unit at the wrist depth; keeps z in hand-size
    // units with negative values toward the camera.
    const double wrist_depth = hand.joints3d[topo::kWrist].z;
    const double depth_scale = wrist_depth * hand_size_px / cam.fx;

    ProjectedHand ph;
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      ph.landmarks.points[i] = {px[i].x / cam.width, px[i].y / cam.height,
                                (hand.joints3d[i].z - wrist_depth) / depth_scale};
    }
    ph.landmarks.presence = 1.0;
    ph.landmarks.handedness = hand.handedness == Handedness::kRight ? 1.0 : 0.0;

    // Ground-truth palm: minimal square box over wrist + all MCP joints.
    ph.palm = palm_detection_from_landmarks(ph.landmarks);
    out.push_back(ph);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pose sampling
// ---------------------------------------------------------------------------

namespace {

struct Range {
  double lo = 0.0;
  double hi = 0.0;  // degrees
};

struct FamilySpec {
  std::array<std::array<Range, 3>, topo::kNumFingers> flexion{};
  std::array<Range, topo::kNumFingers> abduction{};
};

// Canonical regions per gesture family. Fist-like curls use 60-70 degrees
// per joint so no projected bone collapses near the 90-degree foreshortening
// point; the OK pinch ranges are tuned so thumb and index tips land within
// 0.12 hand sizes of each other.
FamilySpec family_spec(PoseFamily family) {
  const std::array<Range, 3> straight{{{0, 4}, {0, 4}, {0, 4}}};
  const std::array<Range, 3> straight_thumb{{{0, 6}, {0, 6}, {0, 6}}};
  const std::array<Range, 3> curled{{{60, 70}, {60, 70}, {60, 70}}};
  const std::array<Range, 3> curled_thumb{{{55, 60}, {55, 60}, {55, 60}}};
  const Range abd_none{-3, 3};
  const Range abd_thumb_rest{0, 8};

  FamilySpec s;
  for (auto& a : s.abduction) a = abd_none;
  s.abduction[topo::kThumb] = abd_thumb_rest;
  auto set = [&](const std::array<Range, 3>& thumb, const std::array<Range, 3>& index,
                 const std::array<Range, 3>& middle, const std::array<Range, 3>& ring,
                 const std::array<Range, 3>& pinky) {
    s.flexion = {{thumb, index, middle, ring, pinky}};
  };
  switch (family) {
    case PoseFamily::kOpen:
      set(straight_thumb, straight, straight, straight, straight);
      break;
    case PoseFamily::kFist:
      set(curled_thumb, curled, curled, curled, curled);
      break;
    case PoseFamily::kPoint:
      set(curled_thumb, straight, curled, curled, curled);
      break;
    case PoseFamily::kVictory:
      set(curled_thumb, straight, straight, curled, curled);
      s.abduction[topo::kIndex] = {6, 12};
      s.abduction[topo::kMiddle] = {-12, -6};
      break;
    case PoseFamily::kThumbsUp:
      set(straight_thumb, curled, curled, curled, curled);
      s.abduction[topo::kThumb] = {20, 35};
      break;
    case PoseFamily::kOk:
      // Thumb curls across the palm to pinch the index tip; the rest stay
      // straight. Tuned so the projected pinch stays under 0.09 hand sizes.
      set({{{31, 37}, {21, 27}, {84, 90}}}, {{{55, 61}, {55, 61}, {55, 61}}}, straight, straight,
          straight);
      s.abduction[topo::kThumb] = {9, 15};
      break;
    case PoseFamily::kRandom:
      break;  // handled separately
  }
  return s;
}

}  // namespace

PoseParams sample_pose(uint64_t seed, PoseFamily family, const HandModel& model) {
  Rng rng(mix_u64(seed, 0x706f7365ULL + static_cast<uint64_t>(family)));

  PoseParams pose;
  const double z = rng.uniform(0.45, 0.85);
  pose.wrist_position = {rng.uniform(-0.12, 0.12) * z, rng.uniform(-0.06, 0.14) * z, z};
  pose.roll = rng.uniform(-M_PI, M_PI);
  const double tilt_range = family == PoseFamily::kRandom ? 20 * kDeg : 10 * kDeg;
  pose.tilt_x = rng.uniform(-tilt_range, tilt_range);
  pose.tilt_y = rng.uniform(-tilt_range, tilt_range);

  if (family == PoseFamily::kRandom) {
    for (int f = 0; f < topo::kNumFingers; ++f) {
      const auto& limits = model.fingers[f].limits;
      pose.fingers[f].abduction = rng.uniform(limits[0].abd_min, limits[0].abd_max);
      for (int j = 0; j < 3; ++j) {
        pose.fingers[f].flexion[j] = rng.uniform(limits[j].flex_min, limits[j].flex_max);
      }
    }
    return pose;
  }

  const FamilySpec spec = family_spec(family);
  for (int f = 0; f < topo::kNumFingers; ++f) {
    pose.fingers[f].abduction = rng.uniform(spec.abduction[f].lo, spec.abduction[f].hi) * kDeg;
    for (int j = 0; j < 3; ++j) {
      pose.fingers[f].flexion[j] = rng.uniform(spec.flexion[f][j].lo, spec.flexion[f][j].hi) * kDeg;
    }
  }
  return pose;
}

// ---------------------------------------------------------------------------
// Scripts
// ---------------------------------------------------------------------------

namespace {

PoseParams lerp_pose(const PoseParams& a, const PoseParams& b, double t) {
  auto lerp = [t](double x, double y) { return x + (y - x) * t; };
  PoseParams out = a;
  for (int f = 0; f < topo::kNumFingers; ++f) {
    out.fingers[f].abduction = lerp(a.fingers[f].abduction, b.fingers[f].abduction);
    for (int j = 0; j < 3; ++j) {
      out.fingers[f].flexion[j] = lerp(a.fingers[f].flexion[j], b.fingers[f].flexion[j]);
    }
  }
  out.wrist_position = {lerp(a.wrist_position.x, b.wrist_position.x),
                        lerp(a.wrist_position.y, b.wrist_position.y),
                        lerp(a.wrist_position.z, b.wrist_position.z)};
  out.roll = lerp(a.roll, b.roll);
  out.tilt_x = lerp(a.tilt_x, b.tilt_x);
  out.tilt_y = lerp(a.tilt_y, b.tilt_y);
  return out;
}

PoseParams pose_at_frame(const HandTrack& track, int frame) {
  const auto& kf = track.keyframes;
  if (frame <= kf.front().frame) return kf.front().pose;
  if (frame >= kf.back().frame) return kf.back().pose;
  for (size_t i = 1; i < kf.size(); ++i) {
    if (frame <= kf[i].frame) {
      const double t = static_cast<double>(frame - kf[i - 1].frame) /
                       static_cast<double>(kf[i].frame - kf[i - 1].frame);
      return lerp_pose(kf[i - 1].pose, kf[i].pose, t);
    }
  }
  return kf.back().pose;
}

bool visible_at_frame(const HandTrack& track, int frame) {
  bool visible = track.initially_visible;
  for (const auto& ev : track.events) {
    if (ev.frame <= frame) visible = ev.visible;
  }
  return visible;
}

}  // namespace

std::vector<HandScene> run_script(const SequenceScript& script) {
  const HandModel& model = script.model;
  if (script.fps <= 0.0) throw FormatError("script: fps must be positive");
  if (script.frames < 0) throw FormatError("script: negative frame count");
  for (const auto& track : script.hands) {
    if (track.keyframes.empty()) throw FormatError("script: hand track without keyframes");
    for (size_t i = 1; i < track.keyframes.size(); ++i) {
      if (track.keyframes[i].frame <= track.keyframes[i - 1].frame) {
        throw FormatError("script: keyframe frames must be strictly increasing");
      }
    }
  }

  std::vector<HandScene> scenes;
  scenes.reserve(script.frames);
  for (int frame = 0; frame < script.frames; ++frame) {
    HandScene scene;
    scene.camera = script.camera;
    scene.t_us = std::llround(frame * 1e6 / script.fps);
    for (const auto& track : script.hands) {
      if (!visible_at_frame(track, frame)) continue;
      const PoseParams pose = pose_at_frame(track, frame);
      HandScene::Hand hand;
      hand.joints3d = forward_kinematics(model, pose);
      hand.handedness = pose.handedness;
      scene.hands.push_back(hand);
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

HandScene scene_from_poses(const std::vector<PoseParams>& poses, const PinholeCamera& camera,
                           int64_t t_us, const HandModel& model) {
  HandScene scene;
  scene.camera = camera;
  scene.t_us = t_us;
  for (const auto& pose : poses) {
    HandScene::Hand hand;
    hand.joints3d = forward_kinematics(model, pose);
    hand.handedness = pose.handedness;
    scene.hands.push_back(hand);
  }
  return scene;
}

// ---------------------------------------------------------------------------
// Detector-output synthesis
// ---------------------------------------------------------------------------

RawDetectorOutput synthesize_raw_output(const HandScene& scene, const std::vector<Anchor>& anchors,
                                        double sigma, uint64_t seed) {
  if (anchors.empty()) throw std::invalid_argument("synthesize_raw_output: no anchors");

  RawDetectorOutput raw;
  raw.resize(anchors.size());
  const double negative_logit = logit(0.02);
  std::fill(raw.logits.begin(), raw.logits.end(), negative_logit);

  const auto projected = project(scene);
  if (projected.empty()) return raw;

  auto anchor_box = [](const Anchor& a) {
    return AxisAlignedBox{a.cx - 0.5 * a.side, a.cy - 0.5 * a.side, a.cx + 0.5 * a.side,
                          a.cy + 0.5 * a.side};
  };

  // Best ground truth per anchor.
  std::vector<double> best_iou(anchors.size(), 0.0);
  std::vector<int> best_gt(anchors.size(), -1);
  for (size_t i = 0; i < anchors.size(); ++i) {
    const AxisAlignedBox ab = anchor_box(anchors[i]);
    for (size_t g = 0; g < projected.size(); ++g) {
      const double iou = box_iou(ab, projected[g].palm.box);
      if (iou > best_iou[i]) {
        best_iou[i] = iou;
        best_gt[i] = static_cast<int>(g);
      }
    }
  }

  // Designated anchor per ground truth: its argmax-IoU anchor, skipping
  // anchors already claimed by an earlier hand.
  std::vector<int> claimed_by(anchors.size(), -1);
  for (size_t g = 0; g < projected.size(); ++g) {
    double best = -1.0;
    int best_idx = -1;
    for (size_t i = 0; i < anchors.size(); ++i) {
      if (claimed_by[i] >= 0) continue;
      const double iou = box_iou(anchor_box(anchors[i]), projected[g].palm.box);
      if (iou > best) {
        best = iou;
        best_idx = static_cast<int>(i);
      }
    }
    if (best_idx >= 0) claimed_by[best_idx] = static_cast<int>(g);
  }

  Rng rng(mix_u64(seed, static_cast<uint64_t>(scene.t_us) + 0x7261ULL));
  auto noisy = [&](double v) { return sigma > 0.0 ? v + rng.gaussian(0.0, sigma) : v; };

  for (size_t i = 0; i < anchors.size(); ++i) {
    int gt_index = claimed_by[i];
    double score;
    if (gt_index >= 0) {
      score = 0.95;
    } else if (best_iou[i] >= 0.3) {
      gt_index = best_gt[i];
      // Interpolated band, capped below the designated anchor's score so the
      // designated anchor always survives suppression as the representative.
      score = 0.05 + 0.89 * (best_iou[i] - 0.3) / 0.7;
    } else {
      continue;
    }

    const Detection& gt = projected[gt_index].palm;
    const auto off = encode_boxes(gt, anchors[i]);
    raw.logits[i] = logit(score);
    raw.boxes[i] = {noisy(off.dx), noisy(off.dy), noisy(off.ds)};
    for (int k = 0; k < palm_kp::kNumKeypoints; ++k) {
      const Vec2 kp = encode_keypoint(gt.keypoints[k], anchors[i]);
      raw.keypoints[i][k] = {noisy(kp.x), noisy(kp.y)};
    }
  }
  return raw;
}

HandScene mirror_scene(const HandScene& scene) {
  HandScene out = scene;
  for (auto& hand : out.hands) {
    for (auto& j : hand.joints3d) j.x = -j.x;
    hand.handedness =
        hand.handedness == Handedness::kRight ? Handedness::kLeft : Handedness::kRight;
  }
  return out;
}

HandScene sample_scene(uint64_t seed, int num_hands_min, int num_hands_max,
                       const HandModel& model) {
  Rng rng(mix_u64(seed, 0x7363656eULL));
  const int span = num_hands_max - num_hands_min + 1;
  const int target = num_hands_min + static_cast<int>(rng.uniform_index(span));

  HandScene scene;
  scene.camera = default_camera();
  scene.t_us = 0;

  std::vector<AxisAlignedBox> accepted;
  static constexpr std::array<PoseFamily, 7> kAll = {
      PoseFamily::kOpen,   PoseFamily::kFist,     PoseFamily::kPoint, PoseFamily::kVictory,
      PoseFamily::kThumbsUp, PoseFamily::kOk,     PoseFamily::kRandom};

  for (int h = 0; h < target; ++h) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const PoseFamily family = kAll[rng.uniform_index(kAll.size())];
      PoseParams pose = sample_pose(rng.next_u64(), family, model);
      pose.handedness = rng.uniform() < 0.5 ? Handedness::kLeft : Handedness::kRight;

      HandScene candidate;
      candidate.camera = scene.camera;
      HandScene::Hand hand;
      hand.joints3d = forward_kinematics(model, pose);
      hand.handedness = pose.handedness;
      candidate.hands.push_back(hand);

      const auto projected = project(candidate);
      const AxisAlignedBox& box = projected[0].palm.box;
      if (box.xmin < 0.04 || box.ymin < 0.04 || box.xmax > 0.96 || box.ymax > 0.96) continue;
      bool separated = true;
      for (const auto& other : accepted) {
        if (box_iou(box, other) >= 0.1) {
          separated = false;
          break;
        }
      }
      if (!separated) continue;

      accepted.push_back(box);
      scene.hands.push_back(hand);
      break;
    }
  }
  return scene;
}

}  // namespace handpipe::sim
