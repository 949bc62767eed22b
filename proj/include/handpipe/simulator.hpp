#ifndef HANDPIPE_SIMULATOR_HPP_
#define HANDPIPE_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "handpipe/detector.hpp"
#include "handpipe/types.hpp"

namespace handpipe::sim {

// Kinematic ground-truth generator: a 20-bone chain skeleton (wrist plus
// five 4-joint chains), a pose sampler over named gesture families, pinhole
// projection, scripted sequences, and the oracle synthesizer that stands in
// for the palm detector network.
//
// Hand-local frame (right hand, identity wrist pose): fingers extend along
// -Y (up in the image), palm faces the camera, flexion curls joints toward
// the camera. Left hands are the exact x-mirror of right hands.

struct JointLimits {
  double flex_min = 0.0;  // radians
  double flex_max = 0.0;
  double abd_min = 0.0;
  double abd_max = 0.0;
};

struct FingerGeometry {
  Vec3 base;                            // chain joint 0, meters relative to wrist
  std::array<double, 3> bone_lengths{}; // successive segments toward the tip
  std::array<JointLimits, 3> limits{};  // abduction only meaningful at joint 0
};

struct HandModel {
  std::array<FingerGeometry, topo::kNumFingers> fingers{};
  double palm_width = 0.0;       // meters
  double thumb_opposition = 0.0; // radians; tilts the thumb's flexion plane
                                 // across the palm so the tip can oppose the
                                 // fingertips

  // Average adult-hand segment lengths; see README for the table.
  static const HandModel& average_adult();
};

struct FingerPose {
  std::array<double, 3> flexion{};  // radians, joints base to tip
  double abduction = 0.0;           // radians, at the chain base
};

struct PoseParams {
  std::array<FingerPose, topo::kNumFingers> fingers{};
  Vec3 wrist_position{0.0, 0.0, 0.6};  // camera space, meters
  double roll = 0.0;                   // about the view axis
  double tilt_x = 0.0;                 // out-of-plane
  double tilt_y = 0.0;
  Handedness handedness = Handedness::kRight;
};

enum class PoseFamily : int {
  kOpen = 0,
  kFist,
  kPoint,
  kVictory,
  kThumbsUp,
  kOk,
  kRandom,
};

inline constexpr std::array<PoseFamily, 6> kNamedFamilies = {
    PoseFamily::kOpen,   PoseFamily::kFist, PoseFamily::kPoint,
    PoseFamily::kVictory, PoseFamily::kThumbsUp, PoseFamily::kOk};

const char* pose_family_name(PoseFamily family);
std::optional<PoseFamily> pose_family_from_name(const std::string& name);

// 21 camera-space joints. Throws std::invalid_argument when the pose violates
// the model's joint limits.
std::array<Vec3, topo::kNumLandmarks> forward_kinematics(const HandModel& model,
                                                         const PoseParams& pose);

// Per-hand projection result: normalized 2.5D landmarks (z relative to the
// wrist in projected hand-size units) plus the ground-truth palm detection
// (minimal square box over wrist and MCP joints, score 1).
struct ProjectedHand {
  HandLandmarks landmarks;
  Detection palm;
};

// Throws std::invalid_argument when a joint sits behind the camera.
std::vector<ProjectedHand> project(const HandScene& scene);

PinholeCamera default_camera();

// Deterministic per (seed, family). Named families land inside the gesture
// classifier's canonical regions; kRandom samples uniformly within limits.
PoseParams sample_pose(uint64_t seed, PoseFamily family,
                       const HandModel& model = HandModel::average_adult());

struct VisibilityEvent {
  int frame = 0;
  bool visible = false;
};

struct PoseKeyframe {
  int frame = 0;
  PoseParams pose;
};

struct HandTrack {
  std::vector<PoseKeyframe> keyframes;  // frames strictly increasing
  std::vector<VisibilityEvent> events;  // toggles, frames nondecreasing
  bool initially_visible = true;
};

struct SequenceScript {
  double fps = 30.0;
  int frames = 0;
  PinholeCamera camera = default_camera();
  HandModel model = HandModel::average_adult();
  std::vector<HandTrack> hands;
};

// One scene per frame at the fixed frame interval; poses linearly
// interpolated in parameter space. Throws FormatError on malformed keyframes.
std::vector<HandScene> run_script(const SequenceScript& script);

HandScene scene_from_poses(const std::vector<PoseParams>& poses, const PinholeCamera& camera,
                           int64_t t_us, const HandModel& model = HandModel::average_adult());

// Oracle stand-in for the palm network. Each ground-truth palm box projects
// onto its best-IoU anchor at score 0.95 with exact encoded offsets (plus
// Gaussian noise when sigma > 0); anchors under 0.3 IoU to every box get
// score 0.02; anchors in between are score-interpolated by IoU.
RawDetectorOutput synthesize_raw_output(const HandScene& scene, const std::vector<Anchor>& anchors,
                                        double sigma, uint64_t seed = 0);

// x-mirror about the optical axis; handedness labels flip.
HandScene mirror_scene(const HandScene& scene);

// Random framed scene with hands placed so ground-truth palm boxes stay
// pairwise separated (IoU < 0.1) and inside the image.
HandScene sample_scene(uint64_t seed, int num_hands_min, int num_hands_max,
                       const HandModel& model = HandModel::average_adult());

}  // namespace handpipe::sim

#endif  // HANDPIPE_SIMULATOR_HPP_
