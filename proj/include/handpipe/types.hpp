#ifndef HANDPIPE_TYPES_HPP_
#define HANDPIPE_TYPES_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "handpipe/geom.hpp"

namespace handpipe {

// ---------------------------------------------------------------------------
// Landmark topology: 21 named points, five 4-joint finger chains rooted at
// the wrist. Indices follow the common 21-point hand convention.
// ---------------------------------------------------------------------------

namespace topo {

enum LandmarkIndex : int {
  kWrist = 0,
  kThumbCmc = 1,
  kThumbMcp = 2,
  kThumbIp = 3,
  kThumbTip = 4,
  kIndexMcp = 5,
  kIndexPip = 6,
  kIndexDip = 7,
  kIndexTip = 8,
  kMiddleMcp = 9,
  kMiddlePip = 10,
  kMiddleDip = 11,
  kMiddleTip = 12,
  kRingMcp = 13,
  kRingPip = 14,
  kRingDip = 15,
  kRingTip = 16,
  kPinkyMcp = 17,
  kPinkyPip = 18,
  kPinkyDip = 19,
  kPinkyTip = 20,
};

inline constexpr int kNumLandmarks = 21;
inline constexpr int kNumFingers = 5;
inline constexpr int kChainLength = 5;  // wrist root + 4 chain joints

enum FingerIndex : int { kThumb = 0, kIndex = 1, kMiddle = 2, kRing = 3, kPinky = 4 };

// Each chain lists the wrist followed by the finger's 4 joints, base to tip.
inline constexpr std::array<std::array<int, kChainLength>, kNumFingers> kFingerChains = {{
    {kWrist, kThumbCmc, kThumbMcp, kThumbIp, kThumbTip},
    {kWrist, kIndexMcp, kIndexPip, kIndexDip, kIndexTip},
    {kWrist, kMiddleMcp, kMiddlePip, kMiddleDip, kMiddleTip},
    {kWrist, kRingMcp, kRingPip, kRingDip, kRingTip},
    {kWrist, kPinkyMcp, kPinkyPip, kPinkyDip, kPinkyTip},
}};

inline constexpr std::array<const char*, kNumFingers> kFingerNames = {
    "thumb", "index", "middle", "ring", "pinky"};

// Bone edges for rendering: wrist-to-base plus the chain segments.
inline constexpr std::array<std::array<int, 2>, 20> kBoneEdges = {{
    {0, 1},  {1, 2},   {2, 3},   {3, 4},          // thumb
    {0, 5},  {5, 6},   {6, 7},   {7, 8},          // index
    {0, 9},  {9, 10},  {10, 11}, {11, 12},        // middle
    {0, 13}, {13, 14}, {14, 15}, {15, 16},        // ring
    {0, 17}, {17, 18}, {18, 19}, {19, 20},        // pinky
}};

}  // namespace topo

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

// 2.5D point: x,y in normalized image coordinates, z is relative depth in
// hand-size units with negative values toward the camera. z at the wrist of
// a full hand is exactly 0.
struct Landmark25D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

enum class Handedness : int { kLeft = 0, kRight = 1 };

inline const char* handedness_name(Handedness h) {
  return h == Handedness::kRight ? "Right" : "Left";
}

struct HandLandmarks {
  std::array<Landmark25D, topo::kNumLandmarks> points{};
  double presence = 0.0;    // probability a reasonably aligned hand is in the crop
  double handedness = 0.5;  // P(right hand); label Right iff >= 0.5

  Handedness handedness_label() const {
    return handedness >= 0.5 ? Handedness::kRight : Handedness::kLeft;
  }
};

struct AxisAlignedBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const {
    double w = width(), h = height();
    return (w <= 0.0 || h <= 0.0) ? 0.0 : w * h;
  }
  Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

// Detector keypoints, fixed set of 7. The box corners stand in for palm
// extent; wrist and middle-finger MCP give the rotation axis for the crop.
namespace palm_kp {
enum : int {
  kPalmCenter = 0,
  kBoxTopLeft = 1,
  kBoxTopRight = 2,
  kBoxBottomRight = 3,
  kBoxBottomLeft = 4,
  kWrist = 5,
  kMiddleMcp = 6,
};
inline constexpr int kNumKeypoints = 7;
}  // namespace palm_kp

// A scored square palm box plus its keypoints. Palms are square by contract;
// construction sites keep width == height within 1e-9.
struct Detection {
  AxisAlignedBox box;
  double score = 0.0;
  std::array<Vec2, palm_kp::kNumKeypoints> keypoints{};

  double side() const { return box.width(); }
};

// Rotated rectangle in normalized coordinates. theta is counterclockwise as
// seen in the image, 0 = hand pointing up, wrapped to (-pi, pi].
struct OrientedRect {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;
};

struct PinholeCamera {
  double fx = 0.0;  // focal length, pixels
  double fy = 0.0;
  double cx = 0.0;  // principal point, pixels
  double cy = 0.0;
  double width = 0.0;  // image size, pixels
  double height = 0.0;
};

// Simulator ground truth for one frame: hands as 3D joint sets in camera
// space (meters, z forward, all joints in front of the camera).
struct HandScene {
  struct Hand {
    std::array<Vec3, topo::kNumLandmarks> joints3d{};
    Handedness handedness = Handedness::kRight;
  };

  std::vector<Hand> hands;
  PinholeCamera camera;
  int64_t t_us = 0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Wraps an angle to (-pi, pi]. Throws std::invalid_argument on non-finite input.
double wrap_angle(double theta);

// Intersection-over-union of two axis-aligned boxes; 0 when disjoint or both
// degenerate.
double box_iou(const AxisAlignedBox& a, const AxisAlignedBox& b);

}  // namespace handpipe

#endif  // HANDPIPE_TYPES_HPP_
