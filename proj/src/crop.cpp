#include "handpipe/crop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace handpipe {

namespace {

constexpr double kDegenerate = 1e-12;

// Rotation by phi, counterclockwise as seen in the image (y down).
Vec2 rotate_ccw(const Vec2& v, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {v.x * c + v.y * s, -v.x * s + v.y * c};
}

}  // namespace

double hand_up_angle(const Vec2& wrist, const Vec2& middle_mcp) {
  const Vec2 d = middle_mcp - wrist;
  if (d.norm() < kDegenerate) {
    throw std::invalid_argument("hand_up_angle: wrist and middle-MCP coincide");
  }
  return wrap_angle(std::atan2(-d.x, -d.y));
}

OrientedRect rect_from_detection(const Detection& det, double expand, double shift) {
  const Vec2 wrist = det.keypoints[palm_kp::kWrist];
  const Vec2 mcp = det.keypoints[palm_kp::kMiddleMcp];
  const double theta = hand_up_angle(wrist, mcp);
  const Vec2 axis = (mcp - wrist) * (1.0 / (mcp - wrist).norm());
  const double side = det.side();
  const Vec2 center = det.box.center() + axis * (shift * side);
  return {center.x, center.y, side * expand, side * expand, theta};
}

OrientedRect rect_from_landmarks(const HandLandmarks& lm, double expand) {
  const Vec2 wrist{lm.points[topo::kWrist].x, lm.points[topo::kWrist].y};
  const Vec2 mcp{lm.points[topo::kMiddleMcp].x, lm.points[topo::kMiddleMcp].y};
  const double theta = hand_up_angle(wrist, mcp);

  // Extents in the de-rotated frame, relative to the wrist.
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  double vmin = umin, vmax = -umin;
  for (const auto& p : lm.points) {
    const Vec2 q = rotate_ccw({p.x - wrist.x, p.y - wrist.y}, -theta);
    umin = std::min(umin, q.x);
    umax = std::max(umax, q.x);
    vmin = std::min(vmin, q.y);
    vmax = std::max(vmax, q.y);
  }
  const double w = (umax - umin) * expand;
  const double h = (vmax - vmin) * expand;
  if (w < kDegenerate || h < kDegenerate) {
    throw std::invalid_argument("rect_from_landmarks: degenerate landmark extent");
  }
  const Vec2 center_local{0.5 * (umin + umax), 0.5 * (vmin + vmax)};
  const Vec2 center = wrist + rotate_ccw(center_local, theta);
  return {center.x, center.y, w, h, theta};
}

CropTransform make_crop_transform(const OrientedRect& rect) {
  if (rect.w <= 0.0 || rect.h <= 0.0) {
    throw std::invalid_argument("make_crop_transform: zero-size rect");
  }
  const double c = std::cos(rect.theta), s = std::sin(rect.theta);
  CropTransform t;
  // crop (u,v) -> center + R * ((u-.5)w, (v-.5)h)
  t.forward = {rect.w * c, rect.h * s, rect.cx - 0.5 * rect.w * c - 0.5 * rect.h * s,
               -rect.w * s, rect.h * c, rect.cy + 0.5 * rect.w * s - 0.5 * rect.h * c};
  const double inv_w = 1.0 / rect.w, inv_h = 1.0 / rect.h;
  const double tx = t.forward[2], ty = t.forward[5];
  t.inverse = {c * inv_w, -s * inv_w, -(c * tx - s * ty) * inv_w,
               s * inv_h, c * inv_h, -(s * tx + c * ty) * inv_h};
  t.scale = std::sqrt(rect.w * rect.h);
  return t;
}

HandLandmarks landmarks_to_image_space(const HandLandmarks& lm_crop, const CropTransform& t) {
  HandLandmarks out = lm_crop;
  for (auto& p : out.points) {
    const Vec2 q = t.apply({p.x, p.y});
    p.x = q.x;
    p.y = q.y;
    p.z *= t.scale;
  }
  return out;
}

HandLandmarks landmarks_to_crop_space(const HandLandmarks& lm_image, const CropTransform& t) {
  HandLandmarks out = lm_image;
  for (auto& p : out.points) {
    const Vec2 q = t.apply_inverse({p.x, p.y});
    p.x = q.x;
    p.y = q.y;
    p.z /= t.scale;
  }
  return out;
}

Detection palm_detection_from_landmarks(const HandLandmarks& lm) {
  static constexpr std::array<int, 6> kPalmJoints = {
      topo::kWrist, topo::kThumbMcp, topo::kIndexMcp,
      topo::kMiddleMcp, topo::kRingMcp, topo::kPinkyMcp};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (int idx : kPalmJoints) {
    xmin = std::min(xmin, lm.points[idx].x);
    xmax = std::max(xmax, lm.points[idx].x);
    ymin = std::min(ymin, lm.points[idx].y);
    ymax = std::max(ymax, lm.points[idx].y);
  }
  const double side = std::max(xmax - xmin, ymax - ymin);
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);

  Detection det;
  det.box = {cx - 0.5 * side, cy - 0.5 * side, cx + 0.5 * side, cy + 0.5 * side};
  det.score = 1.0;
  det.keypoints[palm_kp::kPalmCenter] = {cx, cy};
  det.keypoints[palm_kp::kBoxTopLeft] = {det.box.xmin, det.box.ymin};
  det.keypoints[palm_kp::kBoxTopRight] = {det.box.xmax, det.box.ymin};
  det.keypoints[palm_kp::kBoxBottomRight] = {det.box.xmax, det.box.ymax};
  det.keypoints[palm_kp::kBoxBottomLeft] = {det.box.xmin, det.box.ymax};
  det.keypoints[palm_kp::kWrist] = {lm.points[topo::kWrist].x, lm.points[topo::kWrist].y};
  det.keypoints[palm_kp::kMiddleMcp] = {lm.points[topo::kMiddleMcp].x,
                                        lm.points[topo::kMiddleMcp].y};
  return det;
}

AxisAlignedBox rect_bounds(const OrientedRect& rect) {
  const double c = std::abs(std::cos(rect.theta)), s = std::abs(std::sin(rect.theta));
  const double hw = 0.5 * (rect.w * c + rect.h * s);
  const double hh = 0.5 * (rect.w * s + rect.h * c);
  return {rect.cx - hw, rect.cy - hh, rect.cx + hw, rect.cy + hh};
}

}  // namespace handpipe
