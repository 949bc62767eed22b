#ifndef HANDPIPE_CROP_HPP_
#define HANDPIPE_CROP_HPP_

#include <array>

#include "handpipe/types.hpp"

namespace handpipe {

// Oriented-crop derivation: detection or previous-frame landmarks -> rotated,
// expanded hand rectangle -> affine frame change. Crops are coordinate-frame
// changes only; there is no pixel resampling anywhere in the pipeline.
//
// All rotations are counterclockwise as seen in the image (y grows down).
// theta = 0 means the wrist -> middle-MCP direction points straight up, so
// fingers point up in crop space.

// Affine map between crop coordinates [0,1]^2 and image coordinates, stored
// with its exact inverse. Row-major 2x3: x' = m[0]*x + m[1]*y + m[2].
struct CropTransform {
  std::array<double, 6> forward{1, 0, 0, 0, 1, 0};
  std::array<double, 6> inverse{1, 0, 0, 0, 1, 0};
  double scale = 1.0;  // isotropic scale: geometric mean of the axis scales

  Vec2 apply(const Vec2& p) const {
    return {forward[0] * p.x + forward[1] * p.y + forward[2],
            forward[3] * p.x + forward[4] * p.y + forward[5]};
  }
  Vec2 apply_inverse(const Vec2& p) const {
    return {inverse[0] * p.x + inverse[1] * p.y + inverse[2],
            inverse[3] * p.x + inverse[4] * p.y + inverse[5]};
  }
};

struct CropConfig {
  // Palm boxes exclude fingers, so detection-derived rects grow toward the
  // fingertips. Factors are unpublished upstream; these are tuned defaults.
  double detection_expand = 2.6;
  double detection_shift = 0.5;  // fraction of box side along the hand axis
  double landmark_expand = 1.3;
};

// Angle that rotates (middle_mcp - wrist) to point straight up, in (-pi, pi].
double hand_up_angle(const Vec2& wrist, const Vec2& middle_mcp);

// Square hand rect from a palm detection: palm box center shifted along the
// hand axis by shift*side, side scaled by expand. Throws on coincident
// wrist/middle-MCP keypoints.
OrientedRect rect_from_detection(const Detection& det, double expand, double shift);

// Minimal box of the 21 points in the de-rotated frame, expanded about its
// center and re-rotated. Throws when the landmarks are degenerate.
OrientedRect rect_from_landmarks(const HandLandmarks& lm, double expand);

// Maps crop (0.5, 0.5) to the rect center with the crop up-axis along the
// rect orientation. Throws on a zero-size rect.
CropTransform make_crop_transform(const OrientedRect& rect);

// x,y through the forward map; z scaled by the isotropic scale; presence and
// handedness pass through.
HandLandmarks landmarks_to_image_space(const HandLandmarks& lm_crop, const CropTransform& t);

// Inverse of landmarks_to_image_space.
HandLandmarks landmarks_to_crop_space(const HandLandmarks& lm_image, const CropTransform& t);

// Axis-aligned bounds of an oriented rect (used for cheap rect association).
AxisAlignedBox rect_bounds(const OrientedRect& rect);

// Synthetic palm detection from landmarks: the minimal square box over the
// wrist and MCP joints with the standard 7 keypoints. Lets landmark-tracked
// hands be compared like-for-like with detector output.
Detection palm_detection_from_landmarks(const HandLandmarks& lm);

}  // namespace handpipe

#endif  // HANDPIPE_CROP_HPP_
