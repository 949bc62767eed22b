#include "handpipe/types.hpp"

#include <cmath>
#include <stdexcept>

namespace handpipe {

double wrap_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double r = std::fmod(theta + M_PI, 2.0 * M_PI);
  if (r <= 0.0) r += 2.0 * M_PI;
  return r - M_PI;
}

double box_iou(const AxisAlignedBox& a, const AxisAlignedBox& b) {
  double ix = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  double iy = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  double inter = ix * iy;
  double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace handpipe
