#ifndef HANDPIPE_GEOM_HPP_
#define HANDPIPE_GEOM_HPP_

#include <array>
#include <cmath>

namespace handpipe {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

// Column-major 3x3 rotation/basis matrix.
struct Mat3 {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // columns

  static Mat3 identity() { return {}; }

  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 r;
    r.m = {c0.x, c0.y, c0.z, c1.x, c1.y, c1.z, c2.x, c2.y, c2.z};
    return r;
  }

  static Mat3 rot_x(double a) {
    double c = std::cos(a), s = std::sin(a);
    return from_columns({1, 0, 0}, {0, c, s}, {0, -s, c});
  }

  static Mat3 rot_y(double a) {
    double c = std::cos(a), s = std::sin(a);
    return from_columns({c, 0, -s}, {0, 1, 0}, {s, 0, c});
  }

  static Mat3 rot_z(double a) {
    double c = std::cos(a), s = std::sin(a);
    return from_columns({c, s, 0}, {-s, c, 0}, {0, 0, 1});
  }

  Vec3 col(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
            m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    return from_columns(*this * o.col(0), *this * o.col(1), *this * o.col(2));
  }

  Mat3 transposed() const {
    return from_columns({m[0], m[3], m[6]}, {m[1], m[4], m[7]}, {m[2], m[5], m[8]});
  }
};

}  // namespace handpipe

#endif  // HANDPIPE_GEOM_HPP_
