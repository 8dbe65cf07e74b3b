#pragma once

#include <array>
#include <cmath>

namespace playroom {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0.0 ? *this / n : Vec3{};
  }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// Unit quaternion (w, x, y, z) for 3D rotations.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quat() = default;
  Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quat from_axis_angle(const Vec3& axis, double angle_rad) {
    const Vec3 a = axis.normalized();
    const double h = 0.5 * angle_rad;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
  }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat normalized() const {
    const double n = norm();
    if (n == 0.0) return Quat{};
    return {w / n, x / n, y / n, z / n};
  }

  Quat conjugate() const { return {w, -x, -y, -z}; }

  Quat operator*(const Quat& q) const {
    return {w * q.w - x * q.x - y * q.y - z * q.z,
            w * q.x + x * q.w + y * q.z - z * q.y,
            w * q.y - x * q.z + y * q.w + z * q.x,
            w * q.z + x * q.y - y * q.x + z * q.w};
  }

  Vec3 rotate(const Vec3& v) const {
    const Quat p{0.0, v.x, v.y, v.z};
    const Quat r = (*this) * p * conjugate();
    return {r.x, r.y, r.z};
  }

  // Rotation angle between this and q, in radians, in [0, pi].
  double angle_to(const Quat& q) const {
    const Quat d = conjugate() * q;
    double c = std::fabs(d.w);
    if (c > 1.0) c = 1.0;
    return 2.0 * std::acos(c);
  }
};

// Rigid transform: rotation then translation.
struct Pose {
  Vec3 t;
  Quat q;

  Vec3 apply(const Vec3& p) const { return q.rotate(p) + t; }

  Pose compose(const Pose& local) const {
    return {apply(local.t), (q * local.q).normalized()};
  }
};

struct Aabb {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
           p.z >= lo.z && p.z <= hi.z;
  }
};

}  // namespace playroom
