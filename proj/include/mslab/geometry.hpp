#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace mslab {

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double norm2() const { return x * x + y * y + z * z; }
};

struct Box2 {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  Box2() = default;
  Box2(double x0_, double y0_, double x1_, double y1_)
      : x0(x0_), y0(y0_), x1(x1_), y1(y1_) {}
  bool contains(Vec2 p) const {
    return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

using Polyline2 = std::vector<Vec2>;
using Polyline3 = std::vector<Vec3>;

inline double polyline_euclidean_length(const Polyline2& c) {
  double s = 0.0;
  for (size_t i = 1; i < c.size(); ++i) s += (c[i] - c[i - 1]).norm();
  return s;
}

// Area of the intersection of two disks (circle-circle lens).
inline double disk_intersection_area(Vec2 c1, double r1, Vec2 c2, double r2) {
  double d = (c1 - c2).norm();
  if (d >= r1 + r2) return 0.0;
  if (d <= std::fabs(r1 - r2)) {
    double r = std::min(r1, r2);
    return M_PI * r * r;
  }
  double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
  double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
  return r1 * r1 * (a1 - std::sin(2 * a1) / 2) + r2 * r2 * (a2 - std::sin(2 * a2) / 2);
}

// Compensated accumulation; keeps long reductions reproducible to ~1 ulp.
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  double value() const { return s; }
};

}  // namespace mslab
