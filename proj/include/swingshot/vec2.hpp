#pragma once

#include <cmath>

namespace swingshot {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // 2D cross product (scalar z-component).
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  // Counter-clockwise perpendicular.
  constexpr Vec2 perp() const { return {-y, x}; }
  double norm() const { return std::sqrt(x * x + y * y); }
  constexpr double norm2() const { return x * x + y * y; }

  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

}  // namespace swingshot
