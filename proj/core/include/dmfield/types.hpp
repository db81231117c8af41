#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmf {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double a, double b) : x(a), y(b) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double operator[](int i) const { return i == 0 ? x : y; }
  double& operator[](int i) { return i == 0 ? x : y; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(const Vec2& a) { double n = norm(a); return n > 0 ? a / n : Vec2{}; }
inline constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

// Axis-aligned box. dim == 1 boxes use only the x coordinate.
struct Box {
  Vec2 lo;
  Vec2 hi;
  int dim = 2;

  Box() = default;
  Box(Vec2 l, Vec2 h, int d = 2) : lo(l), hi(h), dim(d) {}
  static Box interval(double a, double b) { return Box({a, 0.0}, {b, 0.0}, 1); }

  double width() const { return hi.x - lo.x; }
  double height() const { return dim == 1 ? 0.0 : hi.y - lo.y; }
  double volume() const { return dim == 1 ? width() : width() * height(); }
  Vec2 center() const { return (lo + hi) * 0.5; }
  double scale() const { return dim == 1 ? width() : std::max(width(), height()); }
  bool contains(const Vec2& p) const {
    if (p.x < lo.x || p.x > hi.x) return false;
    return dim == 1 || (p.y >= lo.y && p.y <= hi.y);
  }
  bool contains_open(const Vec2& p) const {
    if (p.x <= lo.x || p.x >= hi.x) return false;
    return dim == 1 || (p.y > lo.y && p.y < hi.y);
  }
  Box grown(double d) const {
    return dim == 1 ? Box({lo.x - d, 0.0}, {hi.x + d, 0.0}, 1) : Box(lo - Vec2{d, d}, hi + Vec2{d, d}, 2);
  }
  bool intersects(const Box& o) const {
    if (hi.x < o.lo.x || o.hi.x < lo.x) return false;
    return dim == 1 || !(hi.y < o.lo.y || o.hi.y < lo.y);
  }
  Box intersect(const Box& o) const {
    Box b({std::max(lo.x, o.lo.x), std::max(lo.y, o.lo.y)}, {std::min(hi.x, o.hi.x), std::min(hi.y, o.hi.y)}, dim);
    return b;
  }
  bool empty() const { return hi.x <= lo.x || (dim == 2 && hi.y <= lo.y); }
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;
using Fn1 = std::function<double(double)>;
using Predicate = std::function<bool(const Vec2&)>;

// Error taxonomy. Everything derives from dmf::Error so callers can catch once.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};
struct UnsupportedShape : Error {
  using Error::Error;
};

// Sign convention for normal traces. The library computes with the interior
// unit normal; `outward` negates every reported trace value.
enum class Convention { interior, outward };

inline double convention_sign(Convention c) { return c == Convention::interior ? 1.0 : -1.0; }

}  // namespace dmf
