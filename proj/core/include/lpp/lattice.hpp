#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace lpp {

using Coord = std::int64_t;

struct Vertex {
  Coord x = 0;
  Coord y = 0;

  friend constexpr bool operator==(const Vertex&, const Vertex&) = default;
  friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Coordinate-wise order: u ⪯ v iff u.x <= v.x and u.y <= v.y.
constexpr bool precedes(const Vertex& u, const Vertex& v) {
  return u.x <= v.x && u.y <= v.y;
}

/// Index of the anti-diagonal line x + y = const through v.
constexpr Coord antidiagonal(const Vertex& v) { return v.x + v.y; }

/// l1 distance d(u, v) = (v.x - u.x) + (v.y - u.y) for u ⪯ v.
constexpr Coord l1_distance(const Vertex& u, const Vertex& v) {
  return (v.x - u.x) + (v.y - u.y);
}

/// Inclusive integer rectangle [x_min, x_max] x [y_min, y_max].
struct Rect {
  Coord x_min = 0;
  Coord x_max = 0;
  Coord y_min = 0;
  Coord y_max = 0;

  static constexpr Rect spanning(const Vertex& lo, const Vertex& hi) {
    return Rect{lo.x, hi.x, lo.y, hi.y};
  }

  constexpr bool valid() const { return x_min <= x_max && y_min <= y_max; }
  constexpr Coord width() const { return x_max - x_min + 1; }
  constexpr Coord height() const { return y_max - y_min + 1; }
  constexpr std::uint64_t area() const {
    return static_cast<std::uint64_t>(width()) * static_cast<std::uint64_t>(height());
  }
  constexpr bool contains(const Vertex& v) const {
    return v.x >= x_min && v.x <= x_max && v.y >= y_min && v.y <= y_max;
  }
  constexpr bool contains(const Rect& r) const {
    return r.x_min >= x_min && r.x_max <= x_max && r.y_min >= y_min && r.y_max <= y_max;
  }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

constexpr Rect intersect(const Rect& a, const Rect& b) {
  return Rect{std::max(a.x_min, b.x_min), std::min(a.x_max, b.x_max),
              std::max(a.y_min, b.y_min), std::min(a.y_max, b.y_max)};
}

constexpr Rect bounding(const Rect& a, const Rect& b) {
  return Rect{std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max),
              std::min(a.y_min, b.y_min), std::max(a.y_max, b.y_max)};
}

inline std::string to_string(const Vertex& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

inline std::string to_string(const Rect& r) {
  return "[" + std::to_string(r.x_min) + "," + std::to_string(r.x_max) + "]x[" +
         std::to_string(r.y_min) + "," + std::to_string(r.y_max) + "]";
}

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// floor(c * n^{p/q}) computed in long double with a small tolerance so that
/// exact values like 1000^{2/3} = 100 are not floored to 99.
Coord floor_scaled_power(double coefficient, double base, double exponent);

/// floor(value) with the same tolerance.
Coord floor_tolerant(double value);

}  // namespace lpp
