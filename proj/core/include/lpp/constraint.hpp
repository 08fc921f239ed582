#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lpp/lattice.hpp"
#include "lpp/path.hpp"

namespace lpp {

/// Lattice parallelogram P(w, l, h, s) with corners (w, w-h), (w+l, w+l-h),
/// (w, w+s), (w+l, w+l+s): columns [w, w+l], and at column t the rows
/// [t-h, t+s].
struct Parallelogram {
  Coord w = 0;
  Coord length = 0;
  Coord below = 0;
  Coord above = 0;

  bool contains(const Vertex& v) const {
    return v.x >= w && v.x <= w + length && v.y >= v.x - below && v.y <= v.x + above;
  }
  Coord row_min(Coord t) const { return t - below; }
  Coord row_max(Coord t) const { return t + above; }
  Rect bounds() const { return Rect{w, w + length, w - below, w + length + above}; }
  /// True when every lattice point of `inner` is a point of this parallelogram.
  bool contains(const Parallelogram& inner) const;
};

/// Finite union of parallelograms and rectangles.
struct Region {
  std::vector<Parallelogram> parallelograms;
  std::vector<Rect> rects;

  static Region of(const Parallelogram& p) { return Region{{p}, {}}; }
  static Region of(const Rect& r) { return Region{{}, {r}}; }

  bool contains(const Vertex& v) const;
  bool empty() const { return parallelograms.empty() && rects.empty(); }
  /// All lattice points of the region inside `window`, sorted and unique.
  std::vector<Vertex> points_in(const Rect& window) const;
};

/// Bitmap of forbidden cells over a rectangle. Cells outside the rectangle
/// are reported as allowed.
class CellMask {
 public:
  explicit CellMask(Rect rect);

  const Rect& rect() const { return rect_; }
  bool blocked(Coord x, Coord y) const {
    if (!rect_.contains(Vertex{x, y})) return false;
    const auto idx = static_cast<std::uint64_t>((y - rect_.y_min) * rect_.width() + (x - rect_.x_min));
    return (bits_[idx >> 6] >> (idx & 63)) & 1U;
  }
  void block(Coord x, Coord y);
  /// Blocks rows [y_lo, y_hi] of column x, clipped to the rectangle.
  void block_column_range(Coord x, Coord y_lo, Coord y_hi);

 private:
  Rect rect_;
  std::vector<std::uint64_t> bits_;
};

enum class ConstraintKind {
  kNone,
  kAvoidRegion,
  kThroughRegion,
  kAvoidVertexSet,
  kStayWeaklyAbovePath,
  kStayStrictlyAbovePath,
  kHeightAtColumn,
};

/// Admissibility condition on paths, as a conjunction of clauses. Every clause
/// except "through region" restricts the set of usable vertices; the through
/// clause requires the path to meet a region and is handled by concatenation.
class Constraint {
 public:
  struct Clause {
    ConstraintKind kind = ConstraintKind::kNone;
    Region region;
    std::vector<Vertex> vertices;  // sorted
    Coord first_column = 0;        // stay-above: per-column forbidden top
    std::vector<Coord> forbid_up_to;
    Coord column = 0;              // height-at-column
    std::optional<Coord> min_height;
    std::optional<Coord> max_height;
  };

  Constraint() = default;

  static Constraint none() { return Constraint(); }
  static Constraint avoid_region(Region region);
  static Constraint through_region(Region region);
  static Constraint avoid_vertices(std::vector<Vertex> vertices);
  /// Path must stay above `path` on the columns [col_lo, col_hi] of its span
  /// (the whole span when omitted). Strict: vertex-disjoint and above every
  /// vertex of the path; weak: not below the lowest vertex in each column.
  static Constraint stay_above(const Path& path, bool strict,
                               std::optional<Coord> col_lo = std::nullopt,
                               std::optional<Coord> col_hi = std::nullopt);
  /// On column `column`, every vertex of the path satisfies
  /// min_height <= y <= max_height (either bound optional).
  static Constraint height_at_column(Coord column, std::optional<Coord> min_height,
                                     std::optional<Coord> max_height);

  /// Conjunction.
  Constraint& also(const Constraint& other);

  const std::vector<Clause>& clauses() const { return clauses_; }
  bool is_none() const { return clauses_.empty(); }
  bool has_vertex_restrictions() const;
  const Region* through() const;

  /// True when v satisfies every vertex-restricting clause.
  bool admits_vertex(const Vertex& v) const;
  /// Full admissibility of a path, including the through clause.
  bool admits_path(const std::vector<Vertex>& vertices) const;

  /// Forbidden-cell bitmap over `rect`; null when no clause restricts vertices.
  std::shared_ptr<const CellMask> compile(const Rect& rect) const;

 private:
  std::vector<Clause> clauses_;
};

}  // namespace lpp
