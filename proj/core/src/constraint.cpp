#include "lpp/constraint.hpp"

#include <algorithm>

#include "lpp/errors.hpp"

namespace lpp {

bool Parallelogram::contains(const Parallelogram& inner) const {
  if (inner.w < w || inner.w + inner.length > w + length) return false;
  // Row bounds are both offsets from the diagonal, so column-independent.
  return inner.below <= below && inner.above <= above;
}

bool Region::contains(const Vertex& v) const {
  for (const auto& p : parallelograms) {
    if (p.contains(v)) return true;
  }
  for (const auto& r : rects) {
    if (r.contains(v)) return true;
  }
  return false;
}

std::vector<Vertex> Region::points_in(const Rect& window) const {
  std::vector<Vertex> out;
  for (const auto& p : parallelograms) {
    const Coord t0 = std::max(p.w, window.x_min);
    const Coord t1 = std::min(p.w + p.length, window.x_max);
    for (Coord t = t0; t <= t1; ++t) {
      const Coord y0 = std::max(p.row_min(t), window.y_min);
      const Coord y1 = std::min(p.row_max(t), window.y_max);
      for (Coord y = y0; y <= y1; ++y) out.push_back(Vertex{t, y});
    }
  }
  for (const auto& r : rects) {
    const Rect c = intersect(r, window);
    if (!c.valid()) continue;
    for (Coord t = c.x_min; t <= c.x_max; ++t) {
      for (Coord y = c.y_min; y <= c.y_max; ++y) out.push_back(Vertex{t, y});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CellMask::CellMask(Rect rect) : rect_(rect), bits_((rect.area() + 63) / 64, 0) {}

void CellMask::block(Coord x, Coord y) {
  if (!rect_.contains(Vertex{x, y})) return;
  const auto idx = static_cast<std::uint64_t>((y - rect_.y_min) * rect_.width() + (x - rect_.x_min));
  bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
}

void CellMask::block_column_range(Coord x, Coord y_lo, Coord y_hi) {
  if (x < rect_.x_min || x > rect_.x_max) return;
  y_lo = std::max(y_lo, rect_.y_min);
  y_hi = std::min(y_hi, rect_.y_max);
  for (Coord y = y_lo; y <= y_hi; ++y) block(x, y);
}

Constraint Constraint::avoid_region(Region region) {
  Constraint c;
  Clause cl;
  cl.kind = ConstraintKind::kAvoidRegion;
  cl.region = std::move(region);
  c.clauses_.push_back(std::move(cl));
  return c;
}

Constraint Constraint::through_region(Region region) {
  Constraint c;
  Clause cl;
  cl.kind = ConstraintKind::kThroughRegion;
  cl.region = std::move(region);
  c.clauses_.push_back(std::move(cl));
  return c;
}

Constraint Constraint::avoid_vertices(std::vector<Vertex> vertices) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  Constraint c;
  Clause cl;
  cl.kind = ConstraintKind::kAvoidVertexSet;
  cl.vertices = std::move(vertices);
  c.clauses_.push_back(std::move(cl));
  return c;
}

Constraint Constraint::stay_above(const Path& path, bool strict, std::optional<Coord> col_lo,
                                  std::optional<Coord> col_hi) {
  if (path.empty()) throw ParameterError("stay-above constraint needs a non-empty path");
  const Coord span_lo = path.front().x;
  const Coord span_hi = path.back().x;
  const Coord lo = std::max(span_lo, col_lo.value_or(span_lo));
  const Coord hi = std::min(span_hi, col_hi.value_or(span_hi));
  Constraint c;
  Clause cl;
  cl.kind = strict ? ConstraintKind::kStayStrictlyAbovePath : ConstraintKind::kStayWeaklyAbovePath;
  cl.first_column = lo;
  if (lo <= hi) {
    cl.forbid_up_to.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    std::vector<bool> seen(cl.forbid_up_to.size(), false);
    for (const auto& v : path.vertices) {
      if (v.x < lo || v.x > hi) continue;
      const auto i = static_cast<std::size_t>(v.x - lo);
      if (strict) {
        // Topmost vertex of the column's vertical run.
        cl.forbid_up_to[i] = seen[i] ? std::max(cl.forbid_up_to[i], v.y) : v.y;
      } else {
        // Strictly below the lowest vertex of the run.
        cl.forbid_up_to[i] = seen[i] ? std::min(cl.forbid_up_to[i], v.y - 1) : v.y - 1;
      }
      seen[i] = true;
    }
  }
  c.clauses_.push_back(std::move(cl));
  return c;
}

Constraint Constraint::height_at_column(Coord column, std::optional<Coord> min_height,
                                        std::optional<Coord> max_height) {
  Constraint c;
  Clause cl;
  cl.kind = ConstraintKind::kHeightAtColumn;
  cl.column = column;
  cl.min_height = min_height;
  cl.max_height = max_height;
  c.clauses_.push_back(std::move(cl));
  return c;
}

Constraint& Constraint::also(const Constraint& other) {
  for (const auto& cl : other.clauses_) {
    if (cl.kind == ConstraintKind::kThroughRegion && through() != nullptr) {
      throw ParameterError("at most one through-region clause is supported");
    }
    clauses_.push_back(cl);
  }
  return *this;
}

bool Constraint::has_vertex_restrictions() const {
  return std::any_of(clauses_.begin(), clauses_.end(), [](const Clause& cl) {
    return cl.kind != ConstraintKind::kThroughRegion && cl.kind != ConstraintKind::kNone;
  });
}

const Region* Constraint::through() const {
  for (const auto& cl : clauses_) {
    if (cl.kind == ConstraintKind::kThroughRegion) return &cl.region;
  }
  return nullptr;
}

bool Constraint::admits_vertex(const Vertex& v) const {
  for (const auto& cl : clauses_) {
    switch (cl.kind) {
      case ConstraintKind::kNone:
      case ConstraintKind::kThroughRegion:
        break;
      case ConstraintKind::kAvoidRegion:
        if (cl.region.contains(v)) return false;
        break;
      case ConstraintKind::kAvoidVertexSet:
        if (std::binary_search(cl.vertices.begin(), cl.vertices.end(), v)) return false;
        break;
      case ConstraintKind::kStayWeaklyAbovePath:
      case ConstraintKind::kStayStrictlyAbovePath: {
        const Coord i = v.x - cl.first_column;
        if (i >= 0 && i < static_cast<Coord>(cl.forbid_up_to.size()) &&
            v.y <= cl.forbid_up_to[static_cast<std::size_t>(i)]) {
          return false;
        }
        break;
      }
      case ConstraintKind::kHeightAtColumn:
        if (v.x == cl.column) {
          if (cl.min_height && v.y < *cl.min_height) return false;
          if (cl.max_height && v.y > *cl.max_height) return false;
        }
        break;
    }
  }
  return true;
}

bool Constraint::admits_path(const std::vector<Vertex>& vertices) const {
  for (const auto& v : vertices) {
    if (!admits_vertex(v)) return false;
  }
  if (const Region* r = through()) {
    return std::any_of(vertices.begin(), vertices.end(), [r](const Vertex& v) { return r->contains(v); });
  }
  return true;
}

std::shared_ptr<const CellMask> Constraint::compile(const Rect& rect) const {
  if (!has_vertex_restrictions()) return nullptr;
  auto mask = std::make_shared<CellMask>(rect);
  for (const auto& cl : clauses_) {
    switch (cl.kind) {
      case ConstraintKind::kNone:
      case ConstraintKind::kThroughRegion:
        break;
      case ConstraintKind::kAvoidRegion:
        for (const auto& p : cl.region.parallelograms) {
          for (Coord t = std::max(p.w, rect.x_min); t <= std::min(p.w + p.length, rect.x_max); ++t) {
            mask->block_column_range(t, p.row_min(t), p.row_max(t));
          }
        }
        for (const auto& r : cl.region.rects) {
          for (Coord t = std::max(r.x_min, rect.x_min); t <= std::min(r.x_max, rect.x_max); ++t) {
            mask->block_column_range(t, r.y_min, r.y_max);
          }
        }
        break;
      case ConstraintKind::kAvoidVertexSet:
        for (const auto& v : cl.vertices) mask->block(v.x, v.y);
        break;
      case ConstraintKind::kStayWeaklyAbovePath:
      case ConstraintKind::kStayStrictlyAbovePath:
        for (std::size_t i = 0; i < cl.forbid_up_to.size(); ++i) {
          mask->block_column_range(cl.first_column + static_cast<Coord>(i), rect.y_min, cl.forbid_up_to[i]);
        }
        break;
      case ConstraintKind::kHeightAtColumn:
        if (cl.min_height) mask->block_column_range(cl.column, rect.y_min, *cl.min_height - 1);
        if (cl.max_height) mask->block_column_range(cl.column, *cl.max_height + 1, rect.y_max);
        break;
    }
  }
  return mask;
}

}  // namespace lpp
