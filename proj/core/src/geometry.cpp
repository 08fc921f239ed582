#include "lpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpp/errors.hpp"

namespace lpp {

Coord gamma_at(const Path& path, Coord column) {
  if (path.empty() || column < path.front().x || column > path.back().x) {
    throw DomainError("column " + std::to_string(column) + " outside the path's span");
  }
  // Up/right paths are sorted by x; the last vertex with x == column is
  // the top of its vertical run.
  auto it = std::upper_bound(path.vertices.begin(), path.vertices.end(), column,
                             [](Coord c, const Vertex& v) { return c < v.x; });
  return std::prev(it)->y;
}

Coord gamma_inv(const Path& path, Coord row) {
  if (path.empty() || row < path.front().y || row > path.back().y) {
    throw DomainError("row " + std::to_string(row) + " outside the path's span");
  }
  auto it = std::upper_bound(path.vertices.begin(), path.vertices.end(), row,
                             [](Coord r, const Vertex& v) { return r < v.y; });
  return std::prev(it)->x;
}

Coord transversal_fluctuation(const Path& path) {
  Coord tf = 0;
  for (const auto& v : path.vertices) tf = std::max(tf, v.x > v.y ? v.x - v.y : v.y - v.x);
  return tf;
}

std::vector<bool> dyadic_tf_events(const Path& path, Coord k, Coord m, double s, int levels) {
  if (k < 1 || m < 2 || levels < 1) throw ParameterError("dyadic events need k >= 1, M >= 2, levels >= 1");
  std::vector<bool> bits;
  Coord col = k;
  for (int i = 1; i <= levels; ++i) {
    col *= m;
    const Coord dev = gamma_at(path, col) - col;
    const double bound = s * std::pow(static_cast<double>(col), 2.0 / 3.0);
    bits.push_back(static_cast<double>(dev < 0 ? -dev : dev) >= bound);
  }
  return bits;
}

std::optional<CommonPoint> coalescence_point(const Path& p1, const Path& p2) {
  // Both vertex lists are sorted lexicographically.
  std::optional<CommonPoint> out;
  std::size_t j = 0;
  for (const auto& v : p1.vertices) {
    while (j < p2.size() && p2.vertices[j] < v) ++j;
    if (j == p2.size()) break;
    if (p2.vertices[j] != v) continue;
    if (!out) {
      out = CommonPoint{v, v.x};
      continue;
    }
    const Coord s = v.x + v.y;
    const Coord best = out->v_star.x + out->v_star.y;
    if (s < best || (s == best && v.x < out->v_star.x)) out->v_star = v;
    out->min_x = std::min(out->min_x, v.x);
  }
  return out;
}

void SemiInfiniteScheme::validate() const {
  if (initial_target_factor < 2) throw ParameterError("initial target factor must be at least 2");
  if (horizon < 1) throw ParameterError("horizon must be at least 1");
  if (max_doublings < 1 || max_doublings > 20) throw ParameterError("max doublings must be in [1, 20]");
}

std::optional<std::size_t> first_meeting(const Path& a, const Path& b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0 || antidiagonal(a.front()) != antidiagonal(b.front())) {
    throw ParameterError("prefixes must start on the same anti-diagonal");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (a.vertices[i] == b.vertices[i]) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<Path> prefixes_to(const WeightField& field, const std::vector<Vertex>& starts, Coord n,
                              Coord horizon, const SurfaceOptions& options) {
  Coord xmin = starts.front().x;
  Coord ymin = starts.front().y;
  for (const auto& s : starts) {
    xmin = std::min(xmin, s.x);
    ymin = std::min(ymin, s.y);
  }
  const auto surface = PassageSurface::backward(field, Vertex{n, n}, Rect{xmin, n, ymin, n}, options);
  GeodesicTracer tracer(surface);
  TraceStop stop;
  stop.max_antidiagonal = horizon;
  std::vector<Path> out;
  out.reserve(starts.size());
  for (const auto& s : starts) out.push_back(tracer.trace(s, stop));
  return out;
}

bool same_vertices(const std::vector<Path>& a, const std::vector<Path>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].vertices != b[i].vertices) return false;
  }
  return true;
}

}  // namespace

namespace {

using StableFn = bool (*)(const std::vector<Path>&, const std::vector<Path>&, Coord);

// Doubles the target until `stable` accepts two successive families. A target
// whose surface does not fit the memory budget ends the search unconverged.
PrefixFamily stabilize(const WeightField& field, const std::vector<Vertex>& starts,
                       const SemiInfiniteScheme& scheme, const SurfaceOptions& options, StableFn stable,
                       Coord k) {
  scheme.validate();
  if (starts.empty()) throw ParameterError("no starting vertices");
  for (const auto& s : starts) {
    if (s.x + s.y >= scheme.horizon) {
      throw ParameterError("start " + to_string(s) + " is not below the horizon line");
    }
  }
  PrefixFamily fam;
  std::vector<Path> prev;
  for (int j = 0; j <= scheme.max_doublings; ++j) {
    const Coord n = scheme.target(j);
    std::vector<Path> cur;
    try {
      cur = prefixes_to(field, starts, n, scheme.horizon, options);
    } catch (const CapacityError&) {
      if (j == 0) throw;
      break;
    }
    fam.target_used = Vertex{n, n};
    if (j > 0 && stable(prev, cur, k)) {
      fam.prefixes = std::move(cur);
      fam.converged = true;
      return fam;
    }
    prev = std::move(cur);
  }
  fam.prefixes = std::move(prev);
  fam.converged = false;
  return fam;
}

bool stable_prefixes(const std::vector<Path>& a, const std::vector<Path>& b, Coord) {
  return same_vertices(a, b);
}

std::vector<std::uint8_t> indicator_bits(const std::vector<Path>& prefixes, Coord k) {
  std::vector<std::uint8_t> bits;
  for (std::size_t j = 0; j + 1 < prefixes.size(); ++j) {
    const auto meet = first_meeting(prefixes[j], prefixes[j + 1]);
    // Index along a prefix equals x + y.
    bits.push_back(!meet || static_cast<Coord>(*meet) > k ? 1 : 0);
  }
  return bits;
}

bool stable_bits(const std::vector<Path>& a, const std::vector<Path>& b, Coord k) {
  return indicator_bits(a, k) == indicator_bits(b, k);
}

}  // namespace

PrefixFamily semi_infinite_prefixes(const WeightField& field, const std::vector<Vertex>& starts,
                                    const SemiInfiniteScheme& scheme, const SurfaceOptions& options) {
  return stabilize(field, starts, scheme, options, stable_prefixes, 0);
}

SemiInfinitePrefix semi_infinite_prefix(const WeightField& field, const Vertex& v,
                                        const SemiInfiniteScheme& scheme, const SurfaceOptions& options) {
  auto fam = semi_infinite_prefixes(field, {v}, scheme, options);
  return SemiInfinitePrefix{std::move(fam.prefixes.front()), fam.converged, fam.target_used};
}

HitPoint hit_point(const WeightField& field, const Vertex& v, Coord k, const SemiInfiniteScheme& scheme,
                   const SurfaceOptions& options) {
  if (v.x + v.y > k) throw ParameterError("start " + to_string(v) + " lies beyond the line x+y=" + std::to_string(k));
  if (v.x + v.y == k) return HitPoint{v, true, v};
  if (scheme.horizon < k) throw ParameterError("scheme horizon is below the hit line");
  const auto pre = semi_infinite_prefix(field, v, scheme, options);
  for (const auto& w : pre.path.vertices) {
    if (w.x + w.y >= k) return HitPoint{w, pre.converged, pre.target_used};
  }
  throw DomainError("prefix did not reach the hit line");
}

CoalescenceRecord coalescence_distance(const WeightField& field, const Vertex& v, const Vertex& w,
                                       const SemiInfiniteScheme& scheme, const SurfaceOptions& options) {
  if (antidiagonal(v) != antidiagonal(w)) throw ParameterError("starts must lie on one anti-diagonal");
  CoalescenceRecord rec;
  rec.horizon = scheme.horizon;
  const auto fam = v == w ? semi_infinite_prefixes(field, {v}, scheme, options)
                          : semi_infinite_prefixes(field, {v, w}, scheme, options);
  rec.converged = fam.converged;
  rec.target_used = fam.target_used;
  const Path& a = fam.prefixes.front();
  const Path& b = fam.prefixes.back();
  if (auto i = first_meeting(a, b)) {
    rec.v_star = a.vertices[*i];
    rec.d = rec.v_star->x + rec.v_star->y;
  }
  return rec;
}

CoalescenceRecord staged_coalescence_distance(const WeightField& field, const Vertex& v, const Vertex& w,
                                              Coord first_horizon, Coord max_horizon,
                                              const SemiInfiniteScheme& scheme,
                                              const SurfaceOptions& options) {
  if (first_horizon < 1 || max_horizon < first_horizon) throw ParameterError("invalid staged horizons");
  SemiInfiniteScheme stage = scheme;
  stage.horizon = first_horizon;
  CoalescenceRecord rec;
  bool all_converged = true;
  while (true) {
    rec = coalescence_distance(field, v, w, stage, options);
    all_converged = all_converged && rec.converged;
    if (rec.d || stage.horizon >= max_horizon) break;
    stage.horizon = std::min(stage.horizon * 2, max_horizon);
  }
  rec.converged = all_converged;
  return rec;
}

BoundaryIndicators boundary_indicators(const WeightField& field, Coord k, Coord i_lo, Coord i_hi,
                                       const SemiInfiniteScheme& scheme, const SurfaceOptions& options) {
  if (i_hi < i_lo) throw ParameterError("empty index range");
  if (k < 0) throw ParameterError("k must be nonnegative");
  SemiInfiniteScheme s = scheme;
  s.horizon = std::max<Coord>(k, 1);
  std::vector<Vertex> starts;
  for (Coord i = i_lo; i <= i_hi + 1; ++i) starts.push_back(Vertex{-i, i});
  const auto fam = stabilize(field, starts, s, options, stable_bits, k);
  BoundaryIndicators out;
  out.i_first = i_lo;
  out.converged = fam.converged;
  out.target_used = fam.target_used;
  out.bits = indicator_bits(fam.prefixes, k);
  return out;
}

}  // namespace lpp
