#include "lpp/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lpp/batch.hpp"
#include "lpp/errors.hpp"
#include "lpp/geometry.hpp"
#include "lpp/passage.hpp"

namespace lpp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("barrier: " + what);
}

double two_thirds(double v) { return std::pow(v, 2.0 / 3.0); }

// Index of the first vertex of the path equal to v.
std::size_t index_of(const Path& path, const Vertex& v) {
  const auto it = std::lower_bound(path.vertices.begin(), path.vertices.end(), v,
                                   [](const Vertex& a, const Vertex& b) { return antidiagonal(a) < antidiagonal(b); });
  if (it == path.vertices.end() || *it != v) throw DomainError("vertex " + to_string(v) + " is not on the path");
  return static_cast<std::size_t>(it - path.vertices.begin());
}

}  // namespace

Rect BarrierSpec::bounds() const {
  Rect r{std::min(a1.x, b1.x), std::max(a2.x, b2.x), std::min(a1.y, b1.y), std::max(a2.y, b2.y)};
  for (const WallSegment& w : {l1, l2, l3}) {
    r.y_min = std::min(r.y_min, w.y_lo);
    r.y_max = std::max(r.y_max, w.y_hi);
  }
  return r;
}

BarrierSpec build_spec(const BarrierParams& p) {
  require(p.z >= 8, "z must be at least 8, got " + std::to_string(p.z));
  require(p.r >= 1, "r must be at least 1");
  for (const double c : {p.big_m, p.big_s, p.big_h}) {
    require(std::isfinite(c) && c > 0.0, "M, S and H must be positive");
  }
  const double llz = std::log(std::log(static_cast<double>(p.z)));
  const double llz2 = std::log(2.0 * std::log(static_cast<double>(p.z)));
  require(p.u0 >= 0.0 && p.u0 <= llz, "u0 must lie in [0, ln ln z] = [0, " + std::to_string(llz) + "]");
  require(p.v0 >= 0.0 && p.v0 <= llz2, "v0 must lie in [0, ln ln z^2] = [0, " + std::to_string(llz2) + "]");

  BarrierSpec s;
  s.params = p;
  const double z = static_cast<double>(p.z);
  const double r = static_cast<double>(p.r);
  s.x = floor_scaled_power(r, z, 1.5);
  s.width = s.x / 10;
  s.mx = s.x + s.width;
  s.x_prime = floor_tolerant(2.1 * static_cast<double>(s.x));
  s.x_third = std::cbrt(static_cast<double>(s.x));

  const double xd = static_cast<double>(s.x);
  const Coord below = floor_scaled_power(2.0 * p.big_m, xd, 2.0 / 3.0);
  const Coord above = floor_scaled_power(2.0 * p.big_m + p.big_s, xd, 2.0 / 3.0);
  s.barrier = Parallelogram{s.x, s.width, below, above};
  s.inner = Parallelogram{s.x, s.width, below, below};
  s.l1 = WallSegment{s.x, s.x - below, s.x + above};
  s.l2 = WallSegment{s.mx, s.mx - below, s.mx + above};
  const double xp = static_cast<double>(s.x_prime);
  s.l3 = WallSegment{s.x_prime, s.x_prime - floor_scaled_power(2.0 * p.big_m, xp, 2.0 / 3.0),
                     s.x_prime + floor_scaled_power(2.0 * p.big_m + p.big_s, xp, 2.0 / 3.0)};

  const Coord near = p.z * p.r;
  const Coord far = p.z * p.z * p.r;
  const Coord du = floor_scaled_power(p.u0, static_cast<double>(near), 2.0 / 3.0);
  const Coord dv = floor_scaled_power(p.v0, static_cast<double>(far), 2.0 / 3.0);
  s.a1 = Vertex{near, near + du};
  s.b1 = Vertex{near, near - du};
  s.a2 = Vertex{far, far + dv};
  s.b2 = Vertex{far, far - dv};

  require(s.width >= 1, "barrier of zero width");
  require(below >= 1 && above >= 1, "walls of zero height");
  require(s.a1.x < s.x && s.x_prime < s.a2.x, "walls must lie strictly between the endpoints");
  return s;
}

double shape_mean(const Vertex& u, const Vertex& v) {
  const double a = std::sqrt(static_cast<double>(v.x - u.x));
  const double b = std::sqrt(static_cast<double>(v.y - u.y));
  return (a + b) * (a + b);
}

double centered_time(const WeightField& field, const Vertex& u, const Vertex& v, Centering mode) {
  if (!precedes(u, v)) throw OrderError(to_string(u) + " does not precede " + to_string(v));
  if (u == v) return 0.0;
  const double t = passage_time(field, u, v);
  if (mode == Centering::kDiagonal) return t - 2.0 * static_cast<double>(l1_distance(u, v));
  const double dx = static_cast<double>(v.x - u.x);
  const double dy = static_cast<double>(v.y - u.y);
  if (dy * kSlopeBound < dx || dy > kSlopeBound * dx) {
    throw DomainError("slope of " + to_string(u) + " -> " + to_string(v) + " outside [1/10, 10]");
  }
  return t - shape_mean(u, v);
}

namespace {

// Largest |T - mu| over both wing clauses; the sweep stops once it exceeds
// `stop_above`.
double wing_scan(const WeightField& field, const BarrierSpec& spec, double stop_above) {
  double worst = 0.0;

  // (i) one source, a1, swept to the left wall.
  const Vertex a1 = spec.a1;
  if (spec.l1.y_hi >= a1.y) {
    ColumnSweep sweep;
    sweep.source_column = a1.x;
    sweep.source_rows = {a1.y};
    sweep.target_column = spec.l1.column;
    sweep.row_lo = a1.y;
    sweep.row_hi = spec.l1.y_hi;
    sweep_sources_to_column(field, sweep, [&](std::size_t, const double* t) {
      for (Coord y = std::max(spec.l1.y_lo, a1.y); y <= spec.l1.y_hi; ++y) {
        worst = std::max(worst, std::abs(t[y - sweep.row_lo] - shape_mean(a1, Vertex{spec.l1.column, y})));
      }
      return true;
    });
    if (worst > stop_above) return worst;
  }

  // (ii) every point of L2 swept to L3.
  ColumnSweep sweep;
  sweep.source_column = spec.l2.column;
  for (Coord y = spec.l2.y_lo; y <= spec.l2.y_hi; ++y) sweep.source_rows.push_back(y);
  sweep.target_column = spec.l3.column;
  sweep.row_lo = spec.l2.y_lo;
  sweep.row_hi = std::max(spec.l2.y_hi, spec.l3.y_hi);
  sweep_sources_to_column(field, sweep, [&](std::size_t i, const double* t) {
    const Vertex u{spec.l2.column, sweep.source_rows[i]};
    for (Coord y = std::max(spec.l3.y_lo, u.y); y <= spec.l3.y_hi; ++y) {
      worst = std::max(worst, std::abs(t[y - sweep.row_lo] - shape_mean(u, Vertex{spec.l3.column, y})));
    }
    return worst <= stop_above;
  });
  return worst;
}

// Largest T^γ - mu over the barrier pairs, -inf when no pair is joined by a
// path avoiding γ.
double barrier_scan(const WeightField& field, const BarrierSpec& spec, const Path& gamma, double stop_above) {
  const Coord gx = gamma_at(gamma, spec.x);
  const Coord gmx = gamma_at(gamma, spec.mx);
  const Coord first = std::max(gx, spec.l1.y_lo);
  double worst = kNegInf;
  if (first > spec.l1.y_hi) return worst;

  const Rect rect{spec.x, spec.mx, first, std::max(spec.l1.y_hi, spec.l2.y_hi)};
  CellMask mask(rect);
  for (const Vertex& u : gamma.vertices) mask.block(u.x, u.y);

  ColumnSweep sweep;
  sweep.source_column = spec.x;
  for (Coord y = first; y <= spec.l1.y_hi; ++y) sweep.source_rows.push_back(y);
  sweep.target_column = spec.mx;
  sweep.row_lo = rect.y_min;
  sweep.row_hi = rect.y_max;
  sweep.mask = &mask;
  sweep_sources_to_column(field, sweep, [&](std::size_t i, const double* t) {
    const Vertex u{spec.x, sweep.source_rows[i]};
    for (Coord y = std::max({gmx, u.y, spec.l2.y_lo}); y <= spec.l2.y_hi; ++y) {
      const double tv = t[y - sweep.row_lo];
      if (tv != kNegInf) worst = std::max(worst, tv - shape_mean(u, Vertex{spec.mx, y}));
    }
    return !(worst > stop_above);
  });
  return worst;
}

}  // namespace

double wing_extreme(const WeightField& field, const BarrierSpec& spec) {
  return wing_scan(field, spec, std::numeric_limits<double>::infinity());
}

bool check_wing(const WeightField& field, const BarrierSpec& spec) {
  const double bound = spec.params.big_h * std::sqrt(spec.params.big_s) * spec.x_third;
  return wing_scan(field, spec, bound) <= bound;
}

TypicalFlags check_typical(const WeightField& field, const BarrierSpec& spec, const Path& gamma) {
  const BarrierParams& p = spec.params;
  const Coord gx = gamma_at(gamma, spec.x);
  const Coord gmx = gamma_at(gamma, spec.mx);
  const Coord gxp = gamma_at(gamma, spec.x_prime);
  const Vertex v{spec.x, gx};
  const Vertex w{spec.mx, gmx};

  TypicalFlags f;
  const std::size_t i = index_of(gamma, v);
  const std::size_t j = index_of(gamma, w);
  const std::vector<Vertex> piece(gamma.vertices.begin() + static_cast<std::ptrdiff_t>(i),
                                  gamma.vertices.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  const double len = path_weight(field, piece);
  const double bound = p.big_h * std::sqrt(p.big_m) * spec.x_third;
  f.weight_shape = std::abs(len - shape_mean(v, w)) <= bound;
  f.weight_diagonal = std::abs(len - 2.0 * static_cast<double>(l1_distance(v, w))) <= bound;

  auto near_diagonal = [&](Coord c, Coord y) {
    return std::abs(static_cast<double>(y - c)) <= p.big_m * two_thirds(static_cast<double>(c));
  };
  f.deviation_x = near_diagonal(spec.x, gx);
  f.deviation_mx = near_diagonal(spec.mx, gmx);
  f.deviation_x_prime = near_diagonal(spec.x_prime, gxp);
  f.inside_inner = true;
  for (const Vertex& u : gamma.vertices) {
    if (u.x >= spec.x && u.x <= spec.mx && !spec.inner.contains(u)) {
      f.inside_inner = false;
      break;
    }
  }
  return f;
}

PathConditionFlags check_path_condition(const WeightField& field, const BarrierSpec& spec, const Path& gamma) {
  const BarrierParams& p = spec.params;
  PathConditionFlags out;
  out.reliable = check_typical(field, spec, gamma).geometric();

  const Vertex v{spec.x, gamma_at(gamma, spec.x)};
  const Vertex w{spec.mx, gamma_at(gamma, spec.mx)};
  if (precedes(spec.a1, v) && precedes(w, spec.a2)) {
    const std::vector<Vertex> piece(gamma.vertices.begin() + static_cast<std::ptrdiff_t>(index_of(gamma, v)),
                                    gamma.vertices.begin() + static_cast<std::ptrdiff_t>(index_of(gamma, w)) + 1);
    out.t_gamma = passage_time(field, spec.a1, v) + path_weight(field, piece) + passage_time(field, w, spec.a2);
  }

  const Constraint above = Constraint::stay_above(gamma, p.strict_above, spec.x, spec.mx);
  const double margin = std::sqrt(p.big_s) * spec.x_third;
  const std::array<Coord, 3> columns{spec.x, spec.mx, spec.x_prime};
  std::array<bool, 3> holds{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double c = static_cast<double>(columns[i]);
    const Coord threshold = floor_tolerant(c + (2.0 * p.big_m + p.big_s) * two_thirds(c));
    Constraint k = Constraint::height_at_column(columns[i], threshold + 1, std::nullopt);
    k.also(above);
    if (threshold < spec.a2.y) out.f[i] = constrained_passage_value(field, spec.a1, spec.a2, k);
    holds[i] = !out.f[i] || *out.f[i] < out.t_gamma - margin;
  }
  out.a1 = holds[0];
  out.a2 = holds[1];
  out.a3 = holds[2];
  return out;
}

double barrier_extreme(const WeightField& field, const BarrierSpec& spec, const Path& gamma) {
  return barrier_scan(field, spec, gamma, std::numeric_limits<double>::infinity());
}

bool check_barrier_condition(const WeightField& field, const BarrierSpec& spec, const Path& gamma) {
  const double limit = -std::pow(spec.params.big_s, 4.0) * spec.x_third;
  return !(barrier_scan(field, spec, gamma, limit) > limit);
}

EventFlags run_coalescence_trial(const WeightField& field, const BarrierSpec& spec) {
  const Rect box = spec.bounds();
  const WeightField f = field.cache() == nullptr && box.area() <= kDefaultBlockBudget ? field.with_cache(box) : field;
  const Path gamma0 = geodesic(f, spec.a1, spec.a2);
  const Path gamma = geodesic(f, spec.b1, spec.b2);

  EventFlags e;
  e.f_meet = coalescence_point(gamma0, gamma).has_value();
  e.g = check_wing(f, spec);
  e.typical = check_typical(f, spec, gamma);
  e.path = check_path_condition(f, spec, gamma);
  e.barrier_max = barrier_extreme(f, spec, gamma);
  e.r_gamma = !(e.barrier_max > -std::pow(spec.params.big_s, 4.0) * spec.x_third);
  return e;
}

}  // namespace lpp
