#pragma once

#include <array>
#include <optional>
#include <string>

#include "lpp/constraint.hpp"
#include "lpp/field.hpp"
#include "lpp/lattice.hpp"
#include "lpp/path.hpp"

namespace lpp {

/// Integer points (column, y) for y in [y_lo, y_hi].
struct WallSegment {
  Coord column = 0;
  Coord y_lo = 0;
  Coord y_hi = 0;

  Coord size() const { return y_hi - y_lo + 1; }
  bool contains(const Vertex& v) const { return v.x == column && v.y >= y_lo && v.y <= y_hi; }
};

struct BarrierParams {
  Coord z = 64;
  Coord r = 1;
  double big_m = 2.0;
  double big_s = 32.0;
  double big_h = 12.0;
  double u0 = 1.0;
  double v0 = 1.0;
  // Stay-above clause of the path condition: vertex-disjoint and above
  // (strict) or merely not below (weak).
  bool strict_above = true;
};

/// Barrier geometry at scale z. With x = floor(z^{3/2} r):
///   B  = P(x, floor(x/10), floor(2M x^{2/3}), floor((2M+S) x^{2/3}))
///   B0 = P(x, floor(x/10), floor(2M x^{2/3}), floor(2M x^{2/3}))
/// mx = x + floor(x/10) is the right wall, x' = floor(2.1 x).
struct BarrierSpec {
  BarrierParams params;
  Coord x = 0;
  Coord width = 0;
  Coord mx = 0;
  Coord x_prime = 0;
  double x_third = 0.0;  // x^{1/3}
  Parallelogram barrier;
  Parallelogram inner;
  WallSegment l1;
  WallSegment l2;
  WallSegment l3;
  Vertex a1;
  Vertex b1;
  Vertex a2;
  Vertex b2;

  /// Smallest rectangle holding every point used by a trial.
  Rect bounds() const;
};

/// ParameterError on z < 8, nonpositive constants, u0 outside [0, ln ln z],
/// v0 outside [0, ln ln z^2], and degenerate walls.
BarrierSpec build_spec(const BarrierParams& params);

enum class Centering {
  kShape,     // T - (sqrt(dx) + sqrt(dy))^2
  kDiagonal,  // T - 2 d(u, u')
};

/// (sqrt(dx) + sqrt(dy))^2 for the displacement u -> u'.
double shape_mean(const Vertex& u, const Vertex& v);

inline constexpr double kSlopeBound = 10.0;

/// Centered passage time. Shape centering needs the slope dy/dx within
/// [1/10, 10] (DomainError otherwise); u == v gives 0 in both modes.
double centered_time(const WeightField& field, const Vertex& u, const Vertex& v, Centering mode);

/// Wing event G: clause (i) bounds |T(a1, u) - mu| for u on L1, clause (ii)
/// bounds |T(u', v) - mu| for u' on L2 and v on L3, both by H sqrt(S) x^{1/3}.
/// Pairs with no up/right path between them are skipped.
bool check_wing(const WeightField& field, const BarrierSpec& spec);
/// Largest |T - mu| over the wing pairs (no early exit).
double wing_extreme(const WeightField& field, const BarrierSpec& spec);

struct TypicalFlags {
  bool weight_shape = false;     // |l(γ[x,mx]) - mu| <= H sqrt(M) x^{1/3}
  bool weight_diagonal = false;  // |l(γ[x,mx]) - 2d| <= H sqrt(M) x^{1/3}
  bool deviation_x = false;
  bool deviation_mx = false;
  bool deviation_x_prime = false;
  bool inside_inner = false;     // γ on [x, mx] stays in B0

  bool geometric() const { return deviation_x && deviation_mx && deviation_x_prime && inside_inner; }
  bool typical() const { return weight_shape && weight_diagonal && geometric(); }
  std::array<bool, 6> as_array() const {
    return {weight_shape, weight_diagonal, deviation_x, deviation_mx, deviation_x_prime, inside_inner};
  }
};

/// DomainError when γ misses column x, mx or x'.
TypicalFlags check_typical(const WeightField& field, const BarrierSpec& spec, const Path& gamma);

struct PathConditionFlags {
  bool a1 = false;
  bool a2 = false;
  bool a3 = false;
  double t_gamma = kNegInf;            // best a1 -> a2 path through γ[x, mx]
  std::array<std::optional<double>, 3> f;  // absent: no admissible path
  bool reliable = false;               // γ met the geometric typicality flags

  bool a_gamma() const { return a1 && a2 && a3; }
};

/// Path condition A_γ. F_i is the best a1 -> a2 path that stays above γ on
/// [x, mx] and is strictly higher than y_i at column c_i, with
/// (c_i, y_i) = (x, x + (2M+S)x^{2/3}), (mx, mx + (2M+S)mx^{2/3}),
/// (x', x' + (2M+S)x'^{2/3}). A_i holds when F_i < T_γ - sqrt(S) x^{1/3}.
PathConditionFlags check_path_condition(const WeightField& field, const BarrierSpec& spec, const Path& gamma);

/// Barrier event R_γ: every pair u on L1 above (x, γ(x)) and u' on L2 above
/// (mx, γ(mx)) joined by a path avoiding γ has T^γ(u, u') - mu <= -S^4 x^{1/3}.
bool check_barrier_condition(const WeightField& field, const BarrierSpec& spec, const Path& gamma);
/// Largest T^γ(u, u') - mu over those pairs; -inf when none is joined.
double barrier_extreme(const WeightField& field, const BarrierSpec& spec, const Path& gamma);

struct EventFlags {
  bool g = false;
  TypicalFlags typical;
  PathConditionFlags path;
  bool r_gamma = false;
  double barrier_max = kNegInf;  // barrier_extreme on γ
  bool f_meet = false;

  bool favourable() const { return g && typical.typical() && path.a_gamma() && r_gamma; }
};

/// All events on one field: Γ0 = Γ(a1, a2), γ = Γ(b1, b2), F_meet when the two
/// geodesics share a vertex.
EventFlags run_coalescence_trial(const WeightField& field, const BarrierSpec& spec);

}  // namespace lpp
