#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lpp/field.hpp"
#include "lpp/lattice.hpp"
#include "lpp/path.hpp"
#include "lpp/surface.hpp"

namespace lpp {

/// Γ(ℓ): the largest y with (ℓ, y) on the path. DomainError when column ℓ
/// is outside the path's span.
Coord gamma_at(const Path& path, Coord column);
/// Γ⁻¹(ℓ): the largest x with (x, ℓ) on the path.
Coord gamma_inv(const Path& path, Coord row);

/// max |x - y| over the path's vertices.
Coord transversal_fluctuation(const Path& path);

/// Bit i - 1 set iff |Γ(M^i k) - M^i k| >= s (M^i k)^{2/3}, for i = 1..levels.
std::vector<bool> dyadic_tf_events(const Path& path, Coord k, Coord m, double s, int levels);

struct CommonPoint {
  Vertex v_star;      // minimal x + y, ties to smaller x
  Coord min_x = 0;    // v*_1 = min{x : (x, y) common}
};

/// First common vertex of two paths; absent when they are disjoint.
std::optional<CommonPoint> coalescence_point(const Path& p1, const Path& p2);

/// Finite-target approximation of semi-infinite geodesics in direction (1,1).
/// Targets are (N, N) with N = c0 * horizon * 2^j, j = 0..max_doublings; a
/// prefix is accepted once two successive targets give identical prefixes up
/// to the line x + y = horizon.
struct SemiInfiniteScheme {
  Coord initial_target_factor = 8;
  int max_doublings = 6;
  Coord horizon = 256;

  void validate() const;
  Coord target(int doubling) const { return initial_target_factor * horizon << doubling; }
};

struct PrefixFamily {
  std::vector<Path> prefixes;  // one per start, each ending on x + y = horizon
  bool converged = false;
  Vertex target_used;
};

/// Prefixes of the semi-infinite geodesics from every start, all traced
/// against one shared backward surface per target. A target too large for
/// the memory budget ends the doubling with converged = false.
PrefixFamily semi_infinite_prefixes(const WeightField& field, const std::vector<Vertex>& starts,
                                    const SemiInfiniteScheme& scheme,
                                    const SurfaceOptions& options = {});

struct SemiInfinitePrefix {
  Path path;
  bool converged = false;
  Vertex target_used;
};

SemiInfinitePrefix semi_infinite_prefix(const WeightField& field, const Vertex& v,
                                        const SemiInfiniteScheme& scheme,
                                        const SurfaceOptions& options = {});

struct HitPoint {
  Vertex f;
  bool converged = false;
  Vertex target_used;
};

/// f(v): the first vertex of Γ_v on the line x + y = k.
HitPoint hit_point(const WeightField& field, const Vertex& v, Coord k, const SemiInfiniteScheme& scheme,
                   const SurfaceOptions& options = {});

struct CoalescenceRecord {
  std::optional<Vertex> v_star;
  std::optional<Coord> d;  // v_star.x + v_star.y
  bool converged = false;
  Vertex target_used;
  Coord horizon = 0;       // d absent means d > horizon
};

/// Coalescence of Γ_v and Γ_v' within the scheme's horizon.
CoalescenceRecord coalescence_distance(const WeightField& field, const Vertex& v, const Vertex& w,
                                       const SemiInfiniteScheme& scheme,
                                       const SurfaceOptions& options = {});

/// Repeats coalescence_distance with horizons h0, 2 h0, ... up to h_max and
/// stops at the first horizon where the geodesics meet. Small horizons need
/// small targets, so typical replicates stay cheap.
CoalescenceRecord staged_coalescence_distance(const WeightField& field, const Vertex& v, const Vertex& w,
                                              Coord first_horizon, Coord max_horizon,
                                              const SemiInfiniteScheme& scheme,
                                              const SurfaceOptions& options = {});

/// Index along two prefixes that start on the same anti-diagonal: first
/// position where they share a vertex.
std::optional<std::size_t> first_meeting(const Path& a, const Path& b);

struct BoundaryIndicators {
  Coord i_first = 0;
  std::vector<std::uint8_t> bits;  // bits[j] = X_{i_first + j}
  bool converged = false;
  Vertex target_used;
};

/// X_i = 1 iff d(u_i, u_{i+1}) > k, with u_i = (-i, i), for i in [i_lo, i_hi].
/// The horizon is max(k, 1); the scheme's own horizon is ignored. The target
/// doubling stops once the indicator vector, rather than every prefix, is the
/// same for two successive targets.
BoundaryIndicators boundary_indicators(const WeightField& field, Coord k, Coord i_lo, Coord i_hi,
                                       const SemiInfiniteScheme& scheme,
                                       const SurfaceOptions& options = {});

}  // namespace lpp
