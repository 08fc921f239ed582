#pragma once

#include <cstdint>
#include <optional>

#include "lpp/constraint.hpp"
#include "lpp/field.hpp"
#include "lpp/lattice.hpp"
#include "lpp/path.hpp"
#include "lpp/surface.hpp"

namespace lpp {

/// T(u, v) with two rolling anti-diagonals, O(width) memory.
/// OrderError unless u ⪯ v.
double passage_time(const WeightField& field, const Vertex& u, const Vertex& v,
                    Precision precision = Precision::kDouble);

/// The geodesic Γ(u, v); storage switches to checkpointing above the budget.
Path geodesic(const WeightField& field, const Vertex& u, const Vertex& v,
              const SurfaceOptions& options = {});

struct PassageResult {
  double time = 0.0;
  Path path;
};

/// Best admissible path from u to v, absent when none exists.
std::optional<PassageResult> constrained_passage_time(const WeightField& field, const Vertex& u,
                                                      const Vertex& v, const Constraint& constraint,
                                                      const SurfaceOptions& options = {});

/// Same value without the path (rolling memory). Through-region clauses need
/// surfaces, so they fall back to constrained_passage_time.
std::optional<double> constrained_passage_value(const WeightField& field, const Vertex& u,
                                                const Vertex& v, const Constraint& constraint);

/// Number of up/right paths from u to v, saturating at UINT64_MAX.
std::uint64_t count_paths(const Vertex& u, const Vertex& v);

inline constexpr std::uint64_t kBruteForceLimit = 1'000'000;

/// Exhaustive maximum over every up/right path (test oracle). CapacityError
/// above kBruteForceLimit paths.
PassageResult brute_force_passage(const WeightField& field, const Vertex& u, const Vertex& v);

/// Exhaustive maximum over admissible paths only.
std::optional<PassageResult> brute_force_constrained(const WeightField& field, const Vertex& u,
                                                     const Vertex& v, const Constraint& constraint);

}  // namespace lpp
