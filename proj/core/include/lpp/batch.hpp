#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lpp/constraint.hpp"
#include "lpp/field.hpp"
#include "lpp/lattice.hpp"

namespace lpp {

/// Many forward sources on one column, swept together to one target column.
/// Rows outside [row_lo, row_hi] are not available to paths.
struct ColumnSweep {
  Coord source_column = 0;
  std::vector<Coord> source_rows;
  Coord target_column = 0;
  Coord row_lo = 0;
  Coord row_hi = 0;
  const CellMask* mask = nullptr;
};

/// Called once per source with T(source, (target_column, row_lo + r)) in
/// values[r]; -inf where unreachable. Returning false stops the sweep.
using ColumnVisitor = std::function<bool(std::size_t source, const double* values)>;

/// Evaluates passage times for all sources 32 at a time. Values are bitwise
/// identical to PassageSurface::forward restricted to the same rows. Returns
/// false when the visitor stopped early.
bool sweep_sources_to_column(const WeightField& field, const ColumnSweep& spec, const ColumnVisitor& visit);

inline constexpr std::size_t kSweepLanes = 32;

}  // namespace lpp
