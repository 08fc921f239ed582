#pragma once

// Storage behind PassageSurface. Internal header.

#include <list>
#include <memory>

#include "lpp/surface.hpp"
#include "sweep.hpp"

namespace lpp::detail {

// Per-tracer memo of recomputed blocks; the concrete type depends on the
// value precision.
class BlockCacheBase {
 public:
  virtual ~BlockCacheBase() = default;
};

class SurfaceData {
 public:
  virtual ~SurfaceData() = default;

  Vertex anchor;
  Orientation orientation = Orientation::kForward;
  Rect rect;
  Rect active;
  LocalFrame frame;
  SurfaceOptions options;
  bool checkpointed = false;
  WeightField field = WeightField::unbounded(FieldKey{});
  std::shared_ptr<const CellMask> mask;

  virtual std::unique_ptr<BlockCacheBase> make_cache() const = 0;
  virtual double value(Coord i, Coord j, BlockCacheBase& cache) const = 0;
  virtual Path trace(const Vertex& endpoint, const TraceStop& stop, BlockCacheBase& cache) const = 0;
};

}  // namespace lpp::detail
