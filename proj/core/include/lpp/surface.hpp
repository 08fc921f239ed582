#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "lpp/constraint.hpp"
#include "lpp/field.hpp"
#include "lpp/lattice.hpp"
#include "lpp/path.hpp"

namespace lpp {

enum class Orientation { kForward, kBackward };
enum class Storage { kAuto, kDense, kCheckpointed };
enum class Precision { kDouble, kSingle };

inline constexpr std::uint64_t kDefaultCellBudget = std::uint64_t{1} << 25;

struct SurfaceOptions {
  Storage storage = Storage::kAuto;
  Coord checkpoint_block = 1024;  // retain every B-th anti-diagonal
  std::uint64_t cell_budget = kDefaultCellBudget;
  // Single precision halves memory; traced geodesics may then differ from
  // the double-precision ones.
  Precision precision = Precision::kDouble;
  std::size_t block_cache = 2;  // recomputed blocks kept by a tracer
};

// Early end of a trace that runs in the direction of increasing coordinates
// (backward surfaces). The first vertex reaching either bound is the last one.
struct TraceStop {
  std::optional<Coord> max_antidiagonal;
  std::optional<Coord> max_column;

  bool any() const { return max_antidiagonal.has_value() || max_column.has_value(); }
};

namespace detail {
class SurfaceData;
}

/// Last-passage values relative to a fixed anchor.
///
/// Forward: value(v) = T(anchor, v), the best weight of an up/right path from
/// the anchor to v, summing every vertex except v. Backward: value(v) =
/// T(v, anchor). Cells outside the anchor's cone, or cut off by a mask, hold
/// -inf. Surfaces are immutable and can be shared between threads.
class PassageSurface {
 public:
  static PassageSurface forward(const WeightField& field, const Vertex& source, const Rect& rect,
                                const SurfaceOptions& options = {},
                                std::shared_ptr<const CellMask> mask = nullptr);
  static PassageSurface backward(const WeightField& field, const Vertex& sink, const Rect& rect,
                                 const SurfaceOptions& options = {},
                                 std::shared_ptr<const CellMask> mask = nullptr);

  const Vertex& anchor() const;
  Orientation orientation() const;
  const Rect& rect() const;
  // Part of rect() inside the anchor's cone.
  const Rect& active() const;
  bool checkpointed() const;
  Precision precision() const;
  const WeightField& field() const;
  const CellMask* mask() const;

  /// DomainError outside rect(). On checkpointed surfaces this recomputes a
  /// block per call; use a GeodesicTracer for repeated queries.
  double value(const Vertex& v) const;

  /// Geodesic between the anchor and `endpoint`, through a temporary tracer.
  Path trace(const Vertex& endpoint, const TraceStop& stop = {}) const;

  const std::shared_ptr<const detail::SurfaceData>& data() const { return data_; }

 private:
  explicit PassageSurface(std::shared_ptr<const detail::SurfaceData> data) : data_(std::move(data)) {}
  std::shared_ptr<const detail::SurfaceData> data_;
};

/// Traceback cursor over one surface. Keeps a small cache of recomputed
/// blocks, so it is cheap to trace many geodesics that share a region.
/// Not thread-safe; use one tracer per thread.
class GeodesicTracer {
 public:
  explicit GeodesicTracer(const PassageSurface& surface);
  ~GeodesicTracer();
  GeodesicTracer(GeodesicTracer&&) noexcept;
  GeodesicTracer& operator=(GeodesicTracer&&) noexcept;

  double value(const Vertex& v);

  /// Forward surface: path anchor -> endpoint. Backward surface: path
  /// endpoint -> anchor, optionally cut short by `stop`. At an exact tie the
  /// horizontal step wins. NoPathError when the endpoint is unreachable.
  Path trace(const Vertex& endpoint, const TraceStop& stop = {});

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace lpp
