#include "lpp/surface.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <string>

#include "lpp/errors.hpp"
#include "surface_data.hpp"
#include "sweep.hpp"

namespace lpp {

namespace detail {

namespace {

template <typename T>
struct Block {
  Coord first = 0;
  Coord last = 0;
  std::vector<std::uint64_t> offsets;
  std::vector<T> values;
};

template <typename T>
class BlockCache : public BlockCacheBase {
 public:
  explicit BlockCache(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

  const Block<T>* find(Coord index) {
    for (auto it = blocks_.begin(); it != blocks_.end(); ++it) {
      if (it->first == index) {
        blocks_.splice(blocks_.begin(), blocks_, it);
        return blocks_.front().second.get();
      }
    }
    return nullptr;
  }

  const Block<T>* insert(Coord index, std::unique_ptr<Block<T>> block) {
    if (blocks_.size() >= capacity_) blocks_.pop_back();
    blocks_.emplace_front(index, std::move(block));
    return blocks_.front().second.get();
  }

 private:
  std::size_t capacity_;
  std::list<std::pair<Coord, std::unique_ptr<Block<T>>>> blocks_;
};

template <typename T>
class SurfaceImpl final : public SurfaceData {
 public:
  void build() {
    const Coord last = frame.last_diagonal();
    Sweeper<T> sweep(field, frame, orientation == Orientation::kForward, mask.get());
    sweep.start();
    if (!checkpointed) {
      offsets_.resize(static_cast<std::size_t>(last) + 2);
      dense_.resize(active.area());
    }
    const Coord block = options.checkpoint_block;
    for (Coord d = 0; d <= last; ++d) {
      if (d > 0) sweep.step();
      const Coord lo = frame.lo(d);
      const Coord n = frame.length(d);
      const T* v = sweep.values() + lo;
      if (!checkpointed) {
        const std::uint64_t off = d == 0 ? 0 : offsets_[d];
        std::copy(v, v + n, dense_.begin() + static_cast<std::ptrdiff_t>(off));
        offsets_[d + 1] = off + static_cast<std::uint64_t>(n);
      } else if (d % block == 0) {
        checkpoints_.emplace_back(v, v + n);
      }
    }
  }

  std::unique_ptr<BlockCacheBase> make_cache() const override {
    return std::make_unique<BlockCache<T>>(options.block_cache);
  }

  double value(Coord i, Coord j, BlockCacheBase& cache) const override {
    if (!frame.contains_local(i, j)) return kNegInf;
    return static_cast<double>(get(i, j, static_cast<BlockCache<T>&>(cache)));
  }

  Path trace(const Vertex& endpoint, const TraceStop& stop, BlockCacheBase& base) const override {
    auto& cache = static_cast<BlockCache<T>&>(base);
    if (!rect.contains(endpoint)) {
      throw DomainError("endpoint " + to_string(endpoint) + " outside surface rect " + to_string(rect));
    }
    Coord i = frame.local_i(endpoint);
    Coord j = frame.local_j(endpoint);
    if (!frame.contains_local(i, j) || get(i, j, cache) == kMinusInf<T>) {
      throw NoPathError("no admissible path between " + to_string(anchor) + " and " + to_string(endpoint));
    }
    Path path;
    if (orientation == Orientation::kForward) {
      if (stop.any()) throw ParameterError("trace stops apply to backward surfaces only");
      path.weight = static_cast<double>(get(i, j, cache));
      path.vertices.reserve(static_cast<std::size_t>(i + j + 1));
      path.vertices.push_back(endpoint);
      while (i + j > 0) {
        const T a = i > 0 ? exit_value(i - 1, j, cache) : kMinusInf<T>;
        const T b = j > 0 ? exit_value(i, j - 1, cache) : kMinusInf<T>;
        if (a >= b) {
          --i;
        } else {
          --j;
        }
        path.vertices.push_back(frame.to_global(i, j));
      }
      std::reverse(path.vertices.begin(), path.vertices.end());
      return path;
    }
    const double full = static_cast<double>(get(i, j, cache));
    path.vertices.reserve(static_cast<std::size_t>(i + j + 1));
    path.vertices.push_back(endpoint);
    bool cut = reached(endpoint, stop);
    while (!cut && i + j > 0) {
      // Successors of the local cell (i, j) lie at i - 1 (global +x) and
      // j - 1 (global +y).
      const T a = i > 0 ? get(i - 1, j, cache) : kMinusInf<T>;
      const T b = j > 0 ? get(i, j - 1, cache) : kMinusInf<T>;
      if (a >= b) {
        --i;
      } else {
        --j;
      }
      path.vertices.push_back(frame.to_global(i, j));
      cut = reached(path.vertices.back(), stop);
    }
    if (i + j == 0) {
      path.weight = full;
    } else {
      double w = 0.0;
      for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
        w += field.weight_unchecked(path.vertices[k].x, path.vertices[k].y);
      }
      path.weight = w;
    }
    return path;
  }

 private:
  static bool reached(const Vertex& v, const TraceStop& stop) {
    return (stop.max_antidiagonal && v.x + v.y >= *stop.max_antidiagonal) ||
           (stop.max_column && v.x >= *stop.max_column);
  }

  T exit_value(Coord i, Coord j, BlockCache<T>& cache) const {
    const Vertex g = frame.to_global(i, j);
    return get(i, j, cache) + static_cast<T>(field.weight_unchecked(g.x, g.y));
  }

  T get(Coord i, Coord j, BlockCache<T>& cache) const {
    const Coord d = i + j;
    const Coord lo = frame.lo(d);
    if (!checkpointed) return dense_[offsets_[d] + static_cast<std::uint64_t>(i - lo)];
    const Coord b = options.checkpoint_block;
    if (d % b == 0) return checkpoints_[static_cast<std::size_t>(d / b)][static_cast<std::size_t>(i - lo)];
    const Block<T>* blk = cache.find(d / b);
    if (blk == nullptr) blk = cache.insert(d / b, recompute(d / b));
    return blk->values[blk->offsets[static_cast<std::size_t>(d - blk->first)] +
                       static_cast<std::uint64_t>(i - lo)];
  }

  std::unique_ptr<Block<T>> recompute(Coord index) const {
    auto blk = std::make_unique<Block<T>>();
    const Coord b = options.checkpoint_block;
    blk->first = index * b;
    blk->last = std::min(blk->first + b - 1, frame.last_diagonal());
    Sweeper<T> sweep(field, frame, orientation == Orientation::kForward, mask.get());
    sweep.start_from(blk->first, checkpoints_[static_cast<std::size_t>(index)].data());
    blk->offsets.assign(static_cast<std::size_t>(blk->last - blk->first) + 2, 0);
    for (Coord d = blk->first; d <= blk->last; ++d) {
      if (d > blk->first) sweep.step();
      const Coord lo = frame.lo(d);
      const T* v = sweep.values() + lo;
      blk->values.insert(blk->values.end(), v, v + frame.length(d));
      blk->offsets[static_cast<std::size_t>(d - blk->first) + 1] = blk->values.size();
    }
    return blk;
  }

  std::vector<std::uint64_t> offsets_;
  std::vector<T> dense_;
  std::vector<std::vector<T>> checkpoints_;
};

std::shared_ptr<const SurfaceData> build_surface(const WeightField& field, const Vertex& anchor,
                                                 const Rect& rect, Orientation orientation,
                                                 const SurfaceOptions& options,
                                                 std::shared_ptr<const CellMask> mask) {
  if (!rect.valid()) throw ParameterError("invalid surface rect " + to_string(rect));
  if (!rect.contains(anchor)) {
    throw DomainError("anchor " + to_string(anchor) + " outside surface rect " + to_string(rect));
  }
  if (!field.domain().contains(rect)) {
    throw DomainError("surface rect " + to_string(rect) + " outside field domain " + to_string(field.domain()));
  }
  if (options.checkpoint_block < 1) throw ParameterError("checkpoint block must be at least 1");

  const bool forward = orientation == Orientation::kForward;
  const Rect active = forward ? Rect{anchor.x, rect.x_max, anchor.y, rect.y_max}
                              : Rect{rect.x_min, anchor.x, rect.y_min, anchor.y};
  const bool fits = active.area() <= options.cell_budget;
  bool checkpointed = false;
  switch (options.storage) {
    case Storage::kAuto:
      checkpointed = !fits;
      break;
    case Storage::kDense:
      if (!fits) {
        throw CapacityError("dense surface over " + to_string(active) + " needs " +
                            std::to_string(active.area()) + " cells, above the budget of " +
                            std::to_string(options.cell_budget) + "; enable checkpointing");
      }
      break;
    case Storage::kCheckpointed:
      checkpointed = true;
      break;
  }
  if (checkpointed) {
    const auto span = static_cast<std::uint64_t>(std::min(active.width(), active.height()));
    const auto diagonals = static_cast<std::uint64_t>(active.width() + active.height() - 1);
    const auto b = static_cast<std::uint64_t>(options.checkpoint_block);
    const std::uint64_t kept = (diagonals / b + 1) * span;
    const std::uint64_t block = b * span;
    if (kept > options.cell_budget || block > options.cell_budget) {
      throw CapacityError("checkpointed surface over " + to_string(active) + " needs " +
                          std::to_string(kept) + " retained and " + std::to_string(block) +
                          " cells per block, above the budget of " + std::to_string(options.cell_budget) +
                          "; try a checkpoint block near " +
                          std::to_string(static_cast<std::uint64_t>(
                              std::max<double>(1.0, std::sqrt(static_cast<double>(diagonals))))));
    }
  }

  auto fill = [&](SurfaceData& s) {
    s.anchor = anchor;
    s.orientation = orientation;
    s.rect = rect;
    s.active = active;
    s.frame = LocalFrame{anchor, forward ? Coord{1} : Coord{-1}, active.width(), active.height()};
    s.options = options;
    s.checkpointed = checkpointed;
    s.field = field;
    s.mask = std::move(mask);
  };
  if (options.precision == Precision::kSingle) {
    auto s = std::make_shared<SurfaceImpl<float>>();
    fill(*s);
    s->build();
    return s;
  }
  auto s = std::make_shared<SurfaceImpl<double>>();
  fill(*s);
  s->build();
  return s;
}

}  // namespace

}  // namespace detail

PassageSurface PassageSurface::forward(const WeightField& field, const Vertex& source, const Rect& rect,
                                       const SurfaceOptions& options, std::shared_ptr<const CellMask> mask) {
  return PassageSurface(
      detail::build_surface(field, source, rect, Orientation::kForward, options, std::move(mask)));
}

PassageSurface PassageSurface::backward(const WeightField& field, const Vertex& sink, const Rect& rect,
                                        const SurfaceOptions& options, std::shared_ptr<const CellMask> mask) {
  return PassageSurface(
      detail::build_surface(field, sink, rect, Orientation::kBackward, options, std::move(mask)));
}

const Vertex& PassageSurface::anchor() const { return data_->anchor; }
Orientation PassageSurface::orientation() const { return data_->orientation; }
const Rect& PassageSurface::rect() const { return data_->rect; }
const Rect& PassageSurface::active() const { return data_->active; }
bool PassageSurface::checkpointed() const { return data_->checkpointed; }
Precision PassageSurface::precision() const { return data_->options.precision; }
const WeightField& PassageSurface::field() const { return data_->field; }
const CellMask* PassageSurface::mask() const { return data_->mask.get(); }

double PassageSurface::value(const Vertex& v) const {
  if (!data_->rect.contains(v)) {
    throw DomainError("vertex " + to_string(v) + " outside surface rect " + to_string(data_->rect));
  }
  auto cache = data_->make_cache();
  return data_->value(data_->frame.local_i(v), data_->frame.local_j(v), *cache);
}

Path PassageSurface::trace(const Vertex& endpoint, const TraceStop& stop) const {
  GeodesicTracer tracer(*this);
  return tracer.trace(endpoint, stop);
}

struct GeodesicTracer::State {
  std::shared_ptr<const detail::SurfaceData> data;
  std::unique_ptr<detail::BlockCacheBase> cache;
};

GeodesicTracer::GeodesicTracer(const PassageSurface& surface)
    : state_(std::make_unique<State>(State{surface.data(), surface.data()->make_cache()})) {}
GeodesicTracer::~GeodesicTracer() = default;
GeodesicTracer::GeodesicTracer(GeodesicTracer&&) noexcept = default;
GeodesicTracer& GeodesicTracer::operator=(GeodesicTracer&&) noexcept = default;

double GeodesicTracer::value(const Vertex& v) {
  const auto& d = *state_->data;
  if (!d.rect.contains(v)) {
    throw DomainError("vertex " + to_string(v) + " outside surface rect " + to_string(d.rect));
  }
  return d.value(d.frame.local_i(v), d.frame.local_j(v), *state_->cache);
}

Path GeodesicTracer::trace(const Vertex& endpoint, const TraceStop& stop) {
  return state_->data->trace(endpoint, stop, *state_->cache);
}

}  // namespace lpp
