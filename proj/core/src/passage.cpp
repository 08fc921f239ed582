#include "lpp/passage.hpp"

#include <functional>
#include <limits>
#include <string>

#include "lpp/errors.hpp"
#include "sweep.hpp"

namespace lpp {

namespace {

void check_order(const Vertex& u, const Vertex& v) {
  if (!precedes(u, v)) throw OrderError(to_string(u) + " is not below " + to_string(v));
}

template <typename T>
double rolling_value(const WeightField& field, const Vertex& u, const Vertex& v, const CellMask* mask) {
  const Rect r = Rect::spanning(u, v);
  if (!field.domain().contains(r)) {
    throw DomainError("rect " + to_string(r) + " outside field domain " + to_string(field.domain()));
  }
  const detail::LocalFrame frame{u, 1, r.width(), r.height()};
  detail::Sweeper<T> sweep(field, frame, true, mask);
  sweep.start();
  const Coord last = frame.last_diagonal();
  while (sweep.diagonal() < last) sweep.step();
  return static_cast<double>(sweep.values()[frame.width - 1]);
}

}  // namespace

double passage_time(const WeightField& field, const Vertex& u, const Vertex& v, Precision precision) {
  check_order(u, v);
  if (precision == Precision::kSingle) return rolling_value<float>(field, u, v, nullptr);
  return rolling_value<double>(field, u, v, nullptr);
}

Path geodesic(const WeightField& field, const Vertex& u, const Vertex& v, const SurfaceOptions& options) {
  check_order(u, v);
  const auto surface = PassageSurface::forward(field, u, Rect::spanning(u, v), options);
  return surface.trace(v);
}

std::optional<PassageResult> constrained_passage_time(const WeightField& field, const Vertex& u,
                                                      const Vertex& v, const Constraint& constraint,
                                                      const SurfaceOptions& options) {
  check_order(u, v);
  const Rect r = Rect::spanning(u, v);
  auto mask = constraint.compile(r);
  const Region* through = constraint.through();
  if (through == nullptr) {
    const auto surface = PassageSurface::forward(field, u, r, options, mask);
    GeodesicTracer tracer(surface);
    const double t = tracer.value(v);
    if (t == kNegInf) return std::nullopt;
    return PassageResult{t, tracer.trace(v)};
  }
  const auto fwd = PassageSurface::forward(field, u, r, options, mask);
  const auto bwd = PassageSurface::backward(field, v, r, options, mask);
  GeodesicTracer ft(fwd);
  GeodesicTracer bt(bwd);
  double best = kNegInf;
  std::optional<Vertex> arg;
  for (const Vertex& w : through->points_in(r)) {
    const double a = ft.value(w);
    if (a == kNegInf) continue;
    const double b = bt.value(w);
    if (b == kNegInf) continue;
    if (!arg || a + b > best) {
      best = a + b;
      arg = w;
    }
  }
  if (!arg) return std::nullopt;
  Path path = concatenate(ft.trace(*arg), bt.trace(*arg));
  path.weight = best;
  return PassageResult{best, std::move(path)};
}

std::optional<double> constrained_passage_value(const WeightField& field, const Vertex& u,
                                                const Vertex& v, const Constraint& constraint) {
  check_order(u, v);
  if (constraint.through() != nullptr) {
    auto res = constrained_passage_time(field, u, v, constraint);
    if (!res) return std::nullopt;
    return res->time;
  }
  auto mask = constraint.compile(Rect::spanning(u, v));
  const double t = rolling_value<double>(field, u, v, mask.get());
  if (t == kNegInf) return std::nullopt;
  return t;
}

std::uint64_t count_paths(const Vertex& u, const Vertex& v) {
  check_order(u, v);
  const Coord dx = v.x - u.x;
  const Coord dy = v.y - u.y;
  const Coord k = std::min(dx, dy);
  const Coord n = dx + dy;
  // C(n, k) built incrementally; each partial product is itself binomial.
  unsigned __int128 c = 1;
  for (Coord i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

namespace {

std::optional<PassageResult> enumerate(const WeightField& field, const Vertex& u, const Vertex& v,
                                       const Constraint* constraint) {
  check_order(u, v);
  if (count_paths(u, v) > kBruteForceLimit) {
    throw CapacityError("brute force from " + to_string(u) + " to " + to_string(v) + " exceeds " +
                        std::to_string(kBruteForceLimit) + " paths");
  }
  std::optional<PassageResult> best;
  std::vector<Vertex> stack{u};
  // Horizontal steps are explored first and replacements need a strict
  // improvement, which reproduces the surface tie rule.
  std::function<void(double)> walk = [&](double acc) {
    const Vertex cur = stack.back();
    if (cur == v) {
      if (constraint != nullptr && !constraint->admits_path(stack)) return;
      if (!best || acc > best->time) best = PassageResult{acc, Path{stack, acc}};
      return;
    }
    const double w = field.weight_at(cur);
    if (cur.x < v.x) {
      stack.push_back(Vertex{cur.x + 1, cur.y});
      walk(acc + w);
      stack.pop_back();
    }
    if (cur.y < v.y) {
      stack.push_back(Vertex{cur.x, cur.y + 1});
      walk(acc + w);
      stack.pop_back();
    }
  };
  walk(0.0);
  return best;
}

}  // namespace

PassageResult brute_force_passage(const WeightField& field, const Vertex& u, const Vertex& v) {
  return *enumerate(field, u, v, nullptr);
}

std::optional<PassageResult> brute_force_constrained(const WeightField& field, const Vertex& u,
                                                     const Vertex& v, const Constraint& constraint) {
  return enumerate(field, u, v, &constraint);
}

}  // namespace lpp
