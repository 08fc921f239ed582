#include <random>
#include <set>

#include "doctest.h"
#include "lpp/errors.hpp"
#include "lpp/geometry.hpp"
#include "lpp/passage.hpp"

using namespace lpp;

namespace {

Coord scan_gamma(const Path& p, Coord col) {
  Coord best = std::numeric_limits<Coord>::min();
  for (const auto& v : p.vertices) {
    if (v.x == col) best = std::max(best, v.y);
  }
  return best;
}

std::optional<CommonPoint> scan_common(const Path& a, const Path& b) {
  std::set<Vertex> s(b.vertices.begin(), b.vertices.end());
  std::optional<CommonPoint> out;
  for (const auto& v : a.vertices) {
    if (!s.count(v)) continue;
    if (!out) {
      out = CommonPoint{v, v.x};
      continue;
    }
    const Coord d = v.x + v.y;
    const Coord bd = out->v_star.x + out->v_star.y;
    if (d < bd || (d == bd && v.x < out->v_star.x)) out->v_star = v;
    out->min_x = std::min(out->min_x, v.x);
  }
  return out;
}

}  // namespace

TEST_CASE("gamma queries") {
  const Path p{decode_steps({2, 1}, "RUURR"), 0.0};  // (2,1) (3,1) (3,2) (3,3) (4,3) (5,3)
  CHECK(gamma_at(p, 3) == 3);
  CHECK(gamma_at(p, 2) == 1);
  CHECK(gamma_at(p, 5) == 3);
  CHECK(gamma_inv(p, 3) == 5);
  CHECK(gamma_inv(p, 1) == 3);
  CHECK_THROWS_AS(gamma_at(p, 6), DomainError);
  CHECK_THROWS_AS(gamma_inv(p, 0), DomainError);
  const Path stair{decode_steps({0, 0}, "RURURU"), 0.0};
  CHECK(gamma_at(stair, 0) >= 0);
}

TEST_CASE("transversal fluctuation") {
  CHECK(transversal_fluctuation(Path{{{0, 0}, {1, 0}, {1, 1}}, 0.0}) == 1);
  CHECK(transversal_fluctuation(Path{{{5, 5}}, 0.0}) == 0);
}

TEST_CASE("gamma_at agrees with a scan on random geodesics") {
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const auto f = WeightField::unbounded({300, rep});
    const auto g = geodesic(f, {0, 0}, {20 + static_cast<Coord>(rep % 7), 24});
    for (Coord c = 0; c <= g.back().x; ++c) REQUIRE(gamma_at(g, c) == scan_gamma(g, c));
  }
}

TEST_CASE("dyadic events") {
  const auto f = WeightField::unbounded({301, 0});
  const auto g = geodesic(f, {0, 0}, {512, 512});
  const auto huge = dyadic_tf_events(g, 2, 4, 1e6, 3);
  CHECK(huge == std::vector<bool>{false, false, false});
  const auto bits = dyadic_tf_events(g, 2, 4, 0.3, 3);
  Coord col = 2;
  for (int i = 0; i < 3; ++i) {
    col *= 4;
    const Coord dev = std::llabs(gamma_at(g, col) - col);
    CHECK(bits[i] == (dev >= 0.3 * std::pow(col, 2.0 / 3.0)));
  }
  CHECK_THROWS_AS(dyadic_tf_events(g, 2, 4, 1.0, 5), DomainError);
}

TEST_CASE("coalescence point") {
  const Path a{decode_steps({0, 0}, "RRUURU"), 0.0};
  CHECK(coalescence_point(a, a)->v_star == Vertex{0, 0});
  const Path b{decode_steps({0, 1}, "UUUU"), 0.0};
  CHECK_FALSE(coalescence_point(a, b));
  std::mt19937_64 rng(4);
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    const auto f = WeightField::unbounded({302, rep});
    const auto p = geodesic(f, {0, static_cast<Coord>(rng() % 6)}, {30, 30 + static_cast<Coord>(rng() % 6)});
    const auto q = geodesic(f, {static_cast<Coord>(rng() % 6), 0}, {30 + static_cast<Coord>(rng() % 6), 30});
    const auto fast = coalescence_point(p, q);
    const auto slow = scan_common(p, q);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      REQUIRE(fast->v_star == slow->v_star);
      REQUIRE(fast->min_x == slow->min_x);
    }
  }
}

TEST_CASE("polymer ordering of geodesics with ordered endpoints") {
  std::mt19937_64 rng(10);
  for (std::uint64_t rep = 0; rep < 300; ++rep) {
    const auto f = WeightField::unbounded({303, rep});
    const Coord a1 = 0;
    const Coord b1 = 40;
    Coord ys[4];
    for (auto& y : ys) y = static_cast<Coord>(rng() % 40);
    std::sort(ys, ys + 4);
    const auto g1 = geodesic(f, {a1, ys[0]}, {b1, ys[2]});
    const auto g2 = geodesic(f, {a1, ys[1]}, {b1, ys[3]});
    for (Coord c = a1; c <= b1; ++c) REQUIRE(gamma_at(g1, c) <= gamma_at(g2, c));
  }
}

TEST_CASE("semi-infinite prefixes") {
  SemiInfiniteScheme scheme;
  scheme.horizon = 64;
  scheme.initial_target_factor = 4;
  const auto f = WeightField::unbounded({304, 0});
  const auto pre = semi_infinite_prefix(f, {0, 0}, scheme);
  CHECK(pre.path.front() == Vertex{0, 0});
  CHECK(pre.path.back().x + pre.path.back().y == 64);
  if (pre.converged) {
    // The accepted prefix equals the one of the previous target.
    const Coord n = pre.target_used.x / 2;
    const auto s = PassageSurface::backward(f, {n, n}, Rect{0, n, 0, n});
    TraceStop stop;
    stop.max_antidiagonal = 64;
    CHECK(s.trace({0, 0}, stop).vertices == pre.path.vertices);
  }
  CHECK_THROWS_AS(semi_infinite_prefix(f, {40, 40}, scheme), ParameterError);
  SemiInfiniteScheme bad = scheme;
  bad.initial_target_factor = 1;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("hit points") {
  SemiInfiniteScheme scheme;
  scheme.horizon = 32;
  const auto f = WeightField::unbounded({305, 0});
  CHECK(hit_point(f, {0, 0}, 0, scheme).f == Vertex{0, 0});
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto g = WeightField::unbounded({305, rep});
    const auto h = hit_point(g, {0, 0}, 20, scheme);
    CHECK(h.f.x + h.f.y == 20);
  }
}

TEST_CASE("coalescence records and the forest structure") {
  SemiInfiniteScheme scheme;
  scheme.horizon = 64;
  scheme.max_doublings = 2;
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto f = WeightField::unbounded({306, rep});
    const auto same = coalescence_distance(f, {3, -3}, {3, -3}, scheme);
    CHECK(same.d == 0);
    CHECK(same.v_star == Vertex{3, -3});
    const auto r = coalescence_distance(f, {-4, 4}, {4, -4}, scheme);
    CHECK(r.d.has_value() == r.v_star.has_value());
    if (r.d) CHECK(*r.d == r.v_star->x + r.v_star->y);

    std::vector<Vertex> starts;
    for (Coord i = -6; i <= 6; ++i) starts.push_back({-i, i});
    const auto fam = semi_infinite_prefixes(f, starts, scheme);
    // Paths to one sink never cross, and once two meet they stay together.
    for (std::size_t a = 0; a + 1 < fam.prefixes.size(); ++a) {
      const Path& lo = fam.prefixes[a];
      const Path& hi = fam.prefixes[a + 1];
      for (std::size_t t = 0; t < lo.size(); ++t) REQUIRE(lo.vertices[t].x >= hi.vertices[t].x);
      if (auto m = first_meeting(lo, hi)) {
        for (std::size_t t = *m; t < lo.size(); ++t) REQUIRE(lo.vertices[t] == hi.vertices[t]);
      }
    }
    for (std::size_t a = 0; a < fam.prefixes.size(); ++a) {
      for (std::size_t b = a + 2; b < fam.prefixes.size(); ++b) {
        const auto m = first_meeting(fam.prefixes[a], fam.prefixes[b]);
        if (!m) continue;
        for (std::size_t c = a + 1; c < b; ++c) {
          REQUIRE(fam.prefixes[c].vertices[*m] == fam.prefixes[a].vertices[*m]);
        }
      }
    }
  }
}

TEST_CASE("boundary indicators") {
  SemiInfiniteScheme scheme;
  const auto f = WeightField::unbounded({307, 0});
  const auto zero = boundary_indicators(f, 0, -3, 3, scheme);
  for (auto b : zero.bits) CHECK(b == 1);
  const Coord k = 40;
  const auto bi = boundary_indicators(f, k, -5, 5, scheme);
  REQUIRE(bi.bits.size() == 11);
  SemiInfiniteScheme s = scheme;
  s.horizon = k;
  for (Coord i = -5; i <= 5; ++i) {
    const auto rec = coalescence_distance(f, {-i, i}, {-(i + 1), i + 1}, s);
    CHECK(bi.bits[static_cast<std::size_t>(i + 5)] == ((!rec.d || *rec.d > k) ? 1 : 0));
  }
}
