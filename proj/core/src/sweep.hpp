#pragma once

// Anti-diagonal wavefront for the max-plus recurrences. Internal header.
//
// The active rectangle is addressed in local coordinates (i, j) with the
// anchor at (0, 0): global = origin + sign * (i, j), sign +1 for forward
// surfaces and -1 for backward ones. Diagonal d holds the cells i + j = d,
// indexed by i in [lo(d), hi(d)].

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "lpp/constraint.hpp"
#include "lpp/field.hpp"
#include "lpp/lattice.hpp"

namespace lpp::detail {

struct LocalFrame {
  Vertex origin;
  Coord sign = 1;
  Coord width = 1;   // cells along local i
  Coord height = 1;  // cells along local j

  Coord last_diagonal() const { return width + height - 2; }
  Coord lo(Coord d) const { return std::max<Coord>(0, d - (height - 1)); }
  Coord hi(Coord d) const { return std::min<Coord>(d, width - 1); }
  Coord length(Coord d) const { return hi(d) - lo(d) + 1; }
  Vertex to_global(Coord i, Coord j) const {
    return Vertex{origin.x + sign * i, origin.y + sign * j};
  }
  Coord local_i(const Vertex& v) const { return sign * (v.x - origin.x); }
  Coord local_j(const Vertex& v) const { return sign * (v.y - origin.y); }
  bool contains_local(Coord i, Coord j) const {
    return i >= 0 && j >= 0 && i < width && j < height;
  }
};

template <typename T>
inline constexpr T kMinusInf = -std::numeric_limits<T>::infinity();

// Rolling two-diagonal sweep. Forward surfaces carry the exit value
// T(v) + w(v) of the previous diagonal, backward surfaces carry T itself.
template <typename T>
class Sweeper {
 public:
  Sweeper(const WeightField& field, const LocalFrame& frame, bool forward, const CellMask* mask)
      : field_(field), frame_(frame), forward_(forward), mask_(mask),
        carry_a_(static_cast<std::size_t>(frame.width) + 1, kMinusInf<T>),
        carry_b_(static_cast<std::size_t>(frame.width) + 1, kMinusInf<T>),
        values_(static_cast<std::size_t>(frame.width), kMinusInf<T>),
        weights_(static_cast<std::size_t>(frame.width)) {}

  Coord diagonal() const { return d_; }
  // T on the current diagonal, indexed by local i.
  const T* values() const { return values_.data(); }

  void start() {
    d_ = 0;
    load_weights(0);
    T v = 0;
    if (blocked(0, 0)) v = kMinusInf<T>;
    values_[0] = v;
    carry()[0] = forward_ ? v + static_cast<T>(weights_[0]) : v;
  }

  // Resume from stored T values of diagonal d (indexed from lo(d)).
  void start_from(Coord d, const T* stored) {
    d_ = d;
    // Everything outside the diagonal must read as -inf.
    std::fill(carry_a_.begin(), carry_a_.end(), kMinusInf<T>);
    std::fill(carry_b_.begin(), carry_b_.end(), kMinusInf<T>);
    const Coord lo = frame_.lo(d);
    const Coord hi = frame_.hi(d);
    load_weights(d);
    T* c = carry();
    for (Coord i = lo; i <= hi; ++i) {
      const T v = stored[i - lo];
      values_[i] = v;
      c[i] = forward_ ? v + static_cast<T>(weights_[i - lo]) : v;
    }
  }

  void step() {
    ++d_;
    flip_ = !flip_;
    const Coord lo = frame_.lo(d_);
    const Coord hi = frame_.hi(d_);
    const T* p = prev();
    T* c = carry();
    T* out = values_.data();
    load_weights(d_);
    const double* w = weights_.data() - lo;
    if (forward_) {
      for (Coord i = lo; i <= hi; ++i) {
        const T a = p[i - 1];
        const T b = p[i];
        out[i] = a >= b ? a : b;
      }
      if (mask_ != nullptr) apply_mask(lo, hi);
      for (Coord i = lo; i <= hi; ++i) c[i] = out[i] + static_cast<T>(w[i]);
    } else {
      for (Coord i = lo; i <= hi; ++i) {
        const T a = p[i - 1];
        const T b = p[i];
        out[i] = static_cast<T>(w[i]) + (a >= b ? a : b);
      }
      if (mask_ != nullptr) apply_mask(lo, hi);
      for (Coord i = lo; i <= hi; ++i) c[i] = out[i];
    }
    // Index lo - 1 of this carry is read at the next step only when lo == 0,
    // where it is the permanent -inf pad.
  }

 private:
  T* carry() { return (flip_ ? carry_b_.data() : carry_a_.data()) + 1; }
  const T* prev() const { return (flip_ ? carry_a_.data() : carry_b_.data()) + 1; }

  bool blocked(Coord i, Coord j) const {
    if (mask_ == nullptr) return false;
    const Vertex g = frame_.to_global(i, j);
    return mask_->blocked(g.x, g.y);
  }

  void apply_mask(Coord lo, Coord hi) {
    for (Coord i = lo; i <= hi; ++i) {
      if (blocked(i, d_ - i)) values_[i] = kMinusInf<T>;
    }
  }

  void load_weights(Coord d) {
    const Coord lo = frame_.lo(d);
    const Vertex g = frame_.to_global(lo, d - lo);
    field_.fill_diagonal(g.x, g.y, frame_.sign, frame_.length(d), weights_.data());
  }

  const WeightField& field_;
  LocalFrame frame_;
  bool forward_;
  const CellMask* mask_;
  std::vector<T> carry_a_;
  std::vector<T> carry_b_;
  std::vector<T> values_;
  std::vector<double> weights_;
  Coord d_ = 0;
  bool flip_ = false;
};

}  // namespace lpp::detail
