#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "lpp/lattice.hpp"

namespace lpp {

/// Identifies one realization of the environment: a seed plus the index of
/// the Monte Carlo replicate.
struct FieldKey {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;

  friend constexpr bool operator==(const FieldKey&, const FieldKey&) = default;
};

inline constexpr std::uint64_t kDefaultBlockBudget = std::uint64_t{1} << 26;

/// Dense row-major block of weights (x fastest, then y).
class WeightGrid {
 public:
  WeightGrid() = default;
  WeightGrid(Rect rect, std::vector<double> values);

  const Rect& rect() const { return rect_; }
  double at(Coord x, Coord y) const {
    return values_[static_cast<std::size_t>((y - rect_.y_min) * stride_ + (x - rect_.x_min))];
  }
  double at(const Vertex& v) const { return at(v.x, v.y); }
  const std::vector<double>& values() const { return values_; }

 private:
  Rect rect_{};
  Coord stride_ = 0;
  std::vector<double> values_;
};

/// Random-access i.i.d. Exp(1) environment. Every weight is a pure function of
/// (seed, replicate, x, y): a keyed counter hash produces 64 bits, the top 53
/// bits give U in [0, 1), and the weight is -ln(1 - U). The log is an
/// in-library branch-free routine, so values do not depend on the libm.
///
/// Coordinates must fit in 32-bit signed integers. A field may carry a
/// materialized cache of one block; cached values are bit-identical to
/// recomputed ones and only change the speed of the sweeps.
class WeightField {
 public:
  WeightField(FieldKey key, Rect domain);

  /// Field over the whole 32-bit coordinate range.
  static WeightField unbounded(FieldKey key);

  const FieldKey& key() const { return key_; }
  const Rect& domain() const { return domain_; }

  /// Throws DomainError outside domain().
  double weight_at(const Vertex& v) const;

  /// No domain check, no cache lookup.
  double weight_unchecked(Coord x, Coord y) const noexcept;

  std::uint64_t raw_bits(Coord x, Coord y) const noexcept;

  /// out[j] = weight at (x0 + dx*j, y0 - dx*j) for j < n, dx = +1 or -1.
  /// Vectorized; identical bits to weight_unchecked.
  void fill_diagonal(Coord x0, Coord y0, Coord dx, Coord n, double* out) const noexcept;
  /// Uncached weights along (x0 + dx*j, y0 + dy*j).
  void fill_line(Coord x0, Coord y0, Coord dx, Coord dy, Coord n, double* out) const noexcept;

  /// Copy of this field that serves `rect` from a materialized block.
  WeightField with_cache(const Rect& rect, std::uint64_t cell_budget = kDefaultBlockBudget) const;
  const WeightGrid* cache() const { return cache_.get(); }

 private:
  FieldKey key_;
  Rect domain_;
  std::uint64_t round_key0_ = 0;
  std::uint64_t round_key1_ = 0;
  std::shared_ptr<const WeightGrid> cache_;
};

/// 53-bit uniform in [0, 1) from 64 random bits.
double uniform_from_bits(std::uint64_t bits) noexcept;

/// Inverse CDF of Exp(1): -ln(1 - u).
double exp_from_uniform(double u) noexcept;

/// Exp(1) variate from 64 random bits; 1 - U is formed exactly before the log.
double exp_from_bits(std::uint64_t bits) noexcept;

/// Dense copy of the weights on `rect`. Throws CapacityError when the area
/// exceeds `cell_budget` and DomainError when rect is not inside the domain.
WeightGrid materialize_block(const WeightField& field, const Rect& rect,
                             std::uint64_t cell_budget = kDefaultBlockBudget);

// Block dump: 32-byte little-endian header ("LPPW", precision tag 64,
// int32 x_min x_max y_min y_max, uint64 cell count) followed by row-major
// float64 values.
void write_block_binary(std::ostream& out, const WeightGrid& grid);
WeightGrid read_block_binary(std::istream& in);

// CSV dump: header "x,y,weight" then one row per cell, row-major.
void write_block_csv(std::ostream& out, const WeightGrid& grid);

}  // namespace lpp
