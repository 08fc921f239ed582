#include "lpp/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "lpp/errors.hpp"
#include "weight_kernel.hpp"

namespace lpp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::int64_t kCoordMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kCoordMax = std::numeric_limits<std::int32_t>::max();

using detail::mix64;

bool have_avx512() {
  static const bool ok = __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
                         __builtin_cpu_supports("avx512vl");
  return ok;
}

void check_coordinates(const Rect& r) {
  if (!r.valid()) throw ParameterError("invalid rect " + to_string(r));
  if (r.x_min < kCoordMin || r.y_min < kCoordMin || r.x_max > kCoordMax || r.y_max > kCoordMax) {
    throw DomainError("rect " + to_string(r) + " exceeds the 32-bit coordinate range");
  }
}

template <typename T>
void put_le(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), sizeof(T));
  if (!in) throw ParameterError("truncated block dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

constexpr std::array<char, 4> kMagic = {'L', 'P', 'P', 'W'};
constexpr std::uint32_t kPrecisionTag = 64;

}  // namespace

WeightGrid::WeightGrid(Rect rect, std::vector<double> values)
    : rect_(rect), stride_(rect.width()), values_(std::move(values)) {
  if (values_.size() != rect_.area()) throw ParameterError("grid size does not match rect");
}

WeightField::WeightField(FieldKey key, Rect domain) : key_(key), domain_(domain) {
  check_coordinates(domain_);
  round_key0_ = mix64(mix64(key_.seed + kGolden) + key_.replicate);
  round_key1_ = mix64(round_key0_ ^ mix64(key_.replicate + 3 * kGolden) ^ key_.seed);
}

WeightField WeightField::unbounded(FieldKey key) {
  return WeightField(key, Rect{kCoordMin, kCoordMax, kCoordMin, kCoordMax});
}

std::uint64_t WeightField::raw_bits(Coord x, Coord y) const noexcept {
  return detail::hash_cell(round_key0_, round_key1_, x, y);
}

double WeightField::weight_unchecked(Coord x, Coord y) const noexcept {
  return exp_from_bits(raw_bits(x, y));
}

double WeightField::weight_at(const Vertex& v) const {
  if (!domain_.contains(v)) {
    throw DomainError("vertex " + to_string(v) + " outside field domain " + to_string(domain_));
  }
  return weight_unchecked(v.x, v.y);
}

void WeightField::fill_diagonal(Coord x0, Coord y0, Coord dx, Coord n, double* out) const noexcept {
  if (n <= 0) return;
  if (cache_) {
    const Rect& r = cache_->rect();
    const Vertex last{x0 + dx * (n - 1), y0 - dx * (n - 1)};
    if (r.contains(Vertex{x0, y0}) && r.contains(last)) {
      const double* base = cache_->values().data();
      const Coord stride = r.width();
      // Moving along an anti-diagonal shifts the row-major index by dx (1 - stride).
      const Coord step = dx * (1 - stride);
      Coord idx = (y0 - r.y_min) * stride + (x0 - r.x_min);
      for (Coord j = 0; j < n; ++j, idx += step) out[j] = base[idx];
      return;
    }
  }
  fill_line(x0, y0, dx, -dx, n, out);
}

void WeightField::fill_line(Coord x0, Coord y0, Coord dx, Coord dy, Coord n, double* out) const noexcept {
  if (n <= 0) return;
  if (have_avx512()) {
    detail::fill_line_avx512(round_key0_, round_key1_, x0, y0, dx, dy, n, out);
  } else {
    detail::fill_line_impl(round_key0_, round_key1_, x0, y0, dx, dy, n, out);
  }
}

WeightField WeightField::with_cache(const Rect& rect, std::uint64_t cell_budget) const {
  WeightField copy = *this;
  copy.cache_ = std::make_shared<const WeightGrid>(materialize_block(*this, rect, cell_budget));
  return copy;
}

double uniform_from_bits(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1p-53;
}

double exp_from_uniform(double u) noexcept { return -detail::log_positive(1.0 - u); }

double exp_from_bits(std::uint64_t bits) noexcept { return detail::exp_weight(bits); }

WeightGrid materialize_block(const WeightField& field, const Rect& rect, std::uint64_t cell_budget) {
  check_coordinates(rect);
  if (!field.domain().contains(rect)) {
    throw DomainError("block " + to_string(rect) + " outside field domain " +
                      to_string(field.domain()));
  }
  if (rect.area() > cell_budget) {
    throw CapacityError("block " + to_string(rect) + " has " + std::to_string(rect.area()) +
                        " cells, above the budget of " + std::to_string(cell_budget) + " cells");
  }
  std::vector<double> values(rect.area());
  const Coord w = rect.width();
  for (Coord y = rect.y_min; y <= rect.y_max; ++y) {
    field.fill_line(rect.x_min, y, 1, 0, w, values.data() + (y - rect.y_min) * w);
  }
  return WeightGrid(rect, std::move(values));
}

void write_block_binary(std::ostream& out, const WeightGrid& grid) {
  const Rect& r = grid.rect();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kPrecisionTag);
  put_le<std::int32_t>(out, static_cast<std::int32_t>(r.x_min));
  put_le<std::int32_t>(out, static_cast<std::int32_t>(r.x_max));
  put_le<std::int32_t>(out, static_cast<std::int32_t>(r.y_min));
  put_le<std::int32_t>(out, static_cast<std::int32_t>(r.y_max));
  put_le<std::uint64_t>(out, r.area());
  for (double v : grid.values()) put_le<double>(out, v);
}

WeightGrid read_block_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParameterError("not a weight block dump (bad magic)");
  if (get_le<std::uint32_t>(in) != kPrecisionTag) throw ParameterError("unsupported precision tag");
  Rect r;
  r.x_min = get_le<std::int32_t>(in);
  r.x_max = get_le<std::int32_t>(in);
  r.y_min = get_le<std::int32_t>(in);
  r.y_max = get_le<std::int32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  if (!r.valid() || count != r.area()) throw ParameterError("inconsistent block dump header");
  std::vector<double> values(count);
  for (auto& v : values) v = get_le<double>(in);
  return WeightGrid(r, std::move(values));
}

void write_block_csv(std::ostream& out, const WeightGrid& grid) {
  const Rect& r = grid.rect();
  out << "x,y,weight\n";
  char buf[64];
  for (Coord y = r.y_min; y <= r.y_max; ++y) {
    for (Coord x = r.x_min; x <= r.x_max; ++x) {
      std::snprintf(buf, sizeof buf, "%.17g", grid.at(x, y));
      out << x << ',' << y << ',' << buf << '\n';
    }
  }
}

}  // namespace lpp
