#pragma once

// Weight kernel shared by the scalar path and the AVX-512 translation unit.
// Only builtins here: this header is compiled with different target flags,
// so it must not instantiate any inline library code.

#include <cstdint>

namespace lpp::detail {

inline constexpr std::uint64_t kCounterOdd = 0xD6E8FEB86659FD93ULL;

static inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

static inline std::uint64_t hash_cell(std::uint64_t k0, std::uint64_t k1, std::int64_t x,
                                      std::int64_t y) {
  const std::uint64_t c = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
                          static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
  return mix64(mix64((c ^ k0) * kCounterOdd) ^ k1);
}

// Natural log for positive normal doubles, fdlibm's reduction and
// polynomial, without branches. Error below 1 ulp.
static inline double log_positive(double x) {
  std::uint64_t b = __builtin_bit_cast(std::uint64_t, x);
  b += 0x3ff0000000000000ULL - 0x3fe6a09e00000000ULL;
  const std::int64_t k = static_cast<std::int64_t>(b >> 52) - 0x3ff;
  const std::uint64_t hx = (b & 0x000fffffffffffffULL) + 0x3fe6a09e00000000ULL;
  const double f = __builtin_bit_cast(double, hx) - 1.0;
  const double hfsq = 0.5 * f * f;
  const double s = f / (2.0 + f);
  const double z = s * s;
  const double w = z * z;
  const double t1 = w * (3.999999999940941908e-01 +
                         w * (2.222219843214978396e-01 + w * 1.531383769920937332e-01));
  const double t2 =
      z * (6.666666666666735130e-01 +
           w * (2.857142874366239149e-01 +
                w * (1.818357216161805012e-01 + w * 1.479819860511658591e-01)));
  const double r = t2 + t1;
  const double dk = static_cast<double>(static_cast<std::int32_t>(k));
  return s * (hfsq + r) + dk * 1.90821492927058770002e-10 - hfsq + f +
         dk * 6.93147180369123816490e-01;
}

// Exact conversion of an integer below 2^54 to double.
static inline double u54_to_double(std::uint64_t m) {
  const double lo = __builtin_bit_cast(double, (m & 0xffffffffULL) | 0x4330000000000000ULL) - 0x1p52;
  const double hi = __builtin_bit_cast(double, (m >> 32) | 0x4530000000000000ULL) - 0x1p84;
  return hi + lo;
}

// -ln(1 - U) with U = (bits >> 11) 2^-53; 1 - U is formed exactly.
static inline double exp_weight(std::uint64_t bits) {
  const std::uint64_t m = (std::uint64_t{1} << 53) - (bits >> 11);
  return -log_positive(u54_to_double(m) * 0x1p-53);
}

// out[j] = weight at (x0 + dx j, y0 + dy j), j < n.
static inline void fill_line_impl(std::uint64_t k0, std::uint64_t k1, std::int64_t x0,
                                  std::int64_t y0, std::int64_t dx, std::int64_t dy,
                                  std::int64_t n, double* __restrict out) {
  for (std::int64_t j = 0; j < n; ++j) {
    out[j] = exp_weight(hash_cell(k0, k1, x0 + dx * j, y0 + dy * j));
  }
}

void fill_line_avx512(std::uint64_t k0, std::uint64_t k1, std::int64_t x0, std::int64_t y0,
                      std::int64_t dx, std::int64_t dy, std::int64_t n, double* out);

}  // namespace lpp::detail
