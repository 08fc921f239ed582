#pragma once

// Batched forward recurrence over a strip of rows. Compiled twice (generic
// and AVX-512), so only builtins and raw pointers here.

#include <cstddef>
#include <cstdint>

namespace lpp::detail {

inline constexpr int kLanes = 32;

// Sweeps `cols` columns of a strip of `rows` rows for kLanes sources at once.
//   w, blocked  column-major, column c starts at c * stride (blocked may be null)
//   boundary    cols x kLanes: exit values of the row under the strip, replaced
//               by those of the strip's top row
//   e_strip     rows x kLanes scratch holding exit values of the previous column
//   t_out       rows x kLanes passage times in the last column (may be null)
//   src         per lane, strip row of the source in column 0, or -1
static inline void lane_strip_impl(std::int64_t rows, std::int64_t cols, const double* __restrict w,
                                   const std::uint8_t* __restrict blocked, std::int64_t stride,
                                   double* __restrict boundary, double* __restrict e_strip,
                                   double* __restrict t_out, const std::int64_t* __restrict src) {
  const double ninf = -__builtin_inf();
  for (std::int64_t c = 0; c < cols; ++c) {
    double below[kLanes];
    double* bnd = boundary + c * kLanes;
    for (int l = 0; l < kLanes; ++l) below[l] = bnd[l];
    const double* wc = w + c * stride;
    const std::uint8_t* bc = blocked != nullptr ? blocked + c * stride : nullptr;
    double* to = c == cols - 1 ? t_out : nullptr;
    for (std::int64_t r = 0; r < rows; ++r) {
      double* es = e_strip + r * kLanes;
      const bool off = bc != nullptr && bc[r] != 0;
      const double wr = wc[r];
      if (c == 0) {
        for (int l = 0; l < kLanes; ++l) {
          double t = src[l] == r ? 0.0 : below[l];
          t = off ? ninf : t;
          if (to != nullptr) to[r * kLanes + l] = t;
          below[l] = t + wr;
          es[l] = below[l];
        }
      } else if (to != nullptr) {
        for (int l = 0; l < kLanes; ++l) {
          double t = es[l] >= below[l] ? es[l] : below[l];
          t = off ? ninf : t;
          to[r * kLanes + l] = t;
          below[l] = t + wr;
          es[l] = below[l];
        }
      } else if (off) {
        for (int l = 0; l < kLanes; ++l) {
          below[l] = ninf;
          es[l] = ninf;
        }
      } else {
        for (int l = 0; l < kLanes; ++l) {
          const double t = es[l] >= below[l] ? es[l] : below[l];
          below[l] = t + wr;
          es[l] = below[l];
        }
      }
    }
    for (int l = 0; l < kLanes; ++l) bnd[l] = below[l];
  }
}

void lane_strip_avx512(std::int64_t rows, std::int64_t cols, const double* w, const std::uint8_t* blocked,
                       std::int64_t stride, double* boundary, double* e_strip, double* t_out,
                       const std::int64_t* src);

}  // namespace lpp::detail
