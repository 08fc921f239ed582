#include "lane_kernel.hpp"

namespace lpp::detail {

void lane_strip_avx512(std::int64_t rows, std::int64_t cols, const double* w, const std::uint8_t* blocked,
                       std::int64_t stride, double* boundary, double* e_strip, double* t_out,
                       const std::int64_t* src) {
  lane_strip_impl(rows, cols, w, blocked, stride, boundary, e_strip, t_out, src);
}

}  // namespace lpp::detail
