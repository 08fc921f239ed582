#include "weight_kernel.hpp"

namespace lpp::detail {

void fill_line_avx512(std::uint64_t k0, std::uint64_t k1, std::int64_t x0, std::int64_t y0,
                      std::int64_t dx, std::int64_t dy, std::int64_t n, double* out) {
  fill_line_impl(k0, k1, x0, y0, dx, dy, n, out);
}

}  // namespace lpp::detail
