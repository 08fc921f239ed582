#include <cmath>

#include "lpp/lattice.hpp"

namespace lpp {

namespace {
constexpr long double kFloorSlack = 1e-9L;
}

Coord floor_tolerant(double value) {
  return static_cast<Coord>(std::floor(static_cast<long double>(value) + kFloorSlack));
}

Coord floor_scaled_power(double coefficient, double base, double exponent) {
  const long double v = static_cast<long double>(coefficient) *
                        std::pow(static_cast<long double>(base), static_cast<long double>(exponent));
  return static_cast<Coord>(std::floor(v + kFloorSlack));
}

}  // namespace lpp
