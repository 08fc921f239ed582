#include "lpp/batch.hpp"

#include <algorithm>
#include <string>

#include "lane_kernel.hpp"
#include "lpp/errors.hpp"

namespace lpp {

namespace {

bool have_avx512() {
  static const bool ok = __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq") &&
                         __builtin_cpu_supports("avx512vl");
  return ok;
}

void lane_strip(std::int64_t rows, std::int64_t cols, const double* w, const std::uint8_t* blocked,
                std::int64_t stride, double* boundary, double* e_strip, double* t_out, const std::int64_t* src) {
  if (have_avx512()) {
    detail::lane_strip_avx512(rows, cols, w, blocked, stride, boundary, e_strip, t_out, src);
  } else {
    detail::lane_strip_impl(rows, cols, w, blocked, stride, boundary, e_strip, t_out, src);
  }
}

void column_weights(const WeightField& field, Coord x, Coord y_lo, Coord n, double* out) {
  if (const WeightGrid* g = field.cache()) {
    const Rect& r = g->rect();
    if (x >= r.x_min && x <= r.x_max && y_lo >= r.y_min && y_lo + n - 1 <= r.y_max) {
      for (Coord j = 0; j < n; ++j) out[j] = g->at(x, y_lo + j);
      return;
    }
  }
  field.fill_line(x, y_lo, 0, 1, n, out);
}

constexpr std::int64_t kStripRows = 128;

}  // namespace

bool sweep_sources_to_column(const WeightField& field, const ColumnSweep& spec, const ColumnVisitor& visit) {
  if (spec.target_column < spec.source_column || spec.row_hi < spec.row_lo) {
    throw ParameterError("column sweep needs target_column >= source_column and a nonempty row range");
  }
  const Rect area{spec.source_column, spec.target_column, spec.row_lo, spec.row_hi};
  if (!field.domain().contains(area)) throw DomainError("column sweep " + to_string(area) + " outside the field domain");
  for (Coord y : spec.source_rows) {
    if (y < spec.row_lo || y > spec.row_hi) throw DomainError("source row " + std::to_string(y) + " outside the row range");
  }
  const std::int64_t rows = spec.row_hi - spec.row_lo + 1;
  const std::int64_t cols = spec.target_column - spec.source_column + 1;
  const std::size_t lanes = kSweepLanes;
  // Column-major copies of the weights and the mask over the sweep area.
  std::vector<double> w(static_cast<std::size_t>(rows * cols));
  std::vector<std::uint8_t> blocked;
  for (std::int64_t c = 0; c < cols; ++c) {
    column_weights(field, spec.source_column + c, spec.row_lo, rows, w.data() + c * rows);
  }
  if (spec.mask != nullptr) {
    blocked.resize(w.size());
    for (std::int64_t c = 0; c < cols; ++c) {
      for (std::int64_t r = 0; r < rows; ++r) {
        blocked[static_cast<std::size_t>(c * rows + r)] =
            spec.mask->blocked(spec.source_column + c, spec.row_lo + r) ? 1 : 0;
      }
    }
  }
  std::vector<double> boundary(static_cast<std::size_t>(cols) * lanes);
  std::vector<double> e_strip(static_cast<std::size_t>(kStripRows) * lanes);
  std::vector<double> t(static_cast<std::size_t>(rows) * lanes);
  std::vector<double> out(static_cast<std::size_t>(rows));

  for (std::size_t first = 0; first < spec.source_rows.size(); first += lanes) {
    const std::size_t count = std::min(lanes, spec.source_rows.size() - first);
    // Rows under the lowest source of the batch are unreachable.
    Coord lowest = spec.row_hi;
    for (std::size_t l = 0; l < count; ++l) lowest = std::min(lowest, spec.source_rows[first + l]);
    const std::int64_t start = lowest - spec.row_lo;
    std::fill(boundary.begin(), boundary.end(), kNegInf);
    std::fill(t.begin(), t.begin() + start * static_cast<std::int64_t>(lanes), kNegInf);
    for (std::int64_t r0 = start; r0 < rows; r0 += kStripRows) {
      const std::int64_t n = std::min(kStripRows, rows - r0);
      std::int64_t src[detail::kLanes];
      for (std::size_t l = 0; l < lanes; ++l) {
        src[l] = -1;
        if (l < count) {
          const std::int64_t r = spec.source_rows[first + l] - spec.row_lo - r0;
          if (r >= 0 && r < n) src[l] = r;
        }
      }
      lane_strip(n, cols, w.data() + r0, blocked.empty() ? nullptr : blocked.data() + r0, rows,
                 boundary.data(), e_strip.data(), t.data() + r0 * static_cast<std::int64_t>(lanes), src);
    }
    for (std::size_t l = 0; l < count; ++l) {
      for (std::int64_t r = 0; r < rows; ++r) out[static_cast<std::size_t>(r)] = t[static_cast<std::size_t>(r) * lanes + l];
      if (!visit(first + l, out.data())) return false;
    }
  }
  return true;
}

}  // namespace lpp
