#include "lpp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lpp/errors.hpp"

namespace lpp {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // exact endpoints at p = 0 and p = 1
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

TailTable tail_table(const std::vector<double>& samples, const std::vector<double>& thresholds, TailKind kind) {
  if (samples.empty()) throw InsufficientDataError("tail table of an empty sample");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw ParameterError("tail thresholds must be ascending");
  }
  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  TailTable t;
  const auto n = static_cast<std::uint64_t>(sorted.size());
  for (const double th : thresholds) {
    const auto it = kind == TailKind::kGreater ? std::upper_bound(sorted.begin(), sorted.end(), th)
                                               : std::lower_bound(sorted.begin(), sorted.end(), th);
    TailRow row;
    row.threshold = th;
    row.successes = static_cast<std::uint64_t>(sorted.end() - it);
    row.trials = n;
    row.p = static_cast<double>(row.successes) / static_cast<double>(n);
    row.ci = wilson_interval(row.successes, n);
    t.rows.push_back(row);
  }
  return t;
}

ExponentFit fit_log_tail(const TailTable& table, const std::function<double(double)>& transform) {
  ExponentFit f;
  for (const TailRow& r : table.rows) {
    if (r.successes < kMinTailSuccesses || r.successes >= r.trials) continue;
    const double x = transform(r.threshold);
    if (!std::isfinite(x)) continue;
    f.x.push_back(x);
    f.y.push_back(std::log(r.p));
    f.weights.push_back(r.p * static_cast<double>(r.trials) / (1.0 - r.p));
  }
  if (f.x.size() < 3) {
    throw InsufficientDataError("tail fit needs 3 rows with at least " + std::to_string(kMinTailSuccesses) +
                                " successes, got " + std::to_string(f.x.size()));
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    sw += f.weights[i];
    sx += f.weights[i] * f.x[i];
    sy += f.weights[i] * f.y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    sxx += f.weights[i] * (f.x[i] - mx) * (f.x[i] - mx);
    sxy += f.weights[i] * (f.x[i] - mx) * (f.y[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientDataError("tail fit needs distinct thresholds");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  // Weights are inverse variances, so the slope variance is 1 / Sxx.
  f.slope_se = std::sqrt(1.0 / sxx);
  return f;
}

ExponentFit fit_power_law(const TailTable& table) {
  return fit_log_tail(table, [](double t) { return t > 0.0 ? std::log(t) : std::nan(""); });
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ParameterError("least squares: x and y differ in length");
  if (x.size() < 2) throw InsufficientDataError("least squares needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InsufficientDataError("least squares needs distinct x");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      rss += e * e;
    }
    f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return f;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw InsufficientDataError("mean of an empty sample");
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InsufficientDataError("variance needs at least 2 samples");
  const double m = mean(v);
  double s = 0.0;
  for (const double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double two_proportion_z(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw InsufficientDataError("two-proportion test with an empty group");
  const double p1 = static_cast<double>(s1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(s2) / static_cast<double>(n2);
  const double p = static_cast<double>(s1 + s2) / static_cast<double>(n1 + n2);
  const double se = std::sqrt(p * (1.0 - p) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  if (se == 0.0) return 0.0;
  return (p1 - p2) / se;
}

}  // namespace lpp
