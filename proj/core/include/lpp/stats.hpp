#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace lpp {

inline constexpr double kNormal975 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion; [0, 1] when trials = 0.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kNormal975);

enum class TailKind {
  kGreater,       // P(X > t)
  kGreaterEqual,  // P(X >= t)
};

struct TailRow {
  double threshold = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p = 0.0;
  Interval ci;
};

struct TailTable {
  std::vector<TailRow> rows;
};

/// Empirical survival function at each threshold. Samples may be +inf
/// (censored above every threshold). InsufficientDataError on an empty sample,
/// ParameterError when thresholds are not ascending.
TailTable tail_table(const std::vector<double>& samples, const std::vector<double>& thresholds,
                     TailKind kind = TailKind::kGreater);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  std::vector<double> x;        // transformed thresholds of the rows used
  std::vector<double> y;        // ln p
  std::vector<double> weights;  // inverse delta-method variances
};

inline constexpr std::uint64_t kMinTailSuccesses = 5;

/// Weighted least squares of ln p on transform(threshold), weights
/// p n / (1 - p). Rows with fewer than kMinTailSuccesses successes, p = 1, or
/// a non-finite transform are dropped; InsufficientDataError below 3 rows.
ExponentFit fit_log_tail(const TailTable& table, const std::function<double(double)>& transform);

/// fit_log_tail with transform ln t: slope estimates the power-law exponent.
ExponentFit fit_power_law(const TailTable& table);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares; InsufficientDataError below 2 points (the
/// standard error needs 3).
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
/// Unbiased sample variance.
double variance(const std::vector<double>& v);

/// z statistic of the difference of two proportions with the pooled
/// standard error; 0 when both are degenerate.
double two_proportion_z(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2, std::uint64_t n2);

}  // namespace lpp
