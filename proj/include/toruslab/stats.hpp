#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace toruslab {

/// 1.96 to full double precision.
inline constexpr double kZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// Running mean and variance (Welford). Merging is order-sensitive only in
/// the last bits; callers merge in a fixed order.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // sample variance
  double stderr_mean() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

/// Least squares on (log x, log y). Throws std::domain_error for fewer than
/// three points or nonpositive values.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Ordinary least squares on raw (x, y); at least three points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace toruslab
