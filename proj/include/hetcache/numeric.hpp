#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace hetcache {

/// Distinguished value for a load cap or capacity that no constraint bounds.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double v) { return std::isinf(v) && v > 0; }

/// Root of a nonincreasing function on [lo, hi] with f(lo) >= 0 >= f(hi).
///
/// Stops when the bracket is narrower than rel_tol * hi (or abs_tol), or
/// after max_iter halvings. Returns the bracket midpoint.
template <class F>
double bisect_decreasing(F&& f, double lo, double hi, double rel_tol = 1e-12,
                         double abs_tol = 0.0, int max_iter = 500) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::abs(hi) || hi - lo <= abs_tol) {
      return mid;
    }
    if (f(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Pairwise summation in index order; result depends only on the values and
/// their order.
double pairwise_sum(std::span<const double> values);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and standard error of the mean, reduced in index order.
MeanEstimate mean_and_stderr(std::span<const double> samples);

}  // namespace hetcache
