#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>

namespace forkbound {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Golden-section minimization of a unimodal f on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters = 160);

// Grid seed followed by golden-section refinement around the best grid point.
// The seed guards against objectives that are only piecewise well behaved;
// out-of-domain evaluations may return +inf. With log_spaced the grid is
// geometric between lo and hi (both must be positive).
double grid_golden_min(const std::function<double(double)>& f, double lo, double hi,
                       int grid_points = 64, bool log_spaced = true, int iters = 160);

// Root of f with f(lo) and f(hi) of opposite sign; returns the midpoint of the
// final bracket. f must be continuous and monotone enough to keep the bracket
// valid.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, int iters = 200);

// Smallest x >= 0 with non-increasing f(x) <= target, or nullopt when the
// target is not reached before the search horizon (1e18).
std::optional<double> invert_nonincreasing(const std::function<double(double)>& f, double target,
                                           double hint_hi = 1.0);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Inverse standard normal cdf: rational approximation polished with one
// Halley step against the erfc-based cdf. Accurate to ~1e-14 on (0,1).
double inverse_normal_cdf(double u);

// Erlang (integer-shape gamma) cdf via the Poisson series.
double erlang_cdf(int shape, double rate, double x);

}  // namespace forkbound
