#include "forkbound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "forkbound/errors.hpp"

namespace forkbound {

namespace {
constexpr double kResphi = 0.61803398874989485;  // (sqrt(5)-1)/2
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    double a = lo, b = hi;
    double x1 = b - kResphi * (b - a);
    double x2 = a + kResphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 0; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kResphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kResphi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

double grid_golden_min(const std::function<double(double)>& f, double lo, double hi,
                       int grid_points, bool log_spaced, int iters) {
    if (!(hi > lo)) return lo;
    grid_points = std::max(grid_points, 3);
    std::vector<double> xs(grid_points);
    if (log_spaced) {
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < grid_points; ++i)
            xs[i] = std::exp(llo + (lhi - llo) * i / (grid_points - 1));
    } else {
        for (int i = 0; i < grid_points; ++i)
            xs[i] = lo + (hi - lo) * i / (grid_points - 1);
    }
    xs.front() = lo;
    xs.back() = hi;

    int best = 0;
    double best_val = kInfinity;
    for (int i = 0; i < grid_points; ++i) {
        const double v = f(xs[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (!std::isfinite(best_val)) return hi;

    const double a = xs[std::max(best - 1, 0)];
    const double b = xs[std::min(best + 1, grid_points - 1)];
    double x = (a < b) ? golden_min(f, a, b, iters) : xs[best];
    if (f(xs[best]) < f(x)) x = xs[best];
    // prefer an exact endpoint when it is at least as good; several objectives
    // attain their minimum on the boundary of the admissible interval
    if (f(hi) <= f(x)) return hi;
    if (f(lo) <= f(x)) return lo;
    return x;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, int iters) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if ((flo < 0) == (fhi < 0))
        throw DomainError("bisect_root: no sign change on the bracket");
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::optional<double> invert_nonincreasing(const std::function<double(double)>& f, double target,
                                           double hint_hi) {
    if (f(0.0) <= target) return 0.0;
    double hi = std::max(hint_hi, 1e-12);
    int guard = 0;
    while (f(hi) > target) {
        hi *= 2;
        if (++guard > 128 || hi > 1e18) return std::nullopt;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (f(mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw ShapeError("linear_fit: mismatched or empty samples");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LinearFit fit;
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (sxx > 0 && syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

double inverse_normal_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_normal_cdf: u outside (0,1)");

    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (u < p_low) {
        const double q = std::sqrt(-2 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (u <= 1 - p_low) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const double q = std::sqrt(-2 * std::log(1 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }

    // one Halley step against the exact cdf
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
    if (pdf > 1e-300) {
        const double w = e / pdf;
        x = x - w / (1 + x * w / 2);
    }
    return x;
}

double erlang_cdf(int shape, double rate, double x) {
    if (shape < 1 || rate <= 0) throw DomainError("erlang_cdf: invalid parameters");
    if (x <= 0) return 0.0;
    const double lx = rate * x;
    const double e = std::exp(-lx);
    if (e == 0.0) return 1.0;
    double term = e;  // j = 0
    double sum = term;
    for (int j = 1; j < shape; ++j) {
        term *= lx / j;
        sum += term;
    }
    return std::clamp(1.0 - sum, 0.0, 1.0);
}

}  // namespace forkbound
