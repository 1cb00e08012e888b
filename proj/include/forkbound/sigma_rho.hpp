#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "forkbound/distributions.hpp"
#include "forkbound/numerics.hpp"

namespace forkbound {

enum class Direction { ArrivalLower, ServiceUpper };

// Affine bounding pair for the log-MGF of cumulative arrivals (lower) or
// service (upper). The free parameter theta is always the positive one: for
// an arrival pair, rho(theta) and sigma(theta) are the values of the
// transform at -theta. The valid domain is (0, theta_sup), open at a finite
// pole; evaluation outside throws rather than extrapolating.
struct SigmaRho {
    Direction direction;
    std::function<double(double)> sigma;
    std::function<double(double)> rho;
    double theta_sup = kInfinity;

    bool in_domain(double theta) const {
        if (theta <= 0) return false;
        if (std::isfinite(theta_sup)) return theta <= theta_sup - 1e-9;
        return true;
    }
    double sigma_at(double theta) const {
        check(theta);
        return sigma(theta);
    }
    double rho_at(double theta) const {
        check(theta);
        return rho(theta);
    }

  private:
    void check(double theta) const {
        if (!in_domain(theta)) throw DomainError("SigmaRho: theta outside the valid domain");
    }
};

// Minimal parameters of iid increment processes: sigma = 0 and rho given by
// the normalized log-MGF.
SigmaRho arrival_sigma_rho(const DistributionSpec& arrival);
SigmaRho service_sigma_rho(const DistributionSpec& service);

// Thinned arrival characterizations.
SigmaRho thinned_arrival_deterministic(const DistributionSpec& arrival, int k);
SigmaRho thinned_arrival_random(const DistributionSpec& arrival, double p);

// Single-server stand-in for a split-merge system (sum-of-MGFs estimate).
SigmaRho split_merge_service(std::vector<DistributionSpec> services);

// Service at a server of capacity c.
SigmaRho scaled_service(const DistributionSpec& service, double capacity);

// Monotonicity probe used by the validation suite: rho must be non-decreasing
// (ServiceUpper) or non-increasing (ArrivalLower) along the grid.
bool rho_monotone_on_grid(const SigmaRho& sr, std::span<const double> thetas,
                          double tolerance = 1e-12);

}  // namespace forkbound
