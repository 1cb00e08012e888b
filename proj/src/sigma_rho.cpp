#include "forkbound/sigma_rho.hpp"

#include <cmath>
#include <utility>

namespace forkbound {

namespace {
const std::function<double(double)> kZeroSigma = [](double) { return 0.0; };
}

SigmaRho arrival_sigma_rho(const DistributionSpec& arrival) {
    if (arrival.role != Role::InterArrival)
        throw DomainError("arrival_sigma_rho: distribution is not an arrival law");
    return {Direction::ArrivalLower, kZeroSigma,
            [arrival](double theta) { return rho_arrival(arrival, theta); }, kInfinity};
}

SigmaRho service_sigma_rho(const DistributionSpec& service) {
    if (service.role != Role::ServiceTime)
        throw DomainError("service_sigma_rho: distribution is not a service law");
    return {Direction::ServiceUpper, kZeroSigma,
            [service](double theta) { return rho_service(service, theta); },
            mgf_theta_sup(service)};
}

SigmaRho thinned_arrival_deterministic(const DistributionSpec& arrival, int k) {
    if (k < 1) throw DomainError("thinned_arrival_deterministic: k must be at least 1");
    return {Direction::ArrivalLower, kZeroSigma,
            [arrival, k](double theta) { return thin_deterministic(arrival, k, theta); },
            kInfinity};
}

SigmaRho thinned_arrival_random(const DistributionSpec& arrival, double p) {
    if (!(p > 0 && p <= 1)) throw DomainError("thinned_arrival_random: p must lie in (0,1]");
    // The geometric compounding needs M(-theta) < 1/(1-p). Only a Gaussian
    // arrival law can violate it at large theta; there the pole is explicit.
    double sup = kInfinity;
    if (p < 1) {
        if (const auto* g = std::get_if<Gaussian>(&arrival.law); g && g->variance > 0) {
            const double log_cap = -std::log1p(-p);
            sup = (g->mean + std::sqrt(g->mean * g->mean + 2 * g->variance * log_cap)) /
                  g->variance;
        }
    }
    return {Direction::ArrivalLower, kZeroSigma,
            [arrival, p](double theta) { return thin_random(arrival, p, theta); }, sup};
}

SigmaRho split_merge_service(std::vector<DistributionSpec> services) {
    if (services.empty()) throw DomainError("split_merge_service: no service laws given");
    double sup = kInfinity;
    for (const auto& s : services) sup = std::min(sup, mgf_theta_sup(s));
    return {Direction::ServiceUpper, kZeroSigma,
            [services = std::move(services)](double theta) {
                return split_merge_rho(services, theta);
            },
            sup};
}

SigmaRho scaled_service(const DistributionSpec& service, double capacity) {
    return service_sigma_rho(scale_capacity(service, capacity));
}

bool rho_monotone_on_grid(const SigmaRho& sr, std::span<const double> thetas, double tolerance) {
    for (std::size_t i = 1; i < thetas.size(); ++i) {
        const double prev = sr.rho_at(thetas[i - 1]);
        const double cur = sr.rho_at(thetas[i]);
        if (sr.direction == Direction::ServiceUpper && cur < prev - tolerance) return false;
        if (sr.direction == Direction::ArrivalLower && cur > prev + tolerance) return false;
    }
    return true;
}

}  // namespace forkbound
