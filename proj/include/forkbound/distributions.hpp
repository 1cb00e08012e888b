#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "forkbound/errors.hpp"
#include "forkbound/rng.hpp"

namespace forkbound {

// Parametric inter-arrival and service-time laws. Every law carries a
// closed-form moment generating function M(theta) = E[e^{theta X}] and an
// inverse-cdf sampler; nothing here is estimated numerically.

enum class Role { InterArrival, ServiceTime };

struct Exponential {
    double rate;  // lambda for arrivals, mu for service; mean 1/rate
};

struct Deterministic {
    double value;
};

// Analytic Gaussian law. The MGF is the untruncated one; samplers clip
// negative draws to zero (see Workload::gaussian_truncated).
struct Gaussian {
    double mean;
    double variance;
};

struct ErlangK {
    int shape;
    double rate;  // sum of `shape` iid Exponential(rate) variables
};

using DistLaw = std::variant<Exponential, Deterministic, Gaussian, ErlangK>;

struct DistributionSpec {
    DistLaw law;
    Role role;
};

DistributionSpec make_exponential(double rate, Role role);
DistributionSpec make_deterministic(double value, Role role);
DistributionSpec make_gaussian(double mean, double variance, Role role);
DistributionSpec make_erlang(int shape, double rate, Role role);

double mean_of(const DistributionSpec& dist);

// Upper end of the MGF domain (the pole for exponential-type laws, +inf
// otherwise). Evaluation within kThetaPoleMargin of a finite pole is
// rejected to avoid blow-up.
inline constexpr double kThetaPoleMargin = 1e-9;
double mgf_theta_sup(const DistributionSpec& dist);

// E[e^{theta X}] in closed form. DomainError outside the MGF domain.
double mgf(const DistributionSpec& dist, double theta);

// rho_A(-theta) = -ln E[e^{-theta A(1,2)}] / theta for theta > 0. Decreases
// from the mean inter-arrival time towards the minimum.
double rho_arrival(const DistributionSpec& dist, double theta);

// rho_S(theta) = ln E[e^{theta S(1)}] / theta for theta > 0. Increases from
// the mean service time towards the maximum.
double rho_service(const DistributionSpec& dist, double theta);

// Law of S / c for a server of capacity c > 0; mgf(scale_capacity(d, c), t)
// equals mgf(d, t / c).
DistributionSpec scale_capacity(const DistributionSpec& dist, double c);

// Arrival rate parameter after Bernoulli thinning with probability p: each
// thinned inter-arrival time is a geometric sum of original ones.
double thin_random(const DistributionSpec& arrival, double p, double theta);

// Arrival rate parameter after round-robin thinning over k servers:
// k * rho_arrival.
double thin_deterministic(const DistributionSpec& arrival, int k, double theta);

// Upper estimate of the service parameter of max_i S_i via the sum of the
// MGFs; grows at most logarithmically with the number of servers.
double split_merge_rho(std::span<const DistributionSpec> services, double theta);

// One draw. Deterministic given the stream; Gaussian draws are clipped at 0.
double sample(const DistributionSpec& dist, CounterRng& rng);

// Inverse cdf at u in (0,1). Feeding the same u to several laws couples the
// draws (common-copula workloads).
double sample_from_uniform(const DistributionSpec& dist, double u);

// Literals: exp:mu=1 | exp:lambda=0.7 | det:d=1.25 | gauss:mean=1,var=0.25 |
// erlang:k=3,lambda=1
DistributionSpec parse_distribution(std::string_view text, Role role);
std::string to_string(const DistributionSpec& dist);

}  // namespace forkbound
