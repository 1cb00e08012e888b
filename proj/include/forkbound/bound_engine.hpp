#pragma once

#include <set>
#include <span>
#include <variant>
#include <vector>

#include "forkbound/sigma_rho.hpp"

namespace forkbound {

// Statistical waiting/sojourn bounds for k parallel servers fed by a common
// arrival process. Each server contributes one exponential tail term
//   alpha * e^{theta * rho_S(theta)} * e^{-theta tau}
// where alpha = 1 for renewal (iid) inputs and
//   alpha = e^{theta (sigma_A + sigma_S)} / (1 - e^{-theta (rho_A - rho_S)})
// in the general stationary case. The free decay parameters theta may differ
// per server and are chosen by a bracketed search.

struct ServerSpec {
    SigmaRho arrival;  // ArrivalLower
    SigmaRho service;  // ServiceUpper
    bool iid = true;   // renewal inputs: prefactor alpha = 1
};

ServerSpec gi_server(const DistributionSpec& arrival, const DistributionSpec& service);
ServerSpec gg_server(const DistributionSpec& arrival, const DistributionSpec& service);

struct BoundTerm {
    double alpha;
    double theta;
    double shift;  // rho_S(theta) for sojourn terms, 0 for waiting terms
};

// Sum of exponential tail terms sum_i alpha_i e^{-theta_i (tau - shift_i)},
// clamped at 1 when read as a probability. Strictly decreasing beyond
// valid_from, where the unclamped sum first drops below 1.
struct TailBound {
    std::vector<BoundTerm> terms;
    double valid_from = 0;

    double eval(double tau) const;
    double eval_unclamped(double tau) const;
};

// One theta per server. The iid branch requires rho_S(theta) <= rho_A(-theta);
// the general branch needs a strictly positive gap (>= kStabilityMargin, which
// keeps the alpha pole away).
inline constexpr double kStabilityMargin = 1e-9;

TailBound sojourn_bound(std::span<const ServerSpec> servers, std::span<const double> thetas);
TailBound waiting_bound(std::span<const ServerSpec> servers, std::span<const double> thetas);

// Prefactor of one server's term at a given theta (1 for iid servers).
double gg_alpha(const ServerSpec& server, double theta);

// Largest admissible theta for one server; StabilityError when no positive
// theta satisfies the branch inequality.
double admissible_theta_sup(const ServerSpec& server);

// Objectives for the per-server decay search. `parallel` folds the union
// bound over that many homogeneous servers into the objective.
struct TailAt {
    double tau;
    int parallel = 1;
};
struct QuantileAt {
    double eps;
    int parallel = 1;
};
struct MeanSojourn {
    int parallel = 1;
};
using ThetaObjective = std::variant<TailAt, QuantileAt, MeanSojourn>;

double optimize_theta(const ServerSpec& server, const ThetaObjective& objective);

// Smallest tau with bound(tau) <= eps; closed form for a single term,
// bisection to 1e-9 otherwise.
double quantile(const TailBound& bound, double eps);

// E[T] <= rho_s + (ln(k alpha) + 1) / theta for k homogeneous servers.
double expected_sojourn(int k, double rho_s, double theta, double alpha);

enum class AllocStrategy { MeanBalanced, TailBalanced };

struct Allocation {
    std::vector<double> values;  // capacities c_i or rates lambda_i
    AllocStrategy strategy;
    std::set<std::size_t> excluded;  // servers shut out by the water-filling
};

struct MomentPair {
    double mean;
    double variance;
};

// Capacities proportional to mean service requirements (equal utilization).
Allocation allocate_capacity_mean(std::span<const double> service_means, double total_c);

// Gaussian tail-balancing: minimal capacities such that every scaled server
// hits the same rho at the common theta, i.e. the positive root of
// (theta sigma_i^2 / 2) x^2 + eta_i x = R with R = eta_A - theta sigma_A^2/2.
Allocation allocate_capacity_tail(std::span<const MomentPair> services, MomentPair arrival,
                                  double theta);

// Arrival split with equal utilization: lambda_i = lambda mu_i / sum mu.
Allocation split_rates_mean(std::span<const double> mus, double lambda);

// Arrival split equalizing the decay parameters theta_i = mu_i - lambda_i;
// servers driven negative are excluded and the water level recomputed.
Allocation split_rates_tail(std::span<const double> mus, double lambda);

}  // namespace forkbound
