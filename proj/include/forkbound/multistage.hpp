#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "forkbound/envelope.hpp"
#include "forkbound/sigma_rho.hpp"

namespace forkbound {

// End-to-end bounds for h homogeneous fork-join stages in tandem. A stage is
// a service curve with rate rho_S and a stage error profile (union bound or
// binomial); chaining stages requires the sample-path strengthening with a
// per-hop slack delta = beta / h, which is what produces the h ln(hk) growth.

struct StageSpec {
    int k = 1;
    double rho_s = 0;    // stage service rate parameter at theta_s
    double theta_s = 0;  // decay of the per-server profile
    std::function<double(double)> stage_profile;
};

StageSpec make_union_stage(int k, const DistributionSpec& service, double theta_s);
StageSpec make_kl_stage(int k, int l, const DistributionSpec& service, double theta_s);

// Horizon-uniform error profile sum_{j=1..m} eps_stg(tau + delta j). Without
// a horizon the exponential closed form k e^{-theta tau} / (theta delta) is
// used; it dominates every finite sum.
std::function<double(double)> samplepath_profile(const StageSpec& stage, double delta,
                                                 std::optional<long> horizon);

struct MultistageDefaults {
    double beta = 0;     // rate slack consumed by the per-hop terms
    double theta_s = 0;
    double split = 0.5;  // error budget fraction on the arrival side
};

struct NetworkSpec {
    int h = 1;
    int k = 1;
    SigmaRho arrival;  // ArrivalLower
    SigmaRho service;  // ServiceUpper, one parallel server of a stage
    MultistageDefaults defaults;
};

// Network with midpoint default parameters (half the admissible theta_s, half
// the remaining rate gap as beta).
NetworkSpec make_network(int h, int k, const DistributionSpec& arrival,
                         const DistributionSpec& service);

// End-to-end sojourn quantile
//   beta + tau_A + h (rho_S + tau_S + ln(h^2 k / (theta_S beta)) / theta_S)
// with e^{-theta_A tau_A} + e^{-theta_S tau_S} <= eps and
// rho_S(theta_S) + beta <= rho_A(-theta_A).
double e2e_quantile_at(const NetworkSpec& net, double eps, double beta, double theta_s,
                       double split);

// Evaluation at the network's stored default parameters (no search).
double e2e_sojourn_quantile_fixed(const NetworkSpec& net, double eps);

// Nested one-dimensional searches over (theta_s, beta, split).
double e2e_sojourn_quantile(const NetworkSpec& net, double eps);

struct E2EDetail {
    double quantile;
    double beta;
    double theta_s;
    double theta_a;
    double split;
};
E2EDetail e2e_sojourn_quantile_detail(const NetworkSpec& net, double eps);

struct ScalingPoint {
    int h;
    double quantile;
};
struct ScalingCurve {
    std::vector<ScalingPoint> points;
    double fit_a = 0;  // least squares of quantile against h ln(h k)
    double fit_b = 0;
    double r_squared = 0;
};

ScalingCurve scaling_curve(const NetworkSpec& base, std::span<const int> h_values, double eps,
                           bool optimize_per_h);

}  // namespace forkbound
