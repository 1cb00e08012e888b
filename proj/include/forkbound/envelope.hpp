#pragma once

#include <functional>

#include "forkbound/distributions.hpp"

namespace forkbound {

// Statistical sample-path envelopes: a rate plus an error profile mapping
// slack to a violation probability. Unlike the (sigma,rho) route, envelopes
// of independent parallel servers compose through order statistics, which is
// what makes l-out-of-k redundancy analyzable.

enum class EnvDirection { Arrival, Service };

struct Envelope {
    EnvDirection direction;
    double rate;  // time per job
    std::function<double(double)> error_profile;  // non-increasing, <= 1
};

// Envelope of an iid process at decay theta: rate rho_A(-theta) or
// rho_S(theta) with profile e^{-theta tau}. A deterministic law has a
// degenerate profile that is identically 0 for tau >= 0.
Envelope envelope_from_iid(const DistributionSpec& dist, double theta);

struct SojournEnvelopeBound {
    double quantile;     // tau_A + tau_S + rho_S
    double tau_arrival;
    double tau_service;
    double split;        // fraction of the error budget given to the arrival side
};

// Smallest tau_A + tau_S + rho_S with eps_A(tau_A) + eps_S(tau_S) <= eps; the
// split of the budget is optimized by a seeded golden-section search.
SojournEnvelopeBound sojourn_bound_envelopes_detail(const Envelope& arr, const Envelope& srv,
                                                    double eps);
double sojourn_bound_envelopes(const Envelope& arr, const Envelope& srv, double eps);

struct KLConfig {
    int k = 1;
    int l = 1;
    bool independent = true;
};

// Lower binomial tail sum_{j=0}^{l-1} C(k,j) (1-p)^j p^{k-j}: the error
// profile of an l-out-of-k join when each server misses its envelope with
// probability p, independently. Without independence only l = k is allowed
// (union bound k*p).
double kl_error_profile(const KLConfig& cfg, double p);

// Per-stage profile of a fork-join stage: binomial when independent, k * eps
// (union bound, l = k only) otherwise.
std::function<double(double)> forkjoin_stage_profile(int k,
                                                     std::function<double(double)> srv_profile,
                                                     bool independent, int l);

// Dual direction: least achievable error at total slack tau, i.e.
// min over tau_A + tau_S = tau - rho_S of eps_A(tau_A) + eps_stage(tau_S).
double envelope_tail(const Envelope& arr, const std::function<double(double)>& stage_profile,
                     double rho_s, double tau);

// e^{-kappa tau} latency profile around a fixed service rate.
struct LatencyRateServer {
    double rate_inverse;  // rho_S
    double decay;         // kappa
    Envelope envelope() const;
};

struct LatencyRateQuantiles {
    double single;
    double thinned;        // both servers, round-robin split plus resequencing
    double redundant_21;   // (2,1) fork-join
};

// The three ways to use two parallel latency-rate servers (rho_S = 1) fed by
// exponential arrivals, each evaluated at its best decay parameter.
LatencyRateQuantiles latency_rate_strategies(double lambda, double kappa, double eps);

}  // namespace forkbound
