#include "forkbound/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "forkbound/numerics.hpp"

namespace forkbound {

namespace {

bool is_degenerate(const DistributionSpec& dist) {
    return std::holds_alternative<Deterministic>(dist.law);
}

std::function<double(double)> exponential_profile(double theta) {
    return [theta](double tau) { return std::exp(-theta * std::max(tau, 0.0)); };
}

// Smallest slack at which the profile drops to the budget; +inf if never.
double profile_inverse(const std::function<double(double)>& profile, double budget) {
    const auto inv = invert_nonincreasing(profile, budget, 1.0);
    return inv ? *inv : kInfinity;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

Envelope envelope_from_iid(const DistributionSpec& dist, double theta) {
    if (!(theta > 0)) throw DomainError("envelope_from_iid: theta must be positive");
    if (dist.role == Role::InterArrival) {
        const double rate = rho_arrival(dist, theta);
        if (is_degenerate(dist))
            return {EnvDirection::Arrival, rate, [](double) { return 0.0; }};
        return {EnvDirection::Arrival, rate, exponential_profile(theta)};
    }
    const double rate = rho_service(dist, theta);
    if (is_degenerate(dist))
        return {EnvDirection::Service, rate, [](double) { return 0.0; }};
    return {EnvDirection::Service, rate, exponential_profile(theta)};
}

SojournEnvelopeBound sojourn_bound_envelopes_detail(const Envelope& arr, const Envelope& srv,
                                                    double eps) {
    if (!(eps > 0 && eps < 1)) throw DomainError("sojourn_bound_envelopes: eps outside (0,1)");
    // equality is admissible; leave an ulp of headroom for rates produced by
    // root finding on the stability boundary
    if (srv.rate > arr.rate * (1 + 1e-12) + 1e-12)
        throw InfeasibleError("sojourn_bound_envelopes: service rate parameter exceeds arrival");

    const auto delay_at = [&](double split) {
        const double tau_a = profile_inverse(arr.error_profile, split * eps);
        const double tau_s = profile_inverse(srv.error_profile, (1.0 - split) * eps);
        return tau_a + tau_s;
    };

    // search over the budget split in logit space; the extremes matter when
    // the two decay speeds are far apart
    const double u_best =
        grid_golden_min([&](double u) { return delay_at(sigmoid(u)); }, -34.0, 34.0, 129, false,
                        200);
    double split = sigmoid(u_best);
    double best = delay_at(split);

    // degenerate profiles admit a zero budget on their side
    for (double boundary : {0.0, 1.0}) {
        const double v = delay_at(boundary);
        if (v < best) {
            best = v;
            split = boundary;
        }
    }
    if (!std::isfinite(best))
        throw InfeasibleError("sojourn_bound_envelopes: error budget unreachable");

    SojournEnvelopeBound out;
    out.split = split;
    out.tau_arrival = profile_inverse(arr.error_profile, split * eps);
    out.tau_service = profile_inverse(srv.error_profile, (1.0 - split) * eps);
    out.quantile = out.tau_arrival + out.tau_service + srv.rate;
    return out;
}

double sojourn_bound_envelopes(const Envelope& arr, const Envelope& srv, double eps) {
    return sojourn_bound_envelopes_detail(arr, srv, eps).quantile;
}

double kl_error_profile(const KLConfig& cfg, double p) {
    if (cfg.k < 1 || cfg.l < 1 || cfg.l > cfg.k)
        throw DomainError("kl_error_profile: need 1 <= l <= k");
    if (!(p >= 0 && p <= 1)) throw DomainError("kl_error_profile: p outside [0,1]");
    if (!cfg.independent) {
        if (cfg.l < cfg.k)
            throw IndependenceError(
                "kl_error_profile: l < k requires independent servers; only the union bound "
                "(l = k) is available without independence");
        return std::min(1.0, cfg.k * p);
    }
    // sum_{j=0}^{l-1} C(k,j) (1-p)^j p^{k-j}
    double binom = 1.0;
    double sum = 0.0;
    for (int j = 0; j < cfg.l; ++j) {
        if (j > 0) binom *= static_cast<double>(cfg.k - j + 1) / j;
        sum += binom * std::pow(1.0 - p, j) * std::pow(p, cfg.k - j);
    }
    return std::clamp(sum, 0.0, 1.0);
}

std::function<double(double)> forkjoin_stage_profile(int k,
                                                     std::function<double(double)> srv_profile,
                                                     bool independent, int l) {
    if (k < 1 || l < 1 || l > k) throw DomainError("forkjoin_stage_profile: need 1 <= l <= k");
    if (k == 1) return srv_profile;
    if (!independent) {
        if (l < k)
            throw IndependenceError(
                "forkjoin_stage_profile: l < k requires independent parallel servers");
        return [k, srv = std::move(srv_profile)](double tau) {
            return std::min(1.0, k * srv(tau));
        };
    }
    return [k, l, srv = std::move(srv_profile)](double tau) {
        const double p = std::clamp(srv(tau), 0.0, 1.0);
        return kl_error_profile({k, l, true}, p);
    };
}

double envelope_tail(const Envelope& arr, const std::function<double(double)>& stage_profile,
                     double rho_s, double tau) {
    const double slack = tau - rho_s;
    if (slack < 0) return 1.0;
    const auto total = [&](double tau_a) {
        return arr.error_profile(tau_a) + stage_profile(slack - tau_a);
    };
    double best = std::min(total(0.0), total(slack));
    if (slack > 0) {
        const double x = grid_golden_min(total, 0.0, slack, 65, false, 160);
        best = std::min(best, total(x));
    }
    return std::clamp(best, 0.0, 1.0);
}

Envelope LatencyRateServer::envelope() const {
    if (!(decay > 0) || !(rate_inverse > 0))
        throw DomainError("LatencyRateServer: rate and decay must be positive");
    return {EnvDirection::Service, rate_inverse, exponential_profile(decay)};
}

namespace {

// Best achievable envelope quantile over the admissible arrival decay, for a
// given arrival-rate function of theta.
double best_over_theta(const std::function<double(double)>& arrival_rate,
                       const std::function<Envelope(double)>& arrival_env, const Envelope& srv,
                       double eps) {
    const double mean_rate = arrival_rate(1e-9);
    if (!(mean_rate > srv.rate))
        throw InfeasibleError("latency_rate_strategies: arrivals too fast for the service rate");

    double hi = 1.0;
    while (arrival_rate(hi) > srv.rate && hi < 1e9) hi *= 2;
    const double theta_max =
        (hi >= 1e9) ? 1e9
                    : bisect_root([&](double t) { return arrival_rate(t) - srv.rate; },
                                  1e-9, hi, 200);

    const auto objective = [&](double theta) {
        try {
            if (arrival_rate(theta) < srv.rate) return kInfinity;
            return sojourn_bound_envelopes(arrival_env(theta), srv, eps);
        } catch (const std::runtime_error&) {
            return kInfinity;
        }
    };
    const double theta = grid_golden_min(objective, theta_max * 1e-6, theta_max, 96, true, 200);
    return objective(theta);
}

}  // namespace

LatencyRateQuantiles latency_rate_strategies(double lambda, double kappa, double eps) {
    if (!(lambda > 0)) throw DomainError("latency_rate_strategies: lambda must be positive");
    if (!(kappa > 0)) throw DomainError("latency_rate_strategies: kappa must be positive");
    if (!(eps > 0 && eps < 1)) throw DomainError("latency_rate_strategies: eps outside (0,1)");

    const auto arrival = make_exponential(lambda, Role::InterArrival);
    const LatencyRateServer server{1.0, kappa};
    const Envelope srv = server.envelope();

    LatencyRateQuantiles out{};

    out.single = best_over_theta(
        [&](double t) { return rho_arrival(arrival, t); },
        [&](double t) { return envelope_from_iid(arrival, t); }, srv, eps);

    // round-robin over both servers: thinned arrival envelope per server and a
    // union bound across the two resequenced servers, i.e. half the budget
    out.thinned = best_over_theta(
        [&](double t) { return thin_deterministic(arrival, 2, t); },
        [&](double t) {
            return Envelope{EnvDirection::Arrival, thin_deterministic(arrival, 2, t),
                            exponential_profile(t)};
        },
        srv, eps / 2);

    // (2,1) fork-join: substitute the binomial profile for the service side
    const Envelope redundant_srv{EnvDirection::Service, srv.rate,
                                 forkjoin_stage_profile(2, srv.error_profile, true, 1)};
    out.redundant_21 = best_over_theta(
        [&](double t) { return rho_arrival(arrival, t); },
        [&](double t) { return envelope_from_iid(arrival, t); }, redundant_srv, eps);

    return out;
}

}  // namespace forkbound
