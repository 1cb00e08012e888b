#include "forkbound/multistage.hpp"

#include <algorithm>
#include <cmath>

#include "forkbound/numerics.hpp"

namespace forkbound {

namespace {

double mean_arrival_rate(const SigmaRho& arrival) { return arrival.rho_at(1e-9); }

// Largest admissible theta_s: stay inside the service domain and keep
// rho_S(theta_s) below the mean inter-arrival time so that a positive beta
// exists.
double theta_s_limit(const NetworkSpec& net) {
    double hi = std::min(net.service.theta_sup, 1e6);
    if (std::isfinite(net.service.theta_sup)) hi -= 1e-9;
    const double budget = mean_arrival_rate(net.arrival);
    const auto gap = [&](double t) {
        try {
            return budget - net.service.rho_at(t);
        } catch (const DomainError&) {
            return -kInfinity;
        }
    };
    if (gap(1e-9) <= 0)
        throw InfeasibleError("multistage: mean service time reaches the mean inter-arrival time");
    if (gap(hi) > 0) return hi;
    double lo = 1e-9;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (gap(mid) > 0 ? lo : hi) = mid;
    }
    return lo;
}

// Largest theta_a with rho_A(-theta_a) >= floor.
double theta_a_for(const SigmaRho& arrival, double floor) {
    const auto gap = [&](double t) {
        try {
            return arrival.rho_at(t) - floor;
        } catch (const DomainError&) {
            return -kInfinity;
        }
    };
    if (gap(1e-9) < 0)
        throw InfeasibleError("multistage: arrival envelope rate below the required floor");
    double hi = std::min(arrival.theta_sup, 1e9);
    if (std::isfinite(arrival.theta_sup)) hi -= 1e-9;
    if (gap(hi) >= 0) return hi;
    double lo = 1e-9;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (gap(mid) >= 0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

StageSpec make_union_stage(int k, const DistributionSpec& service, double theta_s) {
    if (k < 1) throw DomainError("make_union_stage: k must be at least 1");
    const double rho_s = rho_service(service, theta_s);
    StageSpec stage{k, rho_s, theta_s, {}};
    stage.stage_profile = [k, theta_s](double tau) {
        return std::min(1.0, k * std::exp(-theta_s * std::max(tau, 0.0)));
    };
    return stage;
}

StageSpec make_kl_stage(int k, int l, const DistributionSpec& service, double theta_s) {
    if (k < 1 || l < 1 || l > k) throw DomainError("make_kl_stage: need 1 <= l <= k");
    const double rho_s = rho_service(service, theta_s);
    StageSpec stage{k, rho_s, theta_s, {}};
    stage.stage_profile = forkjoin_stage_profile(
        k, [theta_s](double tau) { return std::exp(-theta_s * std::max(tau, 0.0)); }, true, l);
    return stage;
}

std::function<double(double)> samplepath_profile(const StageSpec& stage, double delta,
                                                 std::optional<long> horizon) {
    if (!(delta > 0)) throw DomainError("samplepath_profile: delta must be positive");
    if (horizon) {
        const long m = *horizon;
        if (m < 1) throw DomainError("samplepath_profile: horizon must be at least 1");
        auto profile = stage.stage_profile;
        return [profile, delta, m](double tau) {
            double sum = 0;
            for (long j = 1; j <= m; ++j) sum += profile(tau + delta * j);
            return sum;
        };
    }
    const int k = stage.k;
    const double theta = stage.theta_s;
    return [k, theta, delta](double tau) {
        return k * std::exp(-theta * std::max(tau, 0.0)) / (theta * delta);
    };
}

NetworkSpec make_network(int h, int k, const DistributionSpec& arrival,
                         const DistributionSpec& service) {
    if (h < 1 || k < 1) throw DomainError("make_network: h and k must be at least 1");
    NetworkSpec net{h, k, arrival_sigma_rho(arrival), service_sigma_rho(service), {}};
    const double theta_cap = theta_s_limit(net);
    net.defaults.theta_s = 0.5 * theta_cap;
    const double gap = mean_arrival_rate(net.arrival) - net.service.rho_at(net.defaults.theta_s);
    net.defaults.beta = 0.5 * gap;
    net.defaults.split = 0.5;
    return net;
}

double e2e_quantile_at(const NetworkSpec& net, double eps, double beta, double theta_s,
                       double split) {
    if (!(eps > 0 && eps < 1)) throw DomainError("e2e_quantile_at: eps outside (0,1)");
    if (!(beta > 0)) throw DomainError("e2e_quantile_at: beta must be positive");
    if (!(split > 0 && split < 1)) throw DomainError("e2e_quantile_at: split outside (0,1)");
    const double rho_s = net.service.rho_at(theta_s);
    const double theta_a = theta_a_for(net.arrival, rho_s + beta);
    const double h = net.h;
    const double log_arg = h * h * net.k / (theta_s * beta);
    if (log_arg < 1)
        throw DomainError("e2e_quantile_at: beta too large for the sample-path profile");
    const double tau_a = std::log(1.0 / (split * eps)) / theta_a;
    const double tau_s = std::log(1.0 / ((1.0 - split) * eps)) / theta_s;
    return beta + tau_a + h * (rho_s + tau_s + std::log(log_arg) / theta_s);
}

double e2e_sojourn_quantile_fixed(const NetworkSpec& net, double eps) {
    return e2e_quantile_at(net, eps, net.defaults.beta, net.defaults.theta_s, net.defaults.split);
}

E2EDetail e2e_sojourn_quantile_detail(const NetworkSpec& net, double eps) {
    const double theta_cap = theta_s_limit(net);
    const double mean_a = mean_arrival_rate(net.arrival);
    const double h = net.h;

    // For fixed (theta_s, beta) the arrival decay does not depend on the error
    // split, so resolve it once and search the split in closed form.
    struct Inner {
        double quantile;
        double split;
        double theta_a;
    };
    const auto best_split = [&](double theta_s, double beta) -> Inner {
        double rho_s, theta_a;
        try {
            rho_s = net.service.rho_at(theta_s);
            theta_a = theta_a_for(net.arrival, rho_s + beta);
        } catch (const std::runtime_error&) {
            return {kInfinity, 0.5, 0};
        }
        const double log_arg = h * h * net.k / (theta_s * beta);
        if (log_arg < 1) return {kInfinity, 0.5, 0};
        const double fixed = beta + h * (rho_s + std::log(log_arg) / theta_s);
        const auto delay = [&](double u) {
            const double split = 1.0 / (1.0 + std::exp(-u));
            return std::log(1.0 / (split * eps)) / theta_a +
                   h * std::log(1.0 / ((1.0 - split) * eps)) / theta_s;
        };
        const double u = grid_golden_min(delay, -34.0, 34.0, 65, false, 160);
        return {fixed + delay(u), 1.0 / (1.0 + std::exp(-u)), theta_a};
    };

    const auto best_beta = [&](double theta_s) -> std::pair<double, double> {
        double gap;
        try {
            gap = mean_a - net.service.rho_at(theta_s);
        } catch (const DomainError&) {
            return {kInfinity, 0};
        }
        if (!(gap > 0)) return {kInfinity, 0};
        const auto g = [&](double beta) { return best_split(theta_s, beta).quantile; };
        const double beta = grid_golden_min(g, gap * 1e-6, gap * (1 - 1e-9), 33, true, 120);
        return {g(beta), beta};
    };

    const double theta_s = grid_golden_min(
        [&](double t) { return best_beta(t).first; }, theta_cap * 1e-4, theta_cap, 33, true,
        120);
    const auto [q_at_beta, beta] = best_beta(theta_s);
    if (!std::isfinite(q_at_beta))
        throw InfeasibleError("e2e_sojourn_quantile: no admissible parameter set");
    const Inner inner = best_split(theta_s, beta);
    // the search works on the algebraic form; report through the public
    // evaluator so the returned tuple is self-consistent
    const double q = e2e_quantile_at(net, eps, beta, theta_s, inner.split);
    return {q, beta, theta_s, inner.theta_a, inner.split};
}

double e2e_sojourn_quantile(const NetworkSpec& net, double eps) {
    return e2e_sojourn_quantile_detail(net, eps).quantile;
}

ScalingCurve scaling_curve(const NetworkSpec& base, std::span<const int> h_values, double eps,
                           bool optimize_per_h) {
    ScalingCurve curve;
    std::vector<double> xs, ys;
    for (int h : h_values) {
        NetworkSpec net = base;
        net.h = h;
        const double q = optimize_per_h ? e2e_sojourn_quantile(net, eps)
                                        : e2e_sojourn_quantile_fixed(net, eps);
        curve.points.push_back({h, q});
        xs.push_back(h * std::log(static_cast<double>(h) * base.k));
        ys.push_back(q);
    }
    const LinearFit fit = linear_fit(xs, ys);
    curve.fit_a = fit.slope;
    curve.fit_b = fit.intercept;
    curve.r_squared = fit.r_squared;
    return curve;
}

}  // namespace forkbound
