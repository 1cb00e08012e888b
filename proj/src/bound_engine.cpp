#include "forkbound/bound_engine.hpp"

#include <algorithm>
#include <cmath>

#include "forkbound/numerics.hpp"

namespace forkbound {

namespace {

// Search cap when every theta is admissible (deterministic-vs-deterministic
// style inputs with an unbounded domain).
constexpr double kThetaSearchCap = 1e6;

double stability_gap(const ServerSpec& server, double theta) {
    return server.arrival.rho_at(theta) - server.service.rho_at(theta);
}

double required_gap(const ServerSpec& server) { return server.iid ? 0.0 : kStabilityMargin; }

BoundTerm make_term(const ServerSpec& server, double theta, bool sojourn) {
    if (!server.arrival.in_domain(theta) || !server.service.in_domain(theta))
        throw DomainError("bound term: theta outside the parameter domain");
    const double gap = stability_gap(server, theta);
    if (gap < required_gap(server))
        throw StabilityError("bound term: rho_S(theta) exceeds rho_A(-theta)");
    return {gg_alpha(server, theta), theta, sojourn ? server.service.rho_at(theta) : 0.0};
}

TailBound assemble(std::span<const ServerSpec> servers, std::span<const double> thetas,
                   bool sojourn) {
    if (servers.size() != thetas.size())
        throw ShapeError("bound: one theta per server required");
    if (servers.empty()) throw ShapeError("bound: no servers given");
    TailBound bound;
    bound.terms.reserve(servers.size());
    for (std::size_t i = 0; i < servers.size(); ++i)
        bound.terms.push_back(make_term(servers[i], thetas[i], sojourn));
    if (bound.eval_unclamped(0.0) > 1.0) {
        const auto crossing = invert_nonincreasing(
            [&bound](double tau) { return bound.eval_unclamped(tau); }, 1.0, 1.0);
        bound.valid_from = crossing.value_or(0.0);
    }
    return bound;
}

}  // namespace

ServerSpec gi_server(const DistributionSpec& arrival, const DistributionSpec& service) {
    return {arrival_sigma_rho(arrival), service_sigma_rho(service), true};
}

ServerSpec gg_server(const DistributionSpec& arrival, const DistributionSpec& service) {
    return {arrival_sigma_rho(arrival), service_sigma_rho(service), false};
}

double TailBound::eval_unclamped(double tau) const {
    double sum = 0;
    for (const auto& t : terms) sum += t.alpha * std::exp(-t.theta * (tau - t.shift));
    return sum;
}

double TailBound::eval(double tau) const { return std::min(1.0, eval_unclamped(tau)); }

double gg_alpha(const ServerSpec& server, double theta) {
    if (server.iid) return 1.0;
    const double gap = stability_gap(server, theta);
    if (gap < kStabilityMargin)
        throw StabilityError("gg_alpha: gap below the stability margin");
    const double burst = server.arrival.sigma_at(theta) + server.service.sigma_at(theta);
    return std::exp(theta * burst) / (-std::expm1(-theta * gap));
}

TailBound sojourn_bound(std::span<const ServerSpec> servers, std::span<const double> thetas) {
    return assemble(servers, thetas, true);
}

TailBound waiting_bound(std::span<const ServerSpec> servers, std::span<const double> thetas) {
    return assemble(servers, thetas, false);
}

double admissible_theta_sup(const ServerSpec& server) {
    const double need = required_gap(server);
    double hi = std::min({server.arrival.theta_sup, server.service.theta_sup, kThetaSearchCap});
    if (std::isfinite(server.arrival.theta_sup) || std::isfinite(server.service.theta_sup))
        hi -= 1e-9;  // stay off the pole

    const auto gap_ok = [&](double theta) {
        try {
            return stability_gap(server, theta) - need;
        } catch (const DomainError&) {
            return -kInfinity;
        }
    };
    if (gap_ok(hi) >= 0) return hi;

    // The feasible set need not touch theta = 0 (a split-merge service rate
    // parameter diverges there), so scan downward for the largest feasible
    // point before refining. The floor stays coarse enough that log-of-MGF
    // rounding noise cannot fake a positive gap for a critically loaded
    // system.
    constexpr int kScan = 256;
    const double lo = hi * 1e-6;
    double feasible = -1, infeasible_above = hi;
    for (int i = kScan - 1; i >= 0; --i) {
        const double theta = lo * std::exp(std::log(hi / lo) * i / (kScan - 1));
        if (gap_ok(theta) >= 0) {
            feasible = theta;
            break;
        }
        infeasible_above = theta;
    }
    if (feasible < 0)
        throw StabilityError("no admissible theta: system unstable at the given parameters");

    double a = feasible, b = infeasible_above;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        (gap_ok(mid) >= 0 ? a : b) = mid;
    }
    return a;
}

namespace {

double objective_value(const ServerSpec& server, double theta, const ThetaObjective& objective) {
    const double alpha = gg_alpha(server, theta);
    const double rho_s = server.service.rho_at(theta);
    return std::visit(
        [&](const auto& obj) -> double {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, TailAt>)
                return std::log(static_cast<double>(obj.parallel)) + std::log(alpha) +
                       theta * (rho_s - obj.tau);
            if constexpr (std::is_same_v<T, QuantileAt>)
                return rho_s + (std::log(static_cast<double>(obj.parallel)) + std::log(alpha) +
                                std::log(1.0 / obj.eps)) /
                                   theta;
            if constexpr (std::is_same_v<T, MeanSojourn>)
                return rho_s + (std::log(obj.parallel * alpha) + 1.0) / theta;
        },
        objective);
}

}  // namespace

double optimize_theta(const ServerSpec& server, const ThetaObjective& objective) {
    const double theta_hi = admissible_theta_sup(server);
    const double theta_lo = theta_hi * 1e-8;
    const auto f = [&](double theta) {
        try {
            if (stability_gap(server, theta) < required_gap(server)) return kInfinity;
            return objective_value(server, theta, objective);
        } catch (const std::runtime_error&) {
            return kInfinity;
        }
    };
    return grid_golden_min(f, theta_lo, theta_hi, 64, true, 200);
}

double quantile(const TailBound& bound, double eps) {
    if (!(eps > 0 && eps < 1)) throw DomainError("quantile: eps must lie in (0,1)");
    if (bound.terms.empty()) throw DomainError("quantile: empty bound");

    const bool homogeneous = std::all_of(
        bound.terms.begin(), bound.terms.end(), [&](const BoundTerm& t) {
            return t.theta == bound.terms.front().theta && t.shift == bound.terms.front().shift;
        });
    if (homogeneous) {
        double alpha_sum = 0;
        for (const auto& t : bound.terms) alpha_sum += t.alpha;
        const auto& front = bound.terms.front();
        return std::max(0.0, front.shift + std::log(alpha_sum / eps) / front.theta);
    }

    if (bound.eval_unclamped(0.0) <= eps) return 0.0;
    double hi = 0;
    const double n = static_cast<double>(bound.terms.size());
    for (const auto& t : bound.terms)
        hi = std::max(hi, t.shift + std::log(std::max(t.alpha, 1.0) * n / eps) / t.theta);
    double lo = 0;
    for (int i = 0; i < 300; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (bound.eval_unclamped(mid) <= eps ? hi : lo) = mid;
    }
    return hi;
}

double expected_sojourn(int k, double rho_s, double theta, double alpha) {
    if (k < 1) throw DomainError("expected_sojourn: k must be at least 1");
    if (!(theta > 0)) throw DomainError("expected_sojourn: theta must be positive");
    if (!(k * alpha >= 1.0)) throw DomainError("expected_sojourn: k*alpha must be at least 1");
    return rho_s + (std::log(k * alpha) + 1.0) / theta;
}

Allocation allocate_capacity_mean(std::span<const double> service_means, double total_c) {
    if (service_means.empty()) throw DomainError("allocate_capacity_mean: no servers");
    if (!(total_c > 0)) throw DomainError("allocate_capacity_mean: total capacity must be positive");
    double sum = 0;
    for (double m : service_means) {
        if (!(m > 0)) throw DomainError("allocate_capacity_mean: means must be positive");
        sum += m;
    }
    Allocation alloc{{}, AllocStrategy::MeanBalanced, {}};
    alloc.values.reserve(service_means.size());
    for (double m : service_means) alloc.values.push_back(total_c * m / sum);
    return alloc;
}

Allocation allocate_capacity_tail(std::span<const MomentPair> services, MomentPair arrival,
                                  double theta) {
    if (services.empty()) throw DomainError("allocate_capacity_tail: no servers");
    if (!(theta > 0)) throw DomainError("allocate_capacity_tail: theta must be positive");
    const double target = arrival.mean - 0.5 * theta * arrival.variance;
    if (!(target > 0))
        throw InfeasibleError("allocate_capacity_tail: arrival envelope rate non-positive");
    Allocation alloc{{}, AllocStrategy::TailBalanced, {}};
    alloc.values.reserve(services.size());
    for (const auto& s : services) {
        if (!(s.mean > 0) || s.variance < 0)
            throw DomainError("allocate_capacity_tail: invalid service moments");
        double inv_c;
        if (s.variance == 0) {
            inv_c = target / s.mean;
        } else {
            const double half = 0.5 * theta * s.variance;
            inv_c = (-s.mean + std::sqrt(s.mean * s.mean + 4 * half * target)) / (2 * half);
        }
        alloc.values.push_back(1.0 / inv_c);
    }
    return alloc;
}

Allocation split_rates_mean(std::span<const double> mus, double lambda) {
    if (mus.empty()) throw DomainError("split_rates_mean: no servers");
    double sum = 0;
    for (double mu : mus) {
        if (!(mu > 0)) throw DomainError("split_rates_mean: rates must be positive");
        sum += mu;
    }
    if (!(lambda < sum)) throw InfeasibleError("split_rates_mean: lambda must stay below sum(mu)");
    Allocation alloc{{}, AllocStrategy::MeanBalanced, {}};
    alloc.values.reserve(mus.size());
    for (double mu : mus) alloc.values.push_back(lambda * mu / sum);
    return alloc;
}

Allocation split_rates_tail(std::span<const double> mus, double lambda) {
    if (mus.empty()) throw DomainError("split_rates_tail: no servers");
    double total = 0;
    for (double mu : mus) {
        if (!(mu > 0)) throw DomainError("split_rates_tail: rates must be positive");
        total += mu;
    }
    if (!(lambda < total)) throw InfeasibleError("split_rates_tail: lambda must stay below sum(mu)");

    Allocation alloc{std::vector<double>(mus.size(), 0.0), AllocStrategy::TailBalanced, {}};
    while (true) {
        double active_sum = 0;
        std::size_t active = 0;
        for (std::size_t i = 0; i < mus.size(); ++i) {
            if (!alloc.excluded.count(i)) {
                active_sum += mus[i];
                ++active;
            }
        }
        const double level = (active_sum - lambda) / static_cast<double>(active);
        bool changed = false;
        for (std::size_t i = 0; i < mus.size(); ++i) {
            if (alloc.excluded.count(i)) continue;
            if (mus[i] - level < 0) {
                alloc.excluded.insert(i);
                changed = true;
            }
        }
        if (!changed) {
            for (std::size_t i = 0; i < mus.size(); ++i)
                alloc.values[i] = alloc.excluded.count(i) ? 0.0 : mus[i] - level;
            return alloc;
        }
    }
}

}  // namespace forkbound
