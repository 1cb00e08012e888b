#include "forkbound/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "forkbound/numerics.hpp"

namespace forkbound {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw DomainError(msg);
}

}  // namespace

DistributionSpec make_exponential(double rate, Role role) {
    require(rate > 0, "Exponential: rate must be positive");
    return {Exponential{rate}, role};
}

DistributionSpec make_deterministic(double value, Role role) {
    require(value >= 0, "Deterministic: value must be non-negative");
    return {Deterministic{value}, role};
}

DistributionSpec make_gaussian(double mean, double variance, Role role) {
    require(variance >= 0, "Gaussian: variance must be non-negative");
    return {Gaussian{mean, variance}, role};
}

DistributionSpec make_erlang(int shape, double rate, Role role) {
    require(shape >= 1, "ErlangK: shape must be at least 1");
    require(rate > 0, "ErlangK: rate must be positive");
    return {ErlangK{shape, rate}, role};
}

double mean_of(const DistributionSpec& dist) {
    return std::visit(
        [](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) return 1.0 / law.rate;
            if constexpr (std::is_same_v<T, Deterministic>) return law.value;
            if constexpr (std::is_same_v<T, Gaussian>) return law.mean;
            if constexpr (std::is_same_v<T, ErlangK>) return law.shape / law.rate;
        },
        dist.law);
}

double mgf_theta_sup(const DistributionSpec& dist) {
    return std::visit(
        [](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) return law.rate;
            if constexpr (std::is_same_v<T, ErlangK>) return law.rate;
            return kInfinity;
        },
        dist.law);
}

double mgf(const DistributionSpec& dist, double theta) {
    const double sup = mgf_theta_sup(dist);
    if (std::isfinite(sup) && theta > sup - kThetaPoleMargin)
        throw DomainError("mgf: theta at or beyond the MGF pole");
    return std::visit(
        [theta](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return law.rate / (law.rate - theta);
            if constexpr (std::is_same_v<T, Deterministic>)
                return std::exp(theta * law.value);
            if constexpr (std::is_same_v<T, Gaussian>)
                return std::exp(theta * law.mean + 0.5 * theta * theta * law.variance);
            if constexpr (std::is_same_v<T, ErlangK>)
                return std::pow(law.rate / (law.rate - theta), law.shape);
        },
        dist.law);
}

double rho_arrival(const DistributionSpec& dist, double theta) {
    require(theta > 0, "rho_arrival: theta must be positive");
    require(dist.role == Role::InterArrival, "rho_arrival: distribution is not an arrival law");
    return -std::log(mgf(dist, -theta)) / theta;
}

double rho_service(const DistributionSpec& dist, double theta) {
    require(theta > 0, "rho_service: theta must be positive");
    require(dist.role == Role::ServiceTime, "rho_service: distribution is not a service law");
    return std::log(mgf(dist, theta)) / theta;
}

DistributionSpec scale_capacity(const DistributionSpec& dist, double c) {
    require(c > 0, "scale_capacity: capacity must be positive");
    DistLaw scaled = std::visit(
        [c](const auto& law) -> DistLaw {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>) return Exponential{law.rate * c};
            if constexpr (std::is_same_v<T, Deterministic>) return Deterministic{law.value / c};
            if constexpr (std::is_same_v<T, Gaussian>)
                return Gaussian{law.mean / c, law.variance / (c * c)};
            if constexpr (std::is_same_v<T, ErlangK>) return ErlangK{law.shape, law.rate * c};
        },
        dist.law);
    return {scaled, dist.role};
}

double thin_random(const DistributionSpec& arrival, double p, double theta) {
    require(p > 0 && p <= 1, "thin_random: p must lie in (0,1]");
    require(theta > 0, "thin_random: theta must be positive");
    require(arrival.role == Role::InterArrival, "thin_random: distribution is not an arrival law");
    const double m = mgf(arrival, -theta);
    const double tail = (1.0 - p) * m;
    if (tail >= 1.0)
        throw DomainError("thin_random: geometric MGF condition M(-theta) < 1/(1-p) fails");
    return -std::log(p * m / (1.0 - tail)) / theta;
}

double thin_deterministic(const DistributionSpec& arrival, int k, double theta) {
    require(k >= 1, "thin_deterministic: k must be at least 1");
    return k * rho_arrival(arrival, theta);
}

double split_merge_rho(std::span<const DistributionSpec> services, double theta) {
    require(!services.empty(), "split_merge_rho: no service laws given");
    require(theta > 0, "split_merge_rho: theta must be positive");
    double sum = 0;
    for (const auto& s : services) {
        require(s.role == Role::ServiceTime, "split_merge_rho: distribution is not a service law");
        sum += mgf(s, theta);
    }
    return std::log(sum) / theta;
}

double sample(const DistributionSpec& dist, CounterRng& rng) {
    return std::visit(
        [&rng](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return -std::log(1.0 - rng.next_uniform()) / law.rate;
            if constexpr (std::is_same_v<T, Deterministic>)
                return law.value;
            if constexpr (std::is_same_v<T, Gaussian>) {
                const double x =
                    law.mean + std::sqrt(law.variance) * inverse_normal_cdf(rng.next_uniform());
                return std::max(0.0, x);
            }
            if constexpr (std::is_same_v<T, ErlangK>) {
                double sum = 0;
                for (int i = 0; i < law.shape; ++i)
                    sum += -std::log(1.0 - rng.next_uniform()) / law.rate;
                return sum;
            }
        },
        dist.law);
}

double sample_from_uniform(const DistributionSpec& dist, double u) {
    require(u > 0 && u < 1, "sample_from_uniform: u must lie in (0,1)");
    return std::visit(
        [u](const auto& law) -> double {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                return -std::log(1.0 - u) / law.rate;
            if constexpr (std::is_same_v<T, Deterministic>)
                return law.value;
            if constexpr (std::is_same_v<T, Gaussian>)
                return std::max(0.0, law.mean + std::sqrt(law.variance) * inverse_normal_cdf(u));
            if constexpr (std::is_same_v<T, ErlangK>) {
                // monotone bisection on the closed-form cdf
                double lo = 0, hi = std::max(1.0, 2.0 * law.shape / law.rate);
                while (erlang_cdf(law.shape, law.rate, hi) < u) hi *= 2;
                for (int i = 0; i < 200; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid == lo || mid == hi) break;
                    (erlang_cdf(law.shape, law.rate, mid) < u ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
        },
        dist.law);
}

namespace {

std::map<std::string, double> parse_kv(std::string_view body) {
    std::map<std::string, double> out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t comma = body.find(',', pos);
        if (comma == std::string_view::npos) comma = body.size();
        const std::string_view item = body.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 >= item.size())
            throw ParseError("distribution literal: expected key=value, got '" +
                             std::string(item) + "'");
        const std::string key(item.substr(0, eq));
        const std::string val(item.substr(eq + 1));
        char* end = nullptr;
        const double parsed = std::strtod(val.c_str(), &end);
        if (end == val.c_str() || *end != '\0')
            throw ParseError("distribution literal: bad number '" + val + "'");
        if (!out.emplace(key, parsed).second)
            throw ParseError("distribution literal: duplicate key '" + key + "'");
        pos = comma + 1;
    }
    return out;
}

double take(std::map<std::string, double>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("distribution literal: missing key '" + key + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
}

}  // namespace

DistributionSpec parse_distribution(std::string_view text, Role role) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos)
        throw ParseError("distribution literal: expected kind:params in '" + std::string(text) +
                         "'");
    const std::string kind(text.substr(0, colon));
    auto kv = parse_kv(text.substr(colon + 1));

    DistributionSpec spec;
    try {
        if (kind == "exp") {
            const bool has_mu = kv.count("mu") > 0;
            const bool has_lambda = kv.count("lambda") > 0;
            if (has_mu == has_lambda)
                throw ParseError("exp literal: give exactly one of mu= or lambda=");
            spec = make_exponential(take(kv, has_mu ? "mu" : "lambda"), role);
        } else if (kind == "det") {
            spec = make_deterministic(take(kv, "d"), role);
        } else if (kind == "gauss") {
            const double mean = take(kv, "mean");
            spec = make_gaussian(mean, take(kv, "var"), role);
        } else if (kind == "erlang") {
            const double shape = take(kv, "k");
            if (shape != std::floor(shape))
                throw ParseError("erlang literal: k must be an integer");
            spec = make_erlang(static_cast<int>(shape), take(kv, "lambda"), role);
        } else {
            throw ParseError("distribution literal: unknown kind '" + kind + "'");
        }
    } catch (const DomainError& e) {
        throw ParseError(std::string("distribution literal: ") + e.what());
    }
    if (!kv.empty())
        throw ParseError("distribution literal: unexpected key '" + kv.begin()->first + "'");
    return spec;
}

std::string to_string(const DistributionSpec& dist) {
    char buf[96];
    std::visit(
        [&](const auto& law) {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, Exponential>)
                std::snprintf(buf, sizeof buf, "exp:%s=%.12g",
                              dist.role == Role::ServiceTime ? "mu" : "lambda", law.rate);
            if constexpr (std::is_same_v<T, Deterministic>)
                std::snprintf(buf, sizeof buf, "det:d=%.12g", law.value);
            if constexpr (std::is_same_v<T, Gaussian>)
                std::snprintf(buf, sizeof buf, "gauss:mean=%.12g,var=%.12g", law.mean,
                              law.variance);
            if constexpr (std::is_same_v<T, ErlangK>)
                std::snprintf(buf, sizeof buf, "erlang:k=%d,lambda=%.12g", law.shape, law.rate);
        },
        dist.law);
    return buf;
}

}  // namespace forkbound
