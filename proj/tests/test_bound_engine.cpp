#include <cmath>
#include <doctest.h>

#include "forkbound/bound_engine.hpp"
#include "forkbound/numerics.hpp"

using namespace forkbound;

namespace {

const auto kMm1Arrival = make_exponential(0.7, Role::InterArrival);
const auto kMm1Service = make_exponential(1.0, Role::ServiceTime);

TailBound k_homogeneous(const ServerSpec& server, int k, double theta) {
    const std::vector<ServerSpec> servers(k, server);
    const std::vector<double> thetas(k, theta);
    return sojourn_bound(servers, thetas);
}

}  // namespace

TEST_CASE("sojourn bound, single M|M|1 server") {
    const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
    const TailBound b = k_homogeneous(server, 1, 0.3);
    // theta = mu - lambda gives (mu/lambda) e^{-(mu-lambda) tau}
    CHECK(b.eval(20.0) == doctest::Approx((1.0 / 0.7) * std::exp(-6.0)).epsilon(1e-12));
    CHECK(b.eval(20.0) == doctest::Approx(0.003540).epsilon(1e-3));
    for (double tau = 2.0; tau < 40; tau += 1.0)
        CHECK(b.eval_unclamped(tau) / std::exp(-0.3 * tau) ==
              doctest::Approx(1.0 / 0.7).epsilon(1e-12));
}

TEST_CASE("union bound over homogeneous servers is k times one server") {
    const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
    const TailBound one = k_homogeneous(server, 1, 0.3);
    const TailBound two = k_homogeneous(server, 2, 0.3);
    for (double tau = 3.0; tau < 50; tau += 2.5)
        CHECK(two.eval_unclamped(tau) ==
              doctest::Approx(2 * one.eval_unclamped(tau)).epsilon(1e-14));
}

TEST_CASE("general-stationary branch dominates the renewal branch") {
    const ServerSpec gi = gi_server(kMm1Arrival, kMm1Service);
    const ServerSpec gg = gg_server(kMm1Arrival, kMm1Service);
    const double theta = 0.15;
    CHECK(gg_alpha(gi, theta) == 1.0);
    const double alpha = gg_alpha(gg, theta);
    CHECK(alpha > 1.0);
    // alpha = 1 / (1 - e^{-theta (rho_A - rho_S)})
    const double gap = rho_arrival(kMm1Arrival, theta) - rho_service(kMm1Service, theta);
    CHECK(alpha == doctest::Approx(1.0 / (1.0 - std::exp(-theta * gap))).epsilon(1e-12));
    const TailBound b_gi = k_homogeneous(gi, 1, theta);
    const TailBound b_gg = k_homogeneous(gg, 1, theta);
    for (double tau = 0; tau < 80; tau += 4.0) CHECK(b_gg.eval(tau) >= b_gi.eval(tau));
}

TEST_CASE("waiting bound") {
    const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
    const std::vector<ServerSpec> one{server};
    const TailBound w = waiting_bound(one, std::vector<double>{0.3});
    CHECK(w.eval(0.0) == doctest::Approx(1.0));
    const TailBound t = sojourn_bound(one, std::vector<double>{0.3});
    for (double tau = 0; tau < 40; tau += 2.0) CHECK(w.eval(tau) <= t.eval(tau));

    const ServerSpec half = gi_server(make_exponential(0.5, Role::InterArrival), kMm1Service);
    const std::vector<ServerSpec> three(3, half);
    const TailBound w3 = waiting_bound(three, std::vector<double>(3, 0.5));
    CHECK(w3.eval(10.0) == doctest::Approx(3 * std::exp(-5.0)).epsilon(1e-12));
    CHECK(w3.eval(10.0) == doctest::Approx(0.020214).epsilon(1e-4));
}

TEST_CASE("stability guards") {
    const ServerSpec unstable = gi_server(make_exponential(1.0, Role::InterArrival),
                                          make_exponential(1.0, Role::ServiceTime));
    CHECK_THROWS_AS(admissible_theta_sup(unstable), StabilityError);
    const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
    const std::vector<ServerSpec> one{server};
    CHECK_THROWS_AS(sojourn_bound(one, std::vector<double>{0.4}), StabilityError);
    CHECK_THROWS_AS(sojourn_bound(one, std::vector<double>{1.5}), DomainError);
    CHECK_THROWS_AS(sojourn_bound(one, std::vector<double>{0.3, 0.3}), ShapeError);
}

TEST_CASE("optimize_theta") {
    SUBCASE("M|M|1 tail objective picks the maximal theta = mu - lambda") {
        const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
        CHECK(optimize_theta(server, TailAt{50.0, 1}) == doctest::Approx(0.3).epsilon(1e-6));
        CHECK(optimize_theta(server, QuantileAt{1e-6, 1}) == doctest::Approx(0.3).epsilon(1e-6));
    }
    SUBCASE("deterministic arrivals against exponential service") {
        const ServerSpec server = gi_server(make_deterministic(1.25, Role::InterArrival),
                                            kMm1Service);
        // independent root of ln(1/(1-t))/t = 1.25
        double lo = 1e-9, hi = 1 - 1e-9;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (-std::log1p(-mid) / mid < 1.25 ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        CHECK(optimize_theta(server, TailAt{60.0, 1}) == doctest::Approx(root).epsilon(1e-6));
        CHECK(root == doctest::Approx(0.3713702).epsilon(1e-5));
    }
    SUBCASE("general branch returns an interior theta") {
        const ServerSpec gg = gg_server(kMm1Arrival, kMm1Service);
        const double theta = optimize_theta(gg, QuantileAt{1e-6, 1});
        CHECK(theta > 0.0);
        CHECK(theta < admissible_theta_sup(gg) - 1e-6);
    }
}

TEST_CASE("quantile inversion") {
    SUBCASE("single term closed form") {
        TailBound b{{{1.0 / 0.7, 0.3, 0.0}}, 0.0};
        CHECK(quantile(b, 1e-6) ==
              doctest::Approx((std::log(1.0 / 0.7) + std::log(1e6)) / 0.3).epsilon(1e-12));
        CHECK(quantile(b, 1e-6) == doctest::Approx(47.2406).epsilon(1e-5));
    }
    SUBCASE("inversion consistency") {
        TailBound b{{{1.4, 0.25, 1.1}, {0.6, 0.5, 0.4}}, 0.0};
        const double eps = b.eval(5.0);
        CHECK(quantile(b, eps) == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("log k growth for homogeneous bounds") {
        const ServerSpec server = gi_server(kMm1Arrival, kMm1Service);
        const double q1 = quantile(k_homogeneous(server, 1, 0.3), 1e-6);
        for (int k : {2, 4, 8}) {
            const double qk = quantile(k_homogeneous(server, k, 0.3), 1e-6);
            CHECK(qk - q1 == doctest::Approx(std::log(double(k)) / 0.3).epsilon(1e-12));
        }
    }
    SUBCASE("monotone in tau and eps") {
        TailBound b{{{2.0, 0.2, 0.7}, {1.0, 0.6, 0.1}}, 0.0};
        double prev = 2.0;
        for (double tau = 0; tau < 60; tau += 1.0) {
            CHECK(b.eval(tau) <= prev);
            prev = b.eval(tau);
        }
        CHECK(quantile(b, 1e-3) >= quantile(b, 1e-2));
        CHECK_THROWS_AS(quantile(b, 0.0), DomainError);
    }
}

TEST_CASE("expected sojourn bound") {
    CHECK(expected_sojourn(1, 2 * std::log(2.0), 0.5, 1.0) ==
          doctest::Approx(2 * std::log(2.0) + 2.0).epsilon(1e-12));
    const double k4 = expected_sojourn(4, 2 * std::log(2.0), 0.5, 1.0);
    CHECK(k4 == doctest::Approx(6.158883).epsilon(1e-6));
    const double k1 = expected_sojourn(1, 2 * std::log(2.0), 0.5, 1.0);
    CHECK(k4 - k1 == doctest::Approx(std::log(4.0) / 0.5).epsilon(1e-12));
    CHECK_THROWS_AS(expected_sojourn(1, 1.0, 0.5, 0.5), DomainError);
}

TEST_CASE("capacity allocation by means") {
    const std::vector<double> equal{1.0, 1.0};
    const auto a = allocate_capacity_mean(equal, 2.0);
    CHECK(a.values[0] == doctest::Approx(1.0));
    CHECK(a.values[1] == doctest::Approx(1.0));
    const std::vector<double> means{1.0, 2.0};
    const auto b = allocate_capacity_mean(means, 3.0);
    CHECK(b.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.values[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.values[0] + b.values[1] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(allocate_capacity_mean(std::vector<double>{1.0, -1.0}, 1.0), DomainError);

    // for exponential servers the mean rule equalizes every scaled service
    // parameter: c_i = upsilon / mu_i gives rho_{S_i/c_i} = ln(u/(u-t))/t
    const std::vector<double> mus{0.5, 1.0, 2.0};
    std::vector<double> inv_means;
    for (double mu : mus) inv_means.push_back(1.0 / mu);
    const auto alloc = allocate_capacity_mean(inv_means, 4.0);
    const double upsilon = 4.0 / (1 / 0.5 + 1.0 + 0.5);
    std::vector<double> rhos;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const auto scaled = scale_capacity(make_exponential(mus[i], Role::ServiceTime),
                                           alloc.values[i]);
        rhos.push_back(rho_service(scaled, 0.4 * upsilon));
    }
    CHECK(rhos[0] == doctest::Approx(rhos[1]).epsilon(1e-12));
    CHECK(rhos[1] == doctest::Approx(rhos[2]).epsilon(1e-12));
}

TEST_CASE("capacity allocation by tail decay") {
    SUBCASE("quadratic root") {
        const std::vector<MomentPair> one{{1.0, 1.0}};
        const auto a = allocate_capacity_tail(one, {2.0, 0.0}, 1.0);
        CHECK(a.values[0] == doctest::Approx(1.0 / (std::sqrt(5.0) - 1.0)).epsilon(1e-12));
        CHECK(a.values[0] == doctest::Approx(0.80902).epsilon(1e-5));
    }
    SUBCASE("zero variance degenerates to eta / R") {
        const std::vector<MomentPair> one{{1.5, 0.0}};
        const auto a = allocate_capacity_tail(one, {2.0, 0.0}, 1.0);
        CHECK(a.values[0] == doctest::Approx(1.5 / 2.0).epsilon(1e-12));
    }
    SUBCASE("identical servers get identical capacity, residual matches") {
        const std::vector<MomentPair> servers{{1.0, 0.5}, {1.0, 0.5}, {0.7, 0.2}};
        const MomentPair arrival{2.0, 0.4};
        const double theta = 0.8;
        const auto a = allocate_capacity_tail(servers, arrival, theta);
        CHECK(a.values[0] == doctest::Approx(a.values[1]).epsilon(1e-14));
        const double target = arrival.mean - 0.5 * theta * arrival.variance;
        for (std::size_t i = 0; i < servers.size(); ++i) {
            const double c = a.values[i];
            CHECK(servers[i].mean / c + 0.5 * theta * servers[i].variance / (c * c) ==
                  doctest::Approx(target).epsilon(1e-10));
        }
    }
    SUBCASE("infeasible arrival envelope") {
        const std::vector<MomentPair> one{{1.0, 0.1}};
        CHECK_THROWS_AS(allocate_capacity_tail(one, {0.5, 2.0}, 1.0), InfeasibleError);
    }
}

TEST_CASE("arrival split by utilization") {
    const std::vector<double> homo{1.0, 1.0};
    const auto a = split_rates_mean(homo, 0.8);
    CHECK(a.values[0] == doctest::Approx(0.4));
    CHECK(a.values[1] == doctest::Approx(0.4));
    const std::vector<double> mus{1.0, 0.5};
    const auto b = split_rates_mean(mus, 0.6);
    CHECK(b.values[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(b.values[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(b.values[0] / mus[0] == doctest::Approx(b.values[1] / mus[1]).epsilon(1e-12));
    CHECK_THROWS_AS(split_rates_mean(mus, 1.5), InfeasibleError);
}

TEST_CASE("arrival split by tail decay") {
    const std::vector<double> mus{1.0, 0.5};
    const auto a = split_rates_tail(mus, 0.8);
    CHECK(a.values[0] == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(a.values[1] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(mus[0] - a.values[0] == doctest::Approx(mus[1] - a.values[1]).epsilon(1e-12));

    const std::vector<double> skewed{1.0, 0.2};
    const auto b = split_rates_tail(skewed, 0.3);
    CHECK(b.excluded.count(1) == 1);
    CHECK(b.values[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(b.values[1] == 0.0);

    const std::vector<double> homo{0.9, 0.9, 0.9};
    const auto tail = split_rates_tail(homo, 1.2);
    const auto mean = split_rates_mean(homo, 1.2);
    for (std::size_t i = 0; i < homo.size(); ++i)
        CHECK(tail.values[i] == doctest::Approx(mean.values[i]).epsilon(1e-12));
}
