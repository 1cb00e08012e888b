#include <cmath>
#include <doctest.h>

#include "forkbound/bound_engine.hpp"
#include "forkbound/multistage.hpp"
#include "forkbound/numerics.hpp"

using namespace forkbound;

namespace {
const auto kArr = make_exponential(0.7, Role::InterArrival);
const auto kSvc = make_exponential(1.0, Role::ServiceTime);
}  // namespace

TEST_CASE("samplepath profile") {
    SUBCASE("closed form at the origin") {
        StageSpec stage = make_union_stage(1, make_exponential(2.0, Role::ServiceTime), 1.0);
        const auto p = samplepath_profile(stage, 1.0, std::nullopt);
        CHECK(p(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("one-step horizon is a single shifted term") {
        StageSpec stage = make_union_stage(3, kSvc, 0.5);
        const auto p = samplepath_profile(stage, 0.3, 1L);
        for (double tau : {0.0, 1.0, 4.0})
            CHECK(p(tau) == doctest::Approx(stage.stage_profile(tau + 0.3)).epsilon(1e-12));
    }
    SUBCASE("closed form dominates every finite horizon") {
        StageSpec stage = make_union_stage(2, kSvc, 0.5);
        const auto closed = samplepath_profile(stage, 0.2, std::nullopt);
        CHECK(closed(10.0) == doctest::Approx(2 * std::exp(-5.0) / 0.1).epsilon(1e-12));
        CHECK(closed(10.0) == doctest::Approx(0.13476).epsilon(1e-4));
        for (long m : {1L, 20L, 200L}) {
            const auto finite = samplepath_profile(stage, 0.2, m);
            for (double tau : {0.0, 2.0, 10.0}) CHECK(finite(tau) <= closed(tau) + 1e-12);
        }
    }
    StageSpec stage = make_union_stage(2, kSvc, 0.5);
    CHECK_THROWS_AS(samplepath_profile(stage, 0.0, std::nullopt), DomainError);
}

TEST_CASE("end-to-end quantile") {
    SUBCASE("single stage pays the sample-path overhead over the direct bound") {
        const NetworkSpec net = make_network(1, 2, kArr, kSvc);
        const double e2e = e2e_sojourn_quantile(net, 1e-3);
        const ServerSpec server = gi_server(kArr, kSvc);
        const double theta = optimize_theta(server, QuantileAt{1e-3, 2});
        const std::vector<ServerSpec> servers(2, server);
        const std::vector<double> thetas(2, theta);
        const double direct = quantile(sojourn_bound(servers, thetas), 1e-3);
        CHECK(e2e >= direct);
    }
    SUBCASE("growth with h is superlinear once the additive terms wash out") {
        NetworkSpec net = make_network(32, 2, kArr, kSvc);
        const double q32 = e2e_sojourn_quantile_fixed(net, 1e-3);
        net.h = 64;
        const double q64 = e2e_sojourn_quantile_fixed(net, 1e-3);
        CHECK(q64 > 2 * q32);
    }
    SUBCASE("finite and increasing in h under optimization") {
        NetworkSpec net = make_network(4, 2, kArr, kSvc);
        const double q4 = e2e_sojourn_quantile(net, 1e-3);
        CHECK(std::isfinite(q4));
        CHECK(q4 > 0);
        net.h = 8;
        const double q8 = e2e_sojourn_quantile(net, 1e-3);
        CHECK(q8 > q4);
    }
    SUBCASE("doubling k costs at most h ln(2) / theta_S at fixed parameters") {
        NetworkSpec net = make_network(4, 2, kArr, kSvc);
        const double q_k2 = e2e_sojourn_quantile_fixed(net, 1e-3);
        NetworkSpec net4 = net;
        net4.k = 4;
        const double q_k4 = e2e_sojourn_quantile_fixed(net4, 1e-3);
        CHECK(q_k4 - q_k2 ==
              doctest::Approx(net.h * std::log(2.0) / net.defaults.theta_s).epsilon(1e-9));
    }
    SUBCASE("optimizer never loses to the midpoint defaults") {
        const NetworkSpec net = make_network(4, 2, kArr, kSvc);
        CHECK(e2e_sojourn_quantile(net, 1e-3) <=
              e2e_sojourn_quantile_fixed(net, 1e-3) + 1e-9);
    }
    SUBCASE("infeasible when the stage is overloaded") {
        CHECK_THROWS_AS(make_network(2, 2, make_exponential(1.1, Role::InterArrival), kSvc),
                        InfeasibleError);
    }
}

TEST_CASE("scaling curve") {
    const NetworkSpec base = make_network(1, 2, kArr, kSvc);
    const std::vector<int> hs{1, 2, 4, 8, 16};
    const ScalingCurve fixed = scaling_curve(base, hs, 1e-3, false);
    CHECK(fixed.points.size() == hs.size());
    CHECK(fixed.r_squared > 0.99);
    for (std::size_t i = 1; i < fixed.points.size(); ++i)
        CHECK(fixed.points[i].quantile > fixed.points[i - 1].quantile);

    // first row consistency with the plain evaluation
    NetworkSpec h1 = base;
    h1.h = 1;
    CHECK(fixed.points.front().quantile ==
          doctest::Approx(e2e_sojourn_quantile_fixed(h1, 1e-3)).epsilon(1e-12));

    const ScalingCurve opt = scaling_curve(base, std::vector<int>{1, 2}, 1e-3, true);
    CHECK(opt.points.front().quantile ==
          doctest::Approx(e2e_sojourn_quantile(h1, 1e-3)).epsilon(1e-9));
}
