#include <cmath>
#include <doctest.h>

#include "forkbound/distributions.hpp"
#include "forkbound/numerics.hpp"
#include "forkbound/sigma_rho.hpp"

using namespace forkbound;

namespace {
const auto kArrival = Role::InterArrival;
const auto kService = Role::ServiceTime;
}  // namespace

TEST_CASE("mgf closed forms") {
    CHECK(mgf(make_exponential(1.0, kService), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mgf(make_deterministic(2.0, kService), 0.5) ==
          doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(mgf(make_exponential(1.0, kService), 0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(mgf(make_gaussian(1.0, 0.25, kService), 0.8) ==
          doctest::Approx(std::exp(0.8 + 0.5 * 0.64 * 0.25)).epsilon(1e-15));
    CHECK(mgf(make_erlang(3, 2.0, kService), 0.5) ==
          doctest::Approx(std::pow(2.0 / 1.5, 3)).epsilon(1e-15));

    CHECK(mgf(make_exponential(1.0, kService), -3.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(mgf(make_exponential(1.0, kService), 1.0), DomainError);
    CHECK_THROWS_AS(mgf(make_exponential(1.0, kService), 1.0 - 1e-10), DomainError);
    CHECK_THROWS_AS(mgf(make_erlang(2, 1.0, kService), 1.0), DomainError);
}

TEST_CASE("mgf equals one at zero for every law") {
    for (Role role : {kArrival, kService}) {
        for (const auto& d :
             {make_exponential(0.7, role), make_deterministic(1.25, role),
              make_gaussian(1.0, 0.25, role), make_erlang(4, 3.0, role)}) {
            CHECK(mgf(d, 0.0) == 1.0);
        }
    }
}

TEST_CASE("rho_arrival") {
    CHECK(rho_arrival(make_exponential(1.0, kArrival), 1e-8) ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rho_arrival(make_exponential(0.7, kArrival), 0.3) ==
          doctest::Approx(std::log(10.0 / 7.0) / 0.3).epsilon(1e-14));
    CHECK(rho_arrival(make_exponential(0.7, kArrival), 0.3) ==
          doctest::Approx(1.18892).epsilon(1e-5));
    for (double theta : {0.1, 1.0, 7.0})
        CHECK(rho_arrival(make_deterministic(1.25, kArrival), theta) ==
              doctest::Approx(1.25).epsilon(1e-14));
    CHECK_THROWS_AS(rho_arrival(make_exponential(1.0, kService), 0.5), DomainError);
    CHECK_THROWS_AS(rho_arrival(make_exponential(1.0, kArrival), 0.0), DomainError);
}

TEST_CASE("rho_service") {
    CHECK(rho_service(make_exponential(1.0, kService), 0.5) ==
          doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
    CHECK(rho_service(make_gaussian(1.0, 0.25, kService), 0.8) ==
          doctest::Approx(1.1).epsilon(1e-14));
    for (const auto& d : {make_exponential(2.0, kService), make_deterministic(0.5, kService),
                          make_gaussian(0.8, 0.09, kService), make_erlang(3, 4.0, kService)})
        CHECK(rho_service(d, 1e-8) == doctest::Approx(mean_of(d)).epsilon(1e-6));
    CHECK_THROWS_AS(rho_service(make_exponential(1.0, kService), 1.5), DomainError);
    CHECK_THROWS_AS(rho_service(make_exponential(1.0, kArrival), 0.5), DomainError);
}

TEST_CASE("rho monotonicity on a grid") {
    std::vector<double> grid;
    for (double t = 0.02; t < 0.96; t += 0.02) grid.push_back(t);
    for (const auto& d : {make_exponential(0.7, kArrival), make_deterministic(1.0, kArrival),
                          make_gaussian(1.2, 0.1, kArrival), make_erlang(2, 1.5, kArrival)})
        CHECK(rho_monotone_on_grid(arrival_sigma_rho(d), grid));
    for (const auto& d : {make_exponential(1.0, kService), make_deterministic(0.7, kService),
                          make_gaussian(1.0, 0.2, kService), make_erlang(3, 4.0, kService)})
        CHECK(rho_monotone_on_grid(service_sigma_rho(d), grid));
}

TEST_CASE("scale_capacity closed forms and mgf identity") {
    const auto exp2 = scale_capacity(make_exponential(1.0, kService), 2.0);
    CHECK(std::get<Exponential>(exp2.law).rate == doctest::Approx(2.0));
    const auto det = scale_capacity(make_deterministic(3.0, kService), 1.5);
    CHECK(std::get<Deterministic>(det.law).value == doctest::Approx(2.0));
    const auto g = scale_capacity(make_gaussian(1.0, 1.0, kService), 2.0);
    CHECK(std::get<Gaussian>(g.law).mean == doctest::Approx(0.5));
    CHECK(std::get<Gaussian>(g.law).variance == doctest::Approx(0.25));
    CHECK_THROWS_AS(scale_capacity(make_exponential(1.0, kService), 0.0), DomainError);

    CounterRng rng(99);
    const auto laws = {make_exponential(1.3, kService), make_deterministic(0.8, kService),
                       make_gaussian(1.0, 0.3, kService), make_erlang(2, 2.0, kService)};
    int trials = 0;
    for (const auto& base : laws) {
        for (int i = 0; i < 25; ++i, ++trials) {
            const double c = 0.5 + 2 * rng.next_uniform();
            const double theta = 0.1 + 0.5 * rng.next_uniform();
            CHECK(mgf(scale_capacity(base, c), theta) ==
                  doctest::Approx(mgf(base, theta / c)).epsilon(1e-12));
        }
    }
    CHECK(trials == 100);
}

TEST_CASE("thin_random") {
    const auto arr = make_exponential(4.0, kArrival);
    SUBCASE("no thinning recovers rho_arrival") {
        for (const auto& d : {make_exponential(1.0, kArrival), make_erlang(2, 3.0, kArrival)})
            for (double theta : {0.1, 0.3, 0.8})
                CHECK(thin_random(d, 1.0, theta) ==
                      doctest::Approx(rho_arrival(d, theta)).epsilon(1e-12));
    }
    SUBCASE("thinned exponential has rate p*lambda") {
        CHECK(thin_random(arr, 0.2, 0.2) == doctest::Approx(5 * std::log(5.0 / 4.0)).epsilon(1e-13));
        // same value through the explicit thinned law
        CHECK(thin_random(arr, 0.2, 0.2) ==
              doctest::Approx(rho_arrival(make_exponential(0.8, kArrival), 0.2)).epsilon(1e-12));
    }
    SUBCASE("thinning slows the process") {
        const auto one = make_exponential(1.0, kArrival);
        CHECK(thin_random(one, 0.5, 0.3) > rho_arrival(one, 0.3));
    }
    CHECK_THROWS_AS(thin_random(arr, 0.0, 0.3), DomainError);
    CHECK_THROWS_AS(thin_random(arr, 1.2, 0.3), DomainError);
    // Gaussian arrivals break the geometric condition at large theta
    const auto gauss = make_gaussian(1.0, 1.0, kArrival);
    CHECK_THROWS_AS(thin_random(gauss, 0.5, 50.0), DomainError);
}

TEST_CASE("thin_deterministic") {
    const auto arr = make_exponential(4.0, kArrival);
    CHECK(thin_deterministic(arr, 1, 0.3) == doctest::Approx(rho_arrival(arr, 0.3)));
    CHECK(thin_deterministic(arr, 5, 0.2) ==
          doctest::Approx(25 * std::log(21.0 / 20.0)).epsilon(1e-13));
    CHECK_THROWS_AS(thin_deterministic(arr, 0, 0.3), DomainError);

    // dominance over random thinning with p = 1/k
    const auto one = make_exponential(1.0, kArrival);
    for (int k = 2; k <= 10; ++k)
        for (double theta = 0.05; theta < 2.0; theta += 0.07)
            CHECK(thin_deterministic(one, k, theta) >= thin_random(one, 1.0 / k, theta) - 1e-12);
}

TEST_CASE("split_merge_rho") {
    const auto svc = make_exponential(1.0, kService);
    std::vector<DistributionSpec> single{svc};
    CHECK(split_merge_rho(single, 0.5) == doctest::Approx(rho_service(svc, 0.5)).epsilon(1e-14));
    std::vector<DistributionSpec> two{svc, svc};
    CHECK(split_merge_rho(two, 0.5) == doctest::Approx(2 * std::log(4.0)).epsilon(1e-14));
    // k iid copies add exactly ln(k)/theta over one copy
    for (int k : {2, 3, 7}) {
        std::vector<DistributionSpec> many(k, svc);
        CHECK(split_merge_rho(many, 0.5) ==
              doctest::Approx(rho_service(svc, 0.5) + std::log(double(k)) / 0.5).epsilon(1e-12));
    }
}

TEST_CASE("sampling") {
    SUBCASE("deterministic draw") {
        CounterRng rng(1);
        const auto det = make_deterministic(1.25, kService);
        for (int i = 0; i < 10; ++i) CHECK(sample(det, rng) == 1.25);
    }
    SUBCASE("exponential sample mean, 1e7 draws") {
        CounterRng rng(2);
        const auto d = make_exponential(1.0, kService);
        double sum = 0;
        const std::size_t n = 10000000;
        for (std::size_t i = 0; i < n; ++i) sum += sample(d, rng);
        CHECK(sum / static_cast<double>(n) == doctest::Approx(1.0).epsilon(0.002));
    }
    SUBCASE("erlang equals the sum of exponentials from the same stream") {
        CounterRng a(3), b(3);
        const auto erl = make_erlang(3, 1.0, kService);
        const auto e1 = make_exponential(1.0, kService);
        for (int i = 0; i < 50; ++i) {
            const double direct = sample(erl, a);
            const double summed = sample(e1, b) + sample(e1, b) + sample(e1, b);
            CHECK(direct == doctest::Approx(summed).epsilon(1e-15));
        }
    }
    SUBCASE("gaussian draws are clipped at zero") {
        CounterRng rng(4);
        const auto g = make_gaussian(0.1, 4.0, kService);
        double lowest = 1e300;
        for (int i = 0; i < 20000; ++i) lowest = std::min(lowest, sample(g, rng));
        CHECK(lowest == 0.0);
    }
    SUBCASE("inverse-cdf coupling matches the direct samplers") {
        CounterRng rng(5);
        const auto e = make_exponential(2.0, kService);
        for (int i = 0; i < 20; ++i) {
            const double u = rng.next_uniform();
            CHECK(sample_from_uniform(e, u) == doctest::Approx(-std::log(1 - u) / 2.0));
        }
        // erlang quantile: cdf(quantile(u)) == u
        const auto erl = make_erlang(4, 2.0, kService);
        for (double u : {0.1, 0.5, 0.9, 0.999}) {
            const double x = sample_from_uniform(erl, u);
            CHECK(erlang_cdf(4, 2.0, x) == doctest::Approx(u).epsilon(1e-9));
        }
    }
}

TEST_CASE("monte carlo mgf agreement, 1e6 draws") {
    const std::size_t n = 1000000;
    // low-mass-below-zero gaussian keeps the sampler clipping negligible
    for (const auto& d : {make_exponential(1.3, kService), make_deterministic(0.8, kService),
                          make_gaussian(1.0, 0.04, kService), make_erlang(3, 2.0, kService)}) {
        const double sup = mgf_theta_sup(d);
        for (double frac : {0.15, 0.35}) {
            const double theta = std::isfinite(sup) ? frac * sup : frac;
            CounterRng rng(77);
            long double sum = 0, sum_sq = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const long double v = std::exp(theta * sample(d, rng));
                sum += v;
                sum_sq += v * v;
            }
            const double mean = static_cast<double>(sum / n);
            const double se = std::sqrt(
                std::max(0.0, static_cast<double>(sum_sq / n) - mean * mean) / n);
            CHECK(std::abs(mean - mgf(d, theta)) <= 3 * se + 1e-12);
        }
    }
}

TEST_CASE("distribution literals") {
    const auto e = parse_distribution("exp:mu=1", kService);
    CHECK(std::get<Exponential>(e.law).rate == 1.0);
    CHECK(e.role == kService);
    const auto l = parse_distribution("exp:lambda=0.7", kArrival);
    CHECK(std::get<Exponential>(l.law).rate == doctest::Approx(0.7));
    const auto d = parse_distribution("det:d=1.25", kArrival);
    CHECK(std::get<Deterministic>(d.law).value == doctest::Approx(1.25));
    const auto g = parse_distribution("gauss:mean=1,var=0.25", kService);
    CHECK(std::get<Gaussian>(g.law).mean == 1.0);
    CHECK(std::get<Gaussian>(g.law).variance == doctest::Approx(0.25));
    const auto er = parse_distribution("erlang:k=3,lambda=1", kArrival);
    CHECK(std::get<ErlangK>(er.law).shape == 3);
    CHECK(std::get<ErlangK>(er.law).rate == 1.0);

    CHECK_THROWS_AS(parse_distribution("weibull:k=2", kService), ParseError);
    CHECK_THROWS_AS(parse_distribution("exp:mu=1,lambda=2", kService), ParseError);
    CHECK_THROWS_AS(parse_distribution("exp:mu=-1", kService), ParseError);
    CHECK_THROWS_AS(parse_distribution("det:d=abc", kService), ParseError);
    CHECK_THROWS_AS(parse_distribution("gauss:mean=1", kService), ParseError);
    CHECK_THROWS_AS(parse_distribution("erlang:k=2.5,lambda=1", kService), ParseError);

    // round trip
    for (const auto& text : {"exp:mu=1", "det:d=1.25", "gauss:mean=1,var=0.25",
                             "erlang:k=3,lambda=1"})
        CHECK(to_string(parse_distribution(text, kService)) == text);
}
