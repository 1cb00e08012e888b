#include "forkbound/figures.hpp"

#include <cmath>

#include "forkbound/bound_engine.hpp"
#include "forkbound/envelope.hpp"
#include "forkbound/numerics.hpp"

namespace forkbound {

namespace {

TailBound homogeneous_bound(const ServerSpec& server, int k, double theta) {
    const std::vector<ServerSpec> servers(static_cast<std::size_t>(k), server);
    const std::vector<double> thetas(static_cast<std::size_t>(k), theta);
    return sojourn_bound(servers, thetas);
}

double gi_quantile(const ServerSpec& server, int k, double eps) {
    const double theta = optimize_theta(server, QuantileAt{eps, k});
    return quantile(homogeneous_bound(server, k, theta), eps);
}

double gi_mean(const ServerSpec& server, int k) {
    const double theta = optimize_theta(server, MeanSojourn{k});
    return expected_sojourn(k, server.service.rho_at(theta), theta, gg_alpha(server, theta));
}

CsvTable fig2() {
    CsvTable t{"fig2",
               {"single M|M|1 server, mu=1",
                "gi_bound uses theta = mu - lambda; gg_theta is optimized per tau"},
               {"lambda", "tau", "exact", "gi_bound", "gg_bound", "gg_theta"},
               {}};
    const double mu = 1.0;
    for (double lambda : {0.3, 0.7}) {
        const auto arr = make_exponential(lambda, Role::InterArrival);
        const auto svc = make_exponential(mu, Role::ServiceTime);
        const ServerSpec gi = gi_server(arr, svc);
        const ServerSpec gg = gg_server(arr, svc);
        const double theta_gi = mu - lambda;
        const TailBound gi_tail = homogeneous_bound(gi, 1, theta_gi);
        for (double tau = 0; tau <= 30.0 + 1e-12; tau += 0.5) {
            const double theta_gg = optimize_theta(gg, TailAt{tau, 1});
            const double gg_val = homogeneous_bound(gg, 1, theta_gg).eval(tau);
            t.rows.push_back({lambda, tau, std::exp(-(mu - lambda) * tau), gi_tail.eval(tau),
                              gg_val, theta_gg});
        }
    }
    return t;
}

CsvTable fig3() {
    CsvTable t{"fig3",
               {"fork-join with k homogeneous M|M|1 servers, mu=1, eps=1e-06"},
               {"lambda", "k", "mean_bound", "quantile"},
               {}};
    const double eps = 1e-6;
    for (double lambda : {0.3, 0.5, 0.7}) {
        const ServerSpec server = gi_server(make_exponential(lambda, Role::InterArrival),
                                            make_exponential(1.0, Role::ServiceTime));
        for (int k = 1; k <= 16; ++k)
            t.rows.push_back({lambda, static_cast<double>(k), gi_mean(server, k),
                              gi_quantile(server, k, eps)});
    }
    return t;
}

CsvTable fig4() {
    CsvTable t{"fig4",
               {"thinning over k parallel M|M|1 servers, lambda=4, mu=1, eps=0.001",
                "round-robin (det) vs Bernoulli p=1/k (rand)"},
               {"k", "det_quantile", "rand_quantile", "det_mean", "rand_mean"},
               {}};
    const double eps = 1e-3;
    const auto arr = make_exponential(4.0, Role::InterArrival);
    const auto svc = make_exponential(1.0, Role::ServiceTime);
    for (int k = 5; k <= 30; ++k) {
        const ServerSpec det{thinned_arrival_deterministic(arr, k), service_sigma_rho(svc), true};
        const ServerSpec rnd{thinned_arrival_random(arr, 1.0 / k), service_sigma_rho(svc), true};
        t.rows.push_back({static_cast<double>(k), gi_quantile(det, k, eps),
                          gi_quantile(rnd, k, eps), gi_mean(det, k), gi_mean(rnd, k)});
    }
    return t;
}

CsvTable fig5() {
    CsvTable t{"fig5",
               {"two M|M|1 servers with split arrivals, mu1=1, eps=1e-06",
                "strategy1 equalizes utilization, strategy2 the tail decay;",
                "single routes everything to server 1"},
               {"lambda", "mu2", "strategy1_quantile", "strategy2_quantile", "single_quantile"},
               {}};
    const double eps = 1e-6;
    const auto svc_rate = [](double mu) { return make_exponential(mu, Role::ServiceTime); };

    const auto split_quantile = [&](const Allocation& alloc, std::span<const double> mus) {
        std::vector<ServerSpec> servers;
        std::vector<double> thetas;
        for (std::size_t i = 0; i < mus.size(); ++i) {
            if (alloc.values[i] <= 0) continue;  // excluded server receives no jobs
            servers.push_back(gi_server(make_exponential(alloc.values[i], Role::InterArrival),
                                        svc_rate(mus[i])));
            thetas.push_back(optimize_theta(servers.back(), QuantileAt{eps, 1}));
        }
        return quantile(sojourn_bound(servers, thetas), eps);
    };

    for (double lambda : {0.4, 0.8}) {
        const ServerSpec single = gi_server(make_exponential(lambda, Role::InterArrival),
                                            svc_rate(1.0));
        const double single_q = gi_quantile(single, 1, eps);
        for (double mu2 = 0.5; mu2 <= 1.0 + 1e-12; mu2 += 0.025) {
            const std::vector<double> mus{1.0, mu2};
            t.rows.push_back({lambda, mu2, split_quantile(split_rates_mean(mus, lambda), mus),
                              split_quantile(split_rates_tail(mus, lambda), mus), single_q});
        }
    }
    return t;
}

std::vector<CsvTable> fig6() {
    const double rho_a = 1.25;
    const auto arr = make_deterministic(rho_a, Role::InterArrival);
    const auto svc = make_exponential(1.0, Role::ServiceTime);
    // largest decay with rho_S(theta) <= rho_A
    const double theta = admissible_theta_sup(gi_server(arr, svc));
    const double rho_s = rho_service(svc, theta);
    const Envelope arr_env = envelope_from_iid(arr, theta);
    const auto per_server = [theta](double tau) { return std::exp(-theta * std::max(tau, 0.0)); };

    CsvTable a{"fig6a",
               {"(k,l) fork-join tail, deterministic arrivals rho_A=1.25, mu=1",
                "theta_S = " + format_double(theta)},
               {"tau", "eps_k10_l10", "eps_k15_l10"},
               {}};
    const auto p10 = forkjoin_stage_profile(10, per_server, true, 10);
    const auto p15 = forkjoin_stage_profile(15, per_server, true, 10);
    for (double tau = 0; tau <= 80.0 + 1e-12; tau += 1.0)
        a.rows.push_back({tau, envelope_tail(arr_env, p10, rho_s, tau),
                          envelope_tail(arr_env, p15, rho_s, tau)});

    CsvTable b{"fig6b",
               {"(k,l) fork-join quantiles at eps=1e-06, same system",
                "theta_S = " + format_double(theta)},
               {"l", "quantile_k_eq_l", "quantile_k_eq_l_plus5"},
               {}};
    const double eps = 1e-6;
    for (int l = 1; l <= 15; ++l) {
        const auto q = [&](int k) {
            const Envelope stage{EnvDirection::Service, rho_s,
                                 forkjoin_stage_profile(k, per_server, true, l)};
            return sojourn_bound_envelopes(arr_env, stage, eps);
        };
        b.rows.push_back({static_cast<double>(l), q(l), q(l + 5)});
    }
    return {a, b};
}

CsvTable fig7() {
    CsvTable t{"fig7",
               {"two latency-rate servers, rho_S=1, exponential arrivals lambda=0.7, eps=1e-06"},
               {"kappa", "single", "thinned", "redundant_21"},
               {}};
    for (double log_kappa = -2.0; log_kappa <= 3.0 + 1e-12; log_kappa += 0.1) {
        const double kappa = std::pow(10.0, log_kappa);
        const auto q = latency_rate_strategies(0.7, kappa, 1e-6);
        t.rows.push_back({kappa, q.single, q.thinned, q.redundant_21});
    }
    return t;
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

std::vector<CsvTable> make_figure(const std::string& name) {
    if (name == "fig2") return {fig2()};
    if (name == "fig3") return {fig3()};
    if (name == "fig4") return {fig4()};
    if (name == "fig5") return {fig5()};
    if (name == "fig6") return fig6();
    if (name == "fig7") return {fig7()};
    throw ParseError("unknown figure '" + name + "'");
}

}  // namespace forkbound
