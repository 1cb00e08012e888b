#include "forkbound/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "forkbound/bound_engine.hpp"
#include "forkbound/envelope.hpp"
#include "forkbound/multistage.hpp"
#include "forkbound/numerics.hpp"
#include "forkbound/simulator.hpp"

namespace forkbound {

std::vector<double> naive_departures(std::span<const double> arrivals,
                                     std::span<const double> services) {
    if (arrivals.size() != services.size())
        throw ShapeError("naive_departures: length mismatch");
    std::vector<double> out(arrivals.size());
    for (std::size_t n = 0; n < arrivals.size(); ++n) {
        double best = -kInfinity;
        for (std::size_t v = 0; v <= n; ++v) {
            double cum = 0;
            for (std::size_t j = v; j <= n; ++j) cum += services[j];
            best = std::max(best, arrivals[v] + cum);
        }
        out[n] = best;
    }
    return out;
}

namespace {

struct Suite {
    std::vector<CheckResult> results;
    void check(const std::string& name, bool pass, const std::string& detail = "") {
        results.push_back({name, pass, detail});
    }
    void run(const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool pass;
        try {
            pass = body(detail);
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("exception: ") + e.what();
        }
        results.push_back({name, pass, detail});
    }
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<DistributionSpec> sample_laws(Role role) {
    return {make_exponential(1.3, role), make_deterministic(0.8, role),
            make_gaussian(1.0, 0.04, role), make_erlang(3, 2.0, role)};
}

// --- stochastic model checks -------------------------------------------------

void model_checks(Suite& s) {
    s.run("mgf-at-zero", [](std::string&) {
        for (Role role : {Role::InterArrival, Role::ServiceTime})
            for (const auto& d : sample_laws(role))
                if (std::abs(mgf(d, 0.0) - 1.0) > 0) return false;
        return true;
    });

    s.run("rho-monotone-on-grid", [](std::string&) {
        std::vector<double> grid;
        for (double t = 0.05; t <= 0.95; t += 0.05) grid.push_back(t);
        for (const auto& d : sample_laws(Role::InterArrival))
            if (!rho_monotone_on_grid(arrival_sigma_rho(d), grid)) return false;
        for (const auto& d : sample_laws(Role::ServiceTime))
            if (!rho_monotone_on_grid(service_sigma_rho(d), grid)) return false;
        return true;
    });

    s.run("scale-capacity-mgf-identity", [](std::string& detail) {
        CounterRng rng(7, 0, 0);
        const auto laws = sample_laws(Role::ServiceTime);
        for (int trial = 0; trial < 100; ++trial) {
            const auto& base = laws[trial % laws.size()];
            const double c = 0.5 + 2.0 * rng.next_uniform();
            const double theta = 0.1 + 0.6 * rng.next_uniform();  // theta/c stays in-domain
            const double lhs = mgf(scale_capacity(base, c), theta);
            const double rhs = mgf(base, theta / c);
            if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs))) {
                detail = "law " + to_string(base) + " c=" + fmt(c) + " theta=" + fmt(theta);
                return false;
            }
        }
        return true;
    });

    s.run("thin-random-p1-identity", [](std::string&) {
        for (const auto& d : sample_laws(Role::InterArrival))
            for (double theta : {0.1, 0.4, 0.9})
                if (std::abs(thin_random(d, 1.0, theta) - rho_arrival(d, theta)) > 1e-12)
                    return false;
        return true;
    });

    s.run("monte-carlo-mgf", [](std::string& detail) {
        const std::size_t n = 1000000;
        for (const auto& d : sample_laws(Role::ServiceTime)) {
            const double sup = mgf_theta_sup(d);
            for (double frac : {0.15, 0.35}) {
                const double theta = std::isfinite(sup) ? frac * sup : frac;
                CounterRng rng(11, 0, 0);
                long double sum = 0, sum_sq = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const long double v = std::exp(theta * sample(d, rng));
                    sum += v;
                    sum_sq += v * v;
                }
                const double mean = static_cast<double>(sum / n);
                const double var =
                    std::max(0.0, static_cast<double>(sum_sq / n) - mean * mean);
                const double se = std::sqrt(var / n);
                const double want = mgf(d, theta);
                if (std::abs(mean - want) > 3 * se + 1e-12) {
                    detail = to_string(d) + " theta=" + fmt(theta) + " mean=" + fmt(mean) +
                             " mgf=" + fmt(want) + " se=" + fmt(se);
                    return false;
                }
            }
        }
        return true;
    });

    s.run("deterministic-thinning-dominance", [](std::string& detail) {
        const auto arr = make_exponential(1.0, Role::InterArrival);
        for (int k = 2; k <= 10; ++k) {
            for (double theta = 0.05; theta <= 2.0; theta += 0.05) {
                const double det = thin_deterministic(arr, k, theta);
                const double rnd = thin_random(arr, 1.0 / k, theta);
                if (det < rnd - 1e-12) {
                    detail = "k=" + std::to_string(k) + " theta=" + fmt(theta);
                    return false;
                }
            }
        }
        return true;
    });
}

// --- bound engine checks ------------------------------------------------------

void bound_checks(Suite& s) {
    const auto arr = make_exponential(0.7, Role::InterArrival);
    const auto svc = make_exponential(1.0, Role::ServiceTime);

    s.run("gi-gg-dominance", [&](std::string&) {
        const std::vector<ServerSpec> gi{gi_server(arr, svc)};
        const std::vector<ServerSpec> gg{gg_server(arr, svc)};
        const std::vector<double> theta{0.15};
        const TailBound b_gi = sojourn_bound(gi, theta);
        const TailBound b_gg = sojourn_bound(gg, theta);
        for (double tau = 0; tau <= 60; tau += 1.0)
            if (b_gg.eval(tau) < b_gi.eval(tau) - 1e-15) return false;
        return true;
    });

    s.run("quantile-ln-k-law", [&](std::string& detail) {
        const ServerSpec server = gi_server(arr, svc);
        const double theta = optimize_theta(server, QuantileAt{1e-6, 1});
        const std::vector<ServerSpec> one{server};
        const double q1 = quantile(sojourn_bound(one, std::vector<double>{theta}), 1e-6);
        for (int k : {2, 4, 8, 16}) {
            const std::vector<ServerSpec> servers(k, server);
            const std::vector<double> thetas(k, theta);
            const double qk = quantile(sojourn_bound(servers, thetas), 1e-6);
            if (std::abs((qk - q1) - std::log(static_cast<double>(k)) / theta) > 1e-9) {
                detail = "k=" + std::to_string(k);
                return false;
            }
        }
        return true;
    });

    s.run("tail-and-quantile-monotone", [&](std::string&) {
        const std::vector<ServerSpec> servers{gi_server(arr, svc), gg_server(arr, svc)};
        const std::vector<double> thetas{0.3, 0.15};
        const TailBound b = sojourn_bound(servers, thetas);
        double prev = kInfinity;
        for (double tau = 0; tau <= 80; tau += 0.5) {
            const double v = b.eval(tau);
            if (v > prev + 1e-15) return false;
            prev = v;
        }
        double prev_q = kInfinity;
        for (double eps = 1e-8; eps < 0.5; eps *= 10) {
            const double q = quantile(b, eps);
            if (q > prev_q + 1e-12) return false;
            prev_q = q;
        }
        return true;
    });

    s.run("mm1-decay-exactness", [&](std::string& detail) {
        const std::vector<ServerSpec> one{gi_server(arr, svc)};
        const TailBound b = sojourn_bound(one, std::vector<double>{0.3});
        for (double tau = 1.0; tau <= 40; tau += 1.0) {
            const double ratio = b.eval_unclamped(tau) / std::exp(-0.3 * tau);
            if (std::abs(ratio - 1.0 / 0.7) > 1e-12) {
                detail = "tau=" + fmt(tau) + " ratio=" + fmt(ratio);
                return false;
            }
        }
        return true;
    });

    s.run("capacity-tail-residual", [](std::string& detail) {
        CounterRng rng(13, 0, 0);
        for (int trial = 0; trial < 50; ++trial) {
            const double theta = 0.2 + rng.next_uniform();
            const MomentPair arrival{2.0 + rng.next_uniform(), 0.5 * rng.next_uniform()};
            std::vector<MomentPair> servers;
            for (int i = 0; i < 4; ++i)
                servers.push_back({0.5 + rng.next_uniform(), rng.next_uniform()});
            const double target = arrival.mean - 0.5 * theta * arrival.variance;
            const Allocation alloc = allocate_capacity_tail(servers, arrival, theta);
            for (std::size_t i = 0; i < servers.size(); ++i) {
                const double c = alloc.values[i];
                const double res = servers[i].mean / c +
                                   0.5 * theta * servers[i].variance / (c * c);
                if (std::abs(res - target) > 1e-10) {
                    detail = "trial " + std::to_string(trial);
                    return false;
                }
            }
        }
        return true;
    });

    s.run("split-tail-equalization", [](std::string&) {
        CounterRng rng(17, 0, 0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> mus;
            double total = 0;
            for (int i = 0; i < 5; ++i) {
                mus.push_back(0.2 + rng.next_uniform());
                total += mus.back();
            }
            const double lambda = total * (0.3 + 0.6 * rng.next_uniform());
            const Allocation alloc = split_rates_tail(mus, lambda);
            double level = kInfinity;
            double sum = 0;
            for (std::size_t i = 0; i < mus.size(); ++i) {
                sum += alloc.values[i];
                if (alloc.excluded.count(i)) continue;
                const double t = mus[i] - alloc.values[i];
                if (std::isfinite(level) && std::abs(t - level) > 1e-12) return false;
                level = t;
            }
            if (std::abs(sum - lambda) > 1e-9) return false;
        }
        return true;
    });
}

// --- envelope checks ----------------------------------------------------------

void envelope_checks(Suite& s, const ValidationOptions& opts) {
    s.run("kl-profile-identities", [](std::string&) {
        for (int k = 1; k <= 20; ++k) {
            for (double p = 0.0; p <= 1.0 + 1e-12; p += 0.1) {
                const double all = kl_error_profile({k, k, true}, p);
                const double one = kl_error_profile({k, 1, true}, p);
                if (std::abs(all - (1.0 - std::pow(1.0 - p, k))) > 1e-12) return false;
                if (std::abs(one - std::pow(p, k)) > 1e-12) return false;
            }
        }
        return true;
    });

    s.run("kl-profile-monotone", [](std::string&) {
        for (double p = 0.05; p < 1.0; p += 0.1) {
            for (int l = 1; l <= 20; ++l)
                for (int k = l; k < 20; ++k)
                    if (kl_error_profile({k + 1, l, true}, p) >
                        kl_error_profile({k, l, true}, p) + 1e-12)
                        return false;
            for (int k = 2; k <= 20; ++k)
                for (int l = 1; l < k; ++l)
                    if (kl_error_profile({k, l + 1, true}, p) <
                        kl_error_profile({k, l, true}, p) - 1e-12)
                        return false;
        }
        for (int k = 2; k <= 20; ++k)
            for (int l = 1; l <= k; ++l) {
                double prev = -1;
                for (int step = 0; step <= 20; ++step) {
                    const double v = kl_error_profile({k, l, true}, step / 20.0);
                    if (v < prev - 1e-12) return false;
                    prev = v;
                }
            }
        return true;
    });

    s.run("envelope-vs-theorem-route", [](std::string& detail) {
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const double theta = 0.15;
        for (double eps : {1e-3, 1e-6}) {
            const double env_q = sojourn_bound_envelopes(envelope_from_iid(arr, theta),
                                                         envelope_from_iid(svc, theta), eps);
            const double th_q =
                rho_service(svc, theta) + std::log(1.0 / eps) / theta;
            if (env_q < th_q - 1e-9) {
                detail = "eps=" + fmt(eps) + " env=" + fmt(env_q) + " th=" + fmt(th_q);
                return false;
            }
        }
        return true;
    });

    s.run("envelope-empirical-validity", [&](std::string& detail) {
        // one million independent sample paths; the envelope must hold at the
        // end of each, so binomial standard errors are honest here
        const auto arr = make_exponential(1.0, Role::InterArrival);
        const double theta = 0.5;
        const double rate = rho_arrival(arr, theta);
        const std::size_t paths = 1000000;
        const int horizon = 128;
        const std::vector<double> taus{4.0, 8.0, 12.0};
        std::vector<std::size_t> hits(taus.size(), 0);
        for (std::size_t rep = 0; rep < paths; ++rep) {
            CounterRng rng(opts.seed, 0, 3 + rep, 2);
            // R(n) = max_v { rho_A (n-v) - A(v,n) } via its forward recursion
            double r = 0;
            for (int i = 1; i < horizon; ++i)
                r = std::max(0.0, r + rate - sample(arr, rng));
            for (std::size_t t = 0; t < taus.size(); ++t) hits[t] += (r > taus[t]) ? 1 : 0;
        }
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const double p = static_cast<double>(hits[t]) / static_cast<double>(paths);
            const double se = std::sqrt(p * (1 - p) / static_cast<double>(paths));
            if (p > std::exp(-theta * taus[t]) + 3 * se) {
                detail = "tau=" + fmt(taus[t]) + " p=" + fmt(p);
                return false;
            }
        }
        return true;
    });
}

// --- multistage checks ---------------------------------------------------------

void multistage_checks(Suite& s) {
    s.run("samplepath-closed-form-dominance", [](std::string&) {
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const StageSpec stage = make_union_stage(2, svc, 0.4);
        for (double delta : {0.05, 0.2, 1.0})
            for (double tau : {0.0, 2.0, 10.0})
                for (long m : {1L, 10L, 200L}) {
                    const double closed = samplepath_profile(stage, delta, std::nullopt)(tau);
                    const double finite = samplepath_profile(stage, delta, m)(tau);
                    if (finite > closed + 1e-12) return false;
                }
        return true;
    });

    s.run("multistage-optimizer-sanity", [](std::string& detail) {
        const NetworkSpec net = make_network(4, 2, make_exponential(0.7, Role::InterArrival),
                                             make_exponential(1.0, Role::ServiceTime));
        const double fixed = e2e_sojourn_quantile_fixed(net, 1e-3);
        const double opt = e2e_sojourn_quantile(net, 1e-3);
        if (opt > fixed + 1e-9) {
            detail = "opt=" + fmt(opt) + " fixed=" + fmt(fixed);
            return false;
        }
        return true;
    });

    s.run("samplepath-beta-over-h-relation", [](std::string&) {
        // h * closed-form profile at delta = beta/h equals the h^2 k/(theta beta)
        // prefactor used by the end-to-end expression
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const int h = 4, k = 2;
        const double theta = 0.4, beta = 0.1, tau = 7.0;
        const StageSpec stage = make_union_stage(k, svc, theta);
        const double lhs = h * samplepath_profile(stage, beta / h, std::nullopt)(tau);
        const double rhs = h * h * k / (theta * beta) * std::exp(-theta * tau);
        return std::abs(lhs - rhs) <= 1e-12 * rhs;
    });
}

// --- simulator checks -----------------------------------------------------------

void simulator_checks(Suite& s, const ValidationOptions& opts) {
    s.run("fifo-oracle-equivalence", [&](std::string& detail) {
        CounterRng rng(opts.seed, 0, 0);
        for (int trial = 0; trial < 1000; ++trial) {
            const std::size_t n = 1 + (rng.next_u64() % 10);
            std::vector<double> a(n), svc(n);
            double t = 0;
            for (std::size_t i = 0; i < n; ++i) {
                t += 2.0 * rng.next_uniform();
                a[i] = t;
                svc[i] = 3.0 * rng.next_uniform();
            }
            const auto fast = serve_fifo(a, svc);
            const auto slow = naive_departures(a, svc);
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(fast[i] - slow[i]) > 1e-12) {
                    detail = "trial " + std::to_string(trial);
                    return false;
                }
        }
        return true;
    });

    s.run("supermartingale-mean-decreasing", [&](std::string& detail) {
        const auto rows = supermartingale_check(make_exponential(0.5, Role::InterArrival),
                                                make_exponential(1.0, Role::ServiceTime), 0.5, 21,
                                                100000, opts.seed);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].mean_u > rows[i - 1].mean_u + 3 * rows[i].stderr_u) {
                detail = "m=" + std::to_string(rows[i].m);
                return false;
            }
        }
        return true;
    });

    s.run("splitmerge-dominates-forkjoin", [&](std::string& detail) {
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const std::vector<DistributionSpec> svcs(3, make_exponential(1.0, Role::ServiceTime));
        for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
            const Workload w = make_workload(arr, svcs, 200, seed);
            const auto fj = sim_forkjoin(w);
            const auto sm = sim_splitmerge(w);
            for (std::size_t n = 0; n < w.n_jobs; ++n)
                if (sm.sojourns[n] < fj.sojourns[n] - 1e-12) {
                    detail = "seed " + std::to_string(seed) + " job " + std::to_string(n);
                    return false;
                }
        }
        return true;
    });

    s.run("kl-redundancy-coupling", [&](std::string&) {
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const std::vector<DistributionSpec> s3(3, make_exponential(1.0, Role::ServiceTime));
        const std::vector<DistributionSpec> s4(4, make_exponential(1.0, Role::ServiceTime));
        const Workload w3 = make_workload(arr, s3, 5000, opts.seed);
        const Workload w4 = make_workload(arr, s4, 5000, opts.seed);
        const auto r3 = sim_kl(w3, 2);
        const auto r4 = sim_kl(w4, 2);
        for (std::size_t n = 0; n < w3.n_jobs; ++n)
            if (r4.sojourns[n] > r3.sojourns[n] + 1e-12) return false;
        return true;
    });

    s.run("resequencing-departures-monotone", [&](std::string&) {
        const auto arr = make_exponential(4.0, Role::InterArrival);
        const std::vector<DistributionSpec> svcs(3, make_exponential(1.0, Role::ServiceTime));
        const auto res = sim_thinning(arr, svcs, RoundRobin{}, 20000, opts.seed);
        CounterRng rng(opts.seed, 0, 0);
        double t = 0, prev = -kInfinity;
        for (std::size_t n = 0; n < res.sojourns.size(); ++n) {
            t += sample(arr, rng);
            const double d = res.sojourns[n] + t;
            if (d < prev - 1e-9) return false;
            prev = d;
        }
        return true;
    });

    s.run("seed-determinism", [&](std::string&) {
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const std::vector<DistributionSpec> svcs(2, make_exponential(1.0, Role::ServiceTime));
        const Workload w1 = make_workload(arr, svcs, 10000, opts.seed);
        const Workload w2 = make_workload(arr, svcs, 10000, opts.seed);
        if (sim_forkjoin(w1).sojourns != sim_forkjoin(w2).sojourns) return false;
        const auto t1 = sim_thinning(arr, svcs, RoundRobin{}, 10000, opts.seed);
        const auto t2 = sim_thinning(arr, svcs, RoundRobin{}, 10000, opts.seed);
        return t1.sojourns == t2.sojourns;
    });
}

// --- simulation vs analytic bounds ----------------------------------------------

void dominance_checks(Suite& s, const ValidationOptions& opts) {
    const double scale = opts.bound_scale;
    // Exceedances of a sojourn threshold cluster along busy periods, so a
    // plain binomial half-width understates the noise of a time average badly
    // at small n. Batch means give a margin that stays honest for any --n.
    const auto batch_half = [](std::span<const double> samples, double tau) {
        constexpr std::size_t kBatches = 50;
        const std::size_t per = std::max<std::size_t>(1, samples.size() / kBatches);
        std::vector<double> fractions;
        for (std::size_t b = 0; b + 1 <= kBatches && (b + 1) * per <= samples.size(); ++b) {
            std::size_t hits = 0;
            for (std::size_t i = b * per; i < (b + 1) * per; ++i)
                hits += (samples[i] > tau) ? 1 : 0;
            fractions.push_back(static_cast<double>(hits) / static_cast<double>(per));
        }
        double mean = 0;
        for (double f : fractions) mean += f;
        mean /= static_cast<double>(fractions.size());
        double var = 0;
        for (double f : fractions) var += (f - mean) * (f - mean);
        var /= static_cast<double>(fractions.size() - 1);
        const double se_batch = std::sqrt(var / static_cast<double>(fractions.size()));
        const double se_binom =
            std::sqrt(mean * (1 - mean) / static_cast<double>(samples.size()));
        return 3 * std::max(se_batch, se_binom);
    };
    const auto check_tail = [&](const SimResult& sim, std::span<const double> taus,
                                const std::function<double(double)>& bound,
                                std::string& detail) {
        for (const auto& pt : empirical_tail(sim, taus)) {
            const double b = scale * bound(pt.tau);
            if (pt.fraction > b + batch_half(sim.steady(), pt.tau)) {
                detail = "tau=" + fmt(pt.tau) + " empirical=" + fmt(pt.fraction) +
                         " bound=" + fmt(b);
                return false;
            }
        }
        return true;
    };

    s.run("sim-vs-bound-mm1-forkjoin", [&](std::string& detail) {
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        for (int k : {1, 2}) {
            const std::vector<DistributionSpec> svcs(k, svc);
            const Workload w = make_workload(arr, svcs, opts.sim_jobs, opts.seed);
            const ServerSpec server = gi_server(arr, svc);
            const std::vector<ServerSpec> servers(k, server);
            const std::vector<double> thetas(k, 0.3);
            const TailBound bound = sojourn_bound(servers, thetas);
            const TailBound wbound = waiting_bound(servers, thetas);
            const std::vector<double> taus{5, 10, 15, 20};
            const auto sim = sim_forkjoin(w);
            if (!check_tail(sim, taus, [&](double t) { return bound.eval(t); }, detail))
                return false;
            SimResult waits;
            waits.sojourns = sim.waitings;
            waits.warmup_discard = sim.warmup_discard;
            if (!check_tail(waits, taus, [&](double t) { return wbound.eval(t); }, detail))
                return false;
        }
        return true;
    });

    s.run("sim-vs-bound-thinning", [&](std::string& detail) {
        const auto arr = make_exponential(4.0, Role::InterArrival);
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const int k = 6;
        const std::vector<DistributionSpec> svcs(k, svc);
        const std::vector<double> taus{20, 40};

        const ServerSpec det{thinned_arrival_deterministic(arr, k), service_sigma_rho(svc), true};
        const double th_det = optimize_theta(det, QuantileAt{1e-3, k});
        const TailBound b_det = sojourn_bound(std::vector<ServerSpec>(k, det),
                                              std::vector<double>(k, th_det));
        const auto sim_det = sim_thinning(arr, svcs, RoundRobin{}, opts.sim_jobs, opts.seed);
        if (!check_tail(sim_det, taus, [&](double t) { return b_det.eval(t); }, detail))
            return false;

        const ServerSpec rnd{thinned_arrival_random(arr, 1.0 / k), service_sigma_rho(svc), true};
        const double th_rnd = optimize_theta(rnd, QuantileAt{1e-3, k});
        const TailBound b_rnd = sojourn_bound(std::vector<ServerSpec>(k, rnd),
                                              std::vector<double>(k, th_rnd));
        const auto sim_rnd = sim_thinning(
            arr, svcs, RandomSplit{std::vector<double>(k, 1.0 / k)}, opts.sim_jobs, opts.seed);
        return check_tail(sim_rnd, taus, [&](double t) { return b_rnd.eval(t); }, detail);
    });

    s.run("sim-vs-bound-kl", [&](std::string& detail) {
        const auto arr = make_deterministic(1.25, Role::InterArrival);
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const int k = 15, l = 10;
        const double theta = admissible_theta_sup(gi_server(arr, svc));
        const double rho_s = rho_service(svc, theta);
        const Envelope arr_env = envelope_from_iid(arr, theta);
        const auto stage = forkjoin_stage_profile(
            k, [theta](double t) { return std::exp(-theta * std::max(t, 0.0)); }, true, l);
        const std::vector<DistributionSpec> svcs(k, svc);
        const Workload w = make_workload(arr, svcs, opts.sim_jobs, opts.seed);
        const auto sim = sim_kl(w, l);
        const std::vector<double> taus{5, 7.5, 10};
        return check_tail(
            sim, taus, [&](double t) { return envelope_tail(arr_env, stage, rho_s, t); }, detail);
    });

    s.run("sim-vs-bound-multistage", [&](std::string& detail) {
        const int h = 4, k = 2;
        const auto arr = make_exponential(0.7, Role::InterArrival);
        const auto svc = make_exponential(1.0, Role::ServiceTime);
        const NetworkSpec net = make_network(h, k, arr, svc);
        const double eps = 1e-3;
        const double q = scale * e2e_sojourn_quantile(net, eps);
        const auto sim = sim_multistage(h, k, arr, svc, opts.sim_jobs, opts.seed);
        const double emp = sim.empirical_quantile(
            std::max(eps, 10.0 / static_cast<double>(opts.sim_jobs)));
        if (emp > q) {
            detail = "empirical=" + fmt(emp) + " bound=" + fmt(q);
            return false;
        }
        return true;
    });
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
    Suite suite;
    model_checks(suite);
    bound_checks(suite);
    envelope_checks(suite, opts);
    multistage_checks(suite);
    simulator_checks(suite, opts);
    dominance_checks(suite, opts);
    return suite.results;
}

}  // namespace forkbound
