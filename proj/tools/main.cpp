// Command-line front end: compute delay bounds, run trajectory simulations,
// emit the reference figure data, and run the validation suite.
//
// Exit codes: 0 ok, 1 validation failure, 2 infeasible or unstable input,
// 3 parse error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "forkbound/bound_engine.hpp"
#include "forkbound/csv.hpp"
#include "forkbound/envelope.hpp"
#include "forkbound/figures.hpp"
#include "forkbound/multistage.hpp"
#include "forkbound/numerics.hpp"
#include "forkbound/simulator.hpp"
#include "forkbound/validation.hpp"

namespace fb = forkbound;

namespace {

struct Options {
    std::string topology;
    std::string arrival_str;
    std::vector<std::string> service_strs;
    int k = 1;
    int l = 1;
    int h = 1;
    double eps = 1e-6;
    std::size_t n = 1000000;
    std::uint64_t seed = 1;
    std::vector<double> tau;
    std::string mode = "det";
    std::vector<double> p;
    std::string out;
    bool dependent = false;
    bool copula = false;
    bool k_given = false;
};

fb::DistributionSpec arrival_of(const Options& o) {
    if (o.arrival_str.empty()) throw fb::ParseError("--arrival is required");
    return fb::parse_distribution(o.arrival_str, fb::Role::InterArrival);
}

// Heterogeneous servers come from repeating --service; a single --service
// with --k is replicated.
std::vector<fb::DistributionSpec> services_of(const Options& o) {
    if (o.service_strs.empty()) throw fb::ParseError("--service is required");
    std::vector<fb::DistributionSpec> out;
    for (const auto& s : o.service_strs)
        out.push_back(fb::parse_distribution(s, fb::Role::ServiceTime));
    if (out.size() == 1 && o.k > 1) out.resize(o.k, out.front());
    if (o.k_given && static_cast<int>(out.size()) != o.k)
        throw fb::ParseError("--k disagrees with the number of --service entries");
    return out;
}

std::vector<double> tau_grid(const Options& o, double hi) {
    if (!o.tau.empty()) return o.tau;
    std::vector<double> grid;
    const int steps = 100;
    for (int i = 0; i <= steps; ++i) grid.push_back(hi * 1.25 * i / steps);
    return grid;
}

std::string meta_kv(const std::string& key, const std::string& value) {
    return key + " = " + value;
}
std::string meta_kv(const std::string& key, double value) {
    return key + " = " + fb::format_double(value);
}

// ---------------------------------------------------------------------------
// analytic bounds per topology

struct BoundCurve {
    std::vector<std::string> meta;
    std::function<double(double)> eval;  // tau -> bound on P[T > tau]
    double quantile;
};

BoundCurve forkjoin_bound(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    const int k = static_cast<int>(services.size());
    std::vector<fb::ServerSpec> servers;
    std::vector<double> thetas;
    BoundCurve curve;
    curve.meta.push_back(meta_kv("branch", o.dependent ? "G|G|1" : "GI|GI|1"));
    for (const auto& svc : services) {
        servers.push_back(o.dependent ? fb::gg_server(arrival, svc)
                                      : fb::gi_server(arrival, svc));
        thetas.push_back(fb::optimize_theta(servers.back(), fb::QuantileAt{o.eps, k}));
        curve.meta.push_back(meta_kv("theta[" + std::to_string(thetas.size() - 1) + "]",
                                     thetas.back()));
        curve.meta.push_back(meta_kv("alpha[" + std::to_string(thetas.size() - 1) + "]",
                                     fb::gg_alpha(servers.back(), thetas.back())));
    }
    const fb::TailBound bound = fb::sojourn_bound(servers, thetas);
    curve.eval = [bound](double tau) { return bound.eval(tau); };
    curve.quantile = fb::quantile(bound, o.eps);
    return curve;
}

BoundCurve splitmerge_bound(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    const fb::ServerSpec server{fb::arrival_sigma_rho(arrival),
                                fb::split_merge_service(services), !o.dependent};
    const double theta = fb::optimize_theta(server, fb::QuantileAt{o.eps, 1});
    const std::vector<fb::ServerSpec> one{server};
    const std::vector<double> thetas{theta};
    const fb::TailBound bound = fb::sojourn_bound(one, thetas);
    BoundCurve curve;
    curve.meta.push_back(meta_kv("branch", o.dependent ? "G|G|1" : "GI|GI|1"));
    curve.meta.push_back(meta_kv("theta", theta));
    curve.meta.push_back(meta_kv("alpha", fb::gg_alpha(server, theta)));
    curve.eval = [bound](double tau) { return bound.eval(tau); };
    curve.quantile = fb::quantile(bound, o.eps);
    return curve;
}

struct KlChoice {
    double theta_s;
    double theta_a;
    double rho_s;
    double split;
    double quantile;
};

KlChoice kl_choose(const fb::DistributionSpec& arrival, const fb::DistributionSpec& service,
                   int k, int l, bool independent, double eps) {
    double sup = std::min(fb::mgf_theta_sup(service), 1e6);
    if (std::isfinite(fb::mgf_theta_sup(service))) sup -= 1e-9;

    const auto theta_a_for = [&](double rho_s) {
        double hi = 1e9;
        if (fb::rho_arrival(arrival, 1e-9) < rho_s) return -1.0;
        if (fb::rho_arrival(arrival, hi) >= rho_s) return hi;
        double lo = 1e-9;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (fb::rho_arrival(arrival, mid) >= rho_s ? lo : hi) = mid;
        }
        return lo;
    };

    const auto detail_at = [&](double theta_s) -> std::pair<double, fb::SojournEnvelopeBound> {
        const double rho_s = fb::rho_service(service, theta_s);
        const double theta_a = theta_a_for(rho_s);
        if (theta_a <= 0) return {fb::kInfinity, {}};
        const fb::Envelope arr_env = fb::envelope_from_iid(arrival, theta_a);
        const fb::Envelope stage{
            fb::EnvDirection::Service, rho_s,
            fb::forkjoin_stage_profile(
                k, [theta_s](double t) { return std::exp(-theta_s * std::max(t, 0.0)); },
                independent, l)};
        try {
            return {theta_a, fb::sojourn_bound_envelopes_detail(arr_env, stage, eps)};
        } catch (const fb::InfeasibleError&) {
            return {fb::kInfinity, {}};
        }
    };

    const double theta_s = fb::grid_golden_min(
        [&](double t) {
            const auto d = detail_at(t);
            return std::isfinite(d.first) ? d.second.quantile : fb::kInfinity;
        },
        sup * 1e-4, sup, 25, true, 80);
    const auto chosen = detail_at(theta_s);
    if (!std::isfinite(chosen.first))
        throw fb::InfeasibleError("kl bound: no admissible theta_S");
    return {theta_s, chosen.first, fb::rho_service(service, theta_s), chosen.second.split,
            chosen.second.quantile};
}

BoundCurve kl_bound(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    const int k = static_cast<int>(services.size());
    const auto choice = kl_choose(arrival, services.front(), k, o.l, !o.dependent, o.eps);
    BoundCurve curve;
    curve.meta.push_back(meta_kv("l", static_cast<double>(o.l)));
    curve.meta.push_back(meta_kv("theta_S", choice.theta_s));
    curve.meta.push_back(meta_kv("theta_A", choice.theta_a));
    curve.meta.push_back(meta_kv("error_split", choice.split));
    const fb::Envelope arr_env = fb::envelope_from_iid(arrival, choice.theta_a);
    const auto stage = fb::forkjoin_stage_profile(
        k,
        [t = choice.theta_s](double tau) { return std::exp(-t * std::max(tau, 0.0)); },
        !o.dependent, o.l);
    const double rho_s = choice.rho_s;
    curve.eval = [arr_env, stage, rho_s](double tau) {
        return fb::envelope_tail(arr_env, stage, rho_s, tau);
    };
    curve.quantile = choice.quantile;
    return curve;
}

BoundCurve thinning_bound(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    const int k = static_cast<int>(services.size());
    std::vector<double> probs = o.p;
    if (o.mode == "random" && probs.empty())
        probs.assign(k, 1.0 / k);
    if (!probs.empty() && static_cast<int>(probs.size()) != k)
        throw fb::ParseError("--p must list one probability per server");

    std::vector<fb::ServerSpec> servers;
    std::vector<double> thetas;
    BoundCurve curve;
    curve.meta.push_back(meta_kv("mode", o.mode));
    for (int i = 0; i < k; ++i) {
        fb::SigmaRho thinned = (o.mode == "det")
                                   ? fb::thinned_arrival_deterministic(arrival, k)
                                   : fb::thinned_arrival_random(arrival, probs[i]);
        servers.push_back({std::move(thinned), fb::service_sigma_rho(services[i]), true});
        thetas.push_back(fb::optimize_theta(servers.back(), fb::QuantileAt{o.eps, k}));
        curve.meta.push_back(meta_kv("theta[" + std::to_string(i) + "]", thetas.back()));
    }
    const fb::TailBound bound = fb::sojourn_bound(servers, thetas);
    curve.eval = [bound](double tau) { return bound.eval(tau); };
    curve.quantile = fb::quantile(bound, o.eps);
    return curve;
}

BoundCurve multistage_bound(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    const fb::NetworkSpec net = fb::make_network(o.h, static_cast<int>(services.size()), arrival,
                                                 services.front());
    const fb::E2EDetail d = fb::e2e_sojourn_quantile_detail(net, o.eps);
    BoundCurve curve;
    curve.meta.push_back(meta_kv("h", static_cast<double>(o.h)));
    curve.meta.push_back(meta_kv("beta", d.beta));
    curve.meta.push_back(meta_kv("theta_S", d.theta_s));
    curve.meta.push_back(meta_kv("theta_A", d.theta_a));
    curve.meta.push_back(meta_kv("error_split", d.split));
    const double rho_s = net.service.rho_at(d.theta_s);
    const double log_term =
        std::log(static_cast<double>(o.h) * o.h * net.k / (d.theta_s * d.beta)) / d.theta_s;
    const double fixed_part = d.beta + o.h * (rho_s + log_term);
    const int h = o.h;
    const double ta = d.theta_a, ts = d.theta_s;
    curve.eval = [fixed_part, h, ta, ts](double tau) {
        const double slack = tau - fixed_part;
        if (slack <= 0) return 1.0;
        const double x = fb::grid_golden_min(
            [&](double tau_a) {
                return std::exp(-ta * tau_a) + std::exp(-ts * (slack - tau_a) / h);
            },
            0.0, slack, 33, false, 80);
        const double v = std::exp(-ta * x) + std::exp(-ts * (slack - x) / h);
        return std::min(1.0, v);
    };
    curve.quantile = d.quantile;
    return curve;
}

BoundCurve bound_for(const Options& o) {
    if (o.topology == "forkjoin") return forkjoin_bound(o);
    if (o.topology == "splitmerge") return splitmerge_bound(o);
    if (o.topology == "kl") return kl_bound(o);
    if (o.topology == "thinning") return thinning_bound(o);
    if (o.topology == "multistage") return multistage_bound(o);
    throw fb::ParseError("unknown topology '" + o.topology + "'");
}

// ---------------------------------------------------------------------------
// simulation per topology

fb::SimResult simulate_for(const Options& o) {
    const auto arrival = arrival_of(o);
    const auto services = services_of(o);
    if (o.topology == "forkjoin")
        return fb::sim_forkjoin(fb::make_workload(arrival, services, o.n, o.seed, o.copula));
    if (o.topology == "splitmerge")
        return fb::sim_splitmerge(fb::make_workload(arrival, services, o.n, o.seed, o.copula));
    if (o.topology == "kl")
        return fb::sim_kl(fb::make_workload(arrival, services, o.n, o.seed, o.copula), o.l);
    if (o.topology == "thinning") {
        if (o.mode == "det") return fb::sim_thinning(arrival, services, fb::RoundRobin{}, o.n,
                                                     o.seed);
        std::vector<double> probs = o.p;
        if (probs.empty()) probs.assign(services.size(), 1.0 / services.size());
        return fb::sim_thinning(arrival, services, fb::RandomSplit{probs}, o.n, o.seed);
    }
    if (o.topology == "multistage")
        return fb::sim_multistage(o.h, static_cast<int>(services.size()), arrival,
                                  services.front(), o.n, o.seed);
    throw fb::ParseError("unknown topology '" + o.topology + "'");
}

// ---------------------------------------------------------------------------
// commands

void emit(const fb::CsvTable& table, const std::string& out_path) {
    if (out_path.empty()) {
        fb::write_csv(table, std::cout);
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + out_path);
    fb::write_csv(table, f);
    std::cerr << "wrote " << out_path << "\n";
}

std::vector<std::string> common_meta(const Options& o) {
    std::vector<std::string> meta;
    meta.push_back(meta_kv("topology", o.topology));
    meta.push_back(meta_kv("arrival", o.arrival_str));
    std::string svc;
    for (const auto& s : o.service_strs) svc += (svc.empty() ? "" : " ") + s;
    meta.push_back(meta_kv("service", svc));
    meta.push_back(meta_kv("eps", o.eps));
    return meta;
}

int run_bound(const Options& o) {
    const BoundCurve curve = bound_for(o);
    fb::CsvTable table{"bound", common_meta(o), {"tau", "bound_p"}, {}};
    table.meta.insert(table.meta.end(), curve.meta.begin(), curve.meta.end());
    table.meta.push_back("quantile(eps=" + fb::format_double(o.eps) +
                         ") = " + fb::format_double(curve.quantile));
    for (double tau : tau_grid(o, curve.quantile))
        table.rows.push_back({tau, curve.eval(tau)});
    emit(table, o.out);
    return 0;
}

int run_simulate(const Options& o) {
    const fb::SimResult sim = simulate_for(o);
    const BoundCurve curve = bound_for(o);

    std::vector<double> taus = o.tau;
    if (taus.empty()) {
        const double hi =
            1.2 * sim.empirical_quantile(std::max(1e-6, 10.0 / static_cast<double>(o.n)));
        for (int i = 0; i <= 60; ++i) taus.push_back(hi * i / 60);
    }
    fb::CsvTable table{"simulate", common_meta(o),
                       {"tau", "empirical_p", "ci_halfwidth", "bound_p"}, {}};
    table.meta.push_back(meta_kv("n_jobs", static_cast<double>(o.n)));
    table.meta.push_back(meta_kv("seed", static_cast<double>(o.seed)));
    table.meta.push_back(meta_kv("warmup_discard", static_cast<double>(sim.warmup_discard)));
    table.meta.insert(table.meta.end(), curve.meta.begin(), curve.meta.end());
    for (const auto& pt : fb::empirical_tail(sim, taus))
        table.rows.push_back({pt.tau, pt.fraction, pt.ci_halfwidth, curve.eval(pt.tau)});
    emit(table, o.out);
    return 0;
}

int run_figure(const std::string& name, const std::string& out_dir) {
    std::vector<std::string> names;
    if (name == "all")
        names = fb::figure_names();
    else
        names.push_back(name);
    for (const auto& n : names) {
        for (const auto& table : fb::make_figure(n)) {
            const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
            std::filesystem::create_directories(dir);
            const std::string path = (dir / (table.name + ".csv")).string();
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::runtime_error("cannot open output file " + path);
            fb::write_csv(table, f);
            std::cerr << "wrote " << path << "\n";
        }
    }
    return 0;
}

int run_validate(const fb::ValidationOptions& opts) {
    const auto results = fb::run_validation(opts);
    std::size_t failed = 0;
    std::cout << "check,pass,detail\n";
    for (const auto& r : results) {
        if (!r.pass) ++failed;
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        std::cout << r.name << "," << (r.pass ? "pass" : "FAIL") << "," << detail << "\n";
    }
    std::cout << "summary," << (failed == 0 ? "pass" : "FAIL") << "," << (results.size() - failed)
              << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay bounds and max-plus simulation for parallel queueing systems"};
    app.require_subcommand(1);
    // --h is a domain flag (tandem stages), so help lives on --help only
    app.set_help_flag("--help", "print help");

    Options o;
    fb::ValidationOptions vopts;
    std::string figure_name;
    std::string figure_out;

    const auto add_common = [&](CLI::App* cmd, bool with_sim) {
        cmd->set_help_flag("--help", "print help");
        cmd->add_option("topology", o.topology, "forkjoin|splitmerge|kl|thinning|multistage")
            ->required()
            ->check(CLI::IsMember({"forkjoin", "splitmerge", "kl", "thinning", "multistage"}));
        cmd->add_option("--arrival", o.arrival_str, "arrival law, e.g. exp:lambda=0.7");
        cmd->add_option("--service", o.service_strs,
                        "service law, repeat for heterogeneous servers");
        cmd->add_option("--k", o.k, "parallel servers")->check(CLI::PositiveNumber);
        cmd->add_option("--l", o.l, "tasks required to finish a job")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--h", o.h, "tandem stages")->check(CLI::PositiveNumber);
        cmd->add_option("--eps", o.eps, "violation probability for quantiles");
        cmd->add_option("--tau", o.tau, "explicit tau grid")->delimiter(',');
        cmd->add_option("--mode", o.mode, "thinning mode")
            ->check(CLI::IsMember({"det", "random"}));
        cmd->add_option("--p", o.p, "random-thinning probabilities")->delimiter(',');
        cmd->add_option("--out", o.out, "output CSV path (default stdout)");
        cmd->add_flag("--dependent", o.dependent,
                      "do not assume independent increments / servers");
        if (with_sim) {
            cmd->add_option("--n", o.n, "jobs to simulate");
            cmd->add_option("--seed", o.seed, "rng seed");
            cmd->add_flag("--copula", o.copula,
                          "drive all task draws of a job from one uniform");
        }
    };

    auto* bound_cmd = app.add_subcommand("bound", "analytic tail bound and quantile");
    add_common(bound_cmd, false);
    auto* sim_cmd = app.add_subcommand("simulate", "trajectory simulation against the bound");
    add_common(sim_cmd, true);

    auto* fig_cmd = app.add_subcommand("figure", "emit reference figure data as CSV");
    fig_cmd->add_option("name", figure_name, "fig2..fig7 or all")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "all"}));
    fig_cmd->add_option("--out", figure_out, "output directory (default .)");

    auto* val_cmd = app.add_subcommand("validate", "run the invariant and cross-check suite");
    val_cmd->add_option("--n", vopts.sim_jobs, "jobs per simulation cross-check");
    val_cmd->add_option("--seed", vopts.seed, "rng seed");
    val_cmd->add_option("--inject-bound-scale", vopts.bound_scale,
                        "scale analytic bounds (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (bound_cmd->parsed()) {
            o.k_given = bound_cmd->count("--k") > 0;
            return run_bound(o);
        }
        if (sim_cmd->parsed()) {
            o.k_given = sim_cmd->count("--k") > 0;
            return run_simulate(o);
        }
        if (fig_cmd->parsed()) return run_figure(figure_name, figure_out);
        if (val_cmd->parsed()) return run_validate(vopts);
    } catch (const fb::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
