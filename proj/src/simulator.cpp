#include "forkbound/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "forkbound/numerics.hpp"

namespace forkbound {

// Stream layout. Every random quantity has a fixed (context, a, b) address so
// that coupled experiments share draws exactly:
//   (0, 0, 0)      arrival increments
//   (0, 1, 0)      server selection for random thinning
//   (0, 2, 0)      per-job copula uniforms
//   (0, 3+rep, s)  supermartingale replications (s = 0 arrivals, 1 service)
//   (j, i, 0)      service times at stage j >= 1, server i >= 1
// Adding a server or a stage therefore never perturbs existing streams.

namespace {

constexpr std::uint64_t kArrivalStream = 0;
constexpr std::uint64_t kSelectionStream = 1;
constexpr std::uint64_t kCopulaStream = 2;
constexpr std::uint64_t kReplicationBase = 3;

std::vector<double> draw_arrivals(const DistributionSpec& arrival, std::size_t n,
                                  std::uint64_t seed) {
    CounterRng rng(seed, 0, kArrivalStream);
    std::vector<double> a(n);
    double t = 0;
    for (std::size_t i = 0; i < n; ++i) {
        t += sample(arrival, rng);
        a[i] = t;
    }
    return a;
}

bool uses_gaussian(const DistributionSpec& d) {
    return std::holds_alternative<Gaussian>(d.law);
}

int num_threads() {
    if (const char* env = std::getenv("FORKBOUND_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, 256));
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Deterministic fan-out: results land in caller-owned slots, so the reduce
// order never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = std::min<std::size_t>(num_threads(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

Workload make_workload(const DistributionSpec& arrival,
                       std::span<const DistributionSpec> services, std::size_t n_jobs,
                       std::uint64_t seed, bool common_copula) {
    if (services.empty()) throw DomainError("make_workload: no service laws");
    if (arrival.role != Role::InterArrival)
        throw DomainError("make_workload: arrival law has the wrong role");
    for (const auto& s : services)
        if (s.role != Role::ServiceTime)
            throw DomainError("make_workload: service law has the wrong role");

    Workload w;
    w.n_jobs = n_jobs;
    w.k = static_cast<int>(services.size());
    w.seed = seed;
    w.common_copula = common_copula;
    w.arrival_desc = to_string(arrival);
    w.gaussian_truncated = uses_gaussian(arrival);
    w.arrivals = draw_arrivals(arrival, n_jobs, seed);

    w.services.resize(services.size());
    for (std::size_t i = 0; i < services.size(); ++i) {
        w.service_desc.push_back(to_string(services[i]));
        w.gaussian_truncated = w.gaussian_truncated || uses_gaussian(services[i]);
        w.services[i].resize(n_jobs);
    }
    if (common_copula) {
        CounterRng copula(seed, 0, kCopulaStream);
        for (std::size_t n = 0; n < n_jobs; ++n) {
            const double u = copula.next_uniform();
            for (std::size_t i = 0; i < services.size(); ++i)
                w.services[i][n] = sample_from_uniform(services[i], u);
        }
    } else {
        for (std::size_t i = 0; i < services.size(); ++i) {
            CounterRng rng(seed, 1, i + 1);
            for (std::size_t n = 0; n < n_jobs; ++n) w.services[i][n] = sample(services[i], rng);
        }
    }
    return w;
}

std::vector<double> serve_fifo(std::span<const double> arrivals,
                               std::span<const double> services) {
    if (arrivals.size() != services.size())
        throw ShapeError("serve_fifo: arrival and service sequences differ in length");
    std::vector<double> departures(arrivals.size());
    double prev = 0;
    for (std::size_t n = 0; n < arrivals.size(); ++n) {
        prev = std::max(arrivals[n], prev) + services[n];
        departures[n] = prev;
    }
    return departures;
}

std::size_t default_warmup(std::size_t n_jobs) {
    if (n_jobs < 100000) return 0;
    return std::max<std::size_t>(10000, n_jobs / 100);
}

double SimResult::empirical_quantile(double eps) const {
    const auto s = steady();
    if (s.empty()) throw EmptyError("empirical_quantile: no samples after warmup");
    if (!(eps > 0 && eps < 1)) throw DomainError("empirical_quantile: eps outside (0,1)");
    std::vector<double> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = std::ceil((1.0 - eps) * static_cast<double>(sorted.size()));
    const std::size_t idx =
        std::min(sorted.size() - 1, static_cast<std::size_t>(std::max(pos - 1, 0.0)));
    return sorted[idx];
}

std::vector<TailPoint> empirical_tail(std::span<const double> samples,
                                      std::span<const double> taus) {
    if (samples.empty()) throw EmptyError("empirical_tail: no samples");
    std::vector<TailPoint> out;
    out.reserve(taus.size());
    const double n = static_cast<double>(samples.size());
    for (double tau : taus) {
        std::size_t hits = 0;
        for (double t : samples) hits += (t > tau) ? 1 : 0;
        const double p = static_cast<double>(hits) / n;
        out.push_back({tau, p, 3.0 * std::sqrt(p * (1.0 - p) / n)});
    }
    return out;
}

std::vector<TailPoint> empirical_tail(const SimResult& result, std::span<const double> taus) {
    return empirical_tail(result.steady(), taus);
}

namespace {

std::vector<std::vector<double>> per_server_departures(const Workload& w) {
    std::vector<std::vector<double>> d(w.services.size());
    for (std::size_t i = 0; i < w.services.size(); ++i)
        d[i] = serve_fifo(w.arrivals, w.services[i]);
    return d;
}

std::vector<double> forkjoin_waitings(const Workload& w,
                                      const std::vector<std::vector<double>>& departures) {
    std::vector<double> waits(w.n_jobs, 0.0);
    for (std::size_t n = 0; n < w.n_jobs; ++n) {
        double wmax = 0;
        for (const auto& d : departures) {
            const double prev = n == 0 ? 0.0 : d[n - 1];
            wmax = std::max(wmax, prev - w.arrivals[n]);
        }
        waits[n] = std::max(wmax, 0.0);
    }
    return waits;
}

}  // namespace

SimResult sim_forkjoin(const Workload& w) {
    const auto departures = per_server_departures(w);
    SimResult r;
    r.warmup_discard = default_warmup(w.n_jobs);
    r.sojourns.resize(w.n_jobs);
    for (std::size_t n = 0; n < w.n_jobs; ++n) {
        double dmax = 0;
        for (const auto& d : departures) dmax = std::max(dmax, d[n]);
        r.sojourns[n] = dmax - w.arrivals[n];
    }
    r.waitings = forkjoin_waitings(w, departures);
    return r;
}

SimResult sim_splitmerge(const Workload& w) {
    std::vector<double> effective(w.n_jobs, 0.0);
    for (std::size_t n = 0; n < w.n_jobs; ++n) {
        double smax = 0;
        for (const auto& s : w.services) smax = std::max(smax, s[n]);
        effective[n] = smax;
    }
    const auto departures = serve_fifo(w.arrivals, effective);
    SimResult r;
    r.warmup_discard = default_warmup(w.n_jobs);
    r.sojourns.resize(w.n_jobs);
    r.waitings.resize(w.n_jobs);
    for (std::size_t n = 0; n < w.n_jobs; ++n) {
        r.sojourns[n] = departures[n] - w.arrivals[n];
        const double prev = n == 0 ? 0.0 : departures[n - 1];
        r.waitings[n] = std::max(prev - w.arrivals[n], 0.0);
    }
    return r;
}

SimResult sim_kl(const Workload& w, int l) {
    if (l < 1 || l > w.k) throw DomainError("sim_kl: l outside [1,k]");
    const auto departures = per_server_departures(w);
    SimResult r;
    r.warmup_discard = default_warmup(w.n_jobs);
    r.sojourns.resize(w.n_jobs);
    std::vector<double> finish(w.services.size());
    for (std::size_t n = 0; n < w.n_jobs; ++n) {
        for (std::size_t i = 0; i < departures.size(); ++i) finish[i] = departures[i][n];
        std::nth_element(finish.begin(), finish.begin() + (l - 1), finish.end());
        r.sojourns[n] = finish[l - 1] - w.arrivals[n];
    }
    r.waitings = forkjoin_waitings(w, departures);
    return r;
}

std::size_t round_robin_job_index(int k, std::size_t m, int i) {
    return static_cast<std::size_t>(k) * (m - 1) + static_cast<std::size_t>(i);
}

std::size_t round_robin_served_count(int k, std::size_t n, int i) {
    const long long num = static_cast<long long>(n) - i + 1;
    if (num <= 0) return 0;
    return static_cast<std::size_t>((num + k - 1) / k);
}

SimResult sim_thinning(const DistributionSpec& arrival,
                       std::span<const DistributionSpec> services, const ThinningMode& mode,
                       std::size_t n_jobs, std::uint64_t seed) {
    const int k = static_cast<int>(services.size());
    if (k < 1) throw DomainError("sim_thinning: no servers");
    if (const auto* rs = std::get_if<RandomSplit>(&mode)) {
        if (rs->p.size() != services.size())
            throw DomainError("sim_thinning: probability vector size mismatch");
        double sum = 0;
        for (double p : rs->p) {
            if (p < 0) throw DomainError("sim_thinning: negative probability");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DomainError("sim_thinning: probabilities must sum to 1");
    }

    const auto arrivals = draw_arrivals(arrival, n_jobs, seed);
    CounterRng selector(seed, 0, kSelectionStream);
    std::vector<CounterRng> service_rng;
    service_rng.reserve(services.size());
    for (std::size_t i = 0; i < services.size(); ++i) service_rng.emplace_back(seed, 1, i + 1);

    // per-server fifo state: departure of the last job routed there
    std::vector<double> last_departure(services.size(), 0.0);
    SimResult r;
    r.warmup_discard = default_warmup(n_jobs);
    r.sojourns.resize(n_jobs);

    double resequenced = 0;  // max_i D_i(Y_i(n)) maintained incrementally
    for (std::size_t n = 0; n < n_jobs; ++n) {
        std::size_t server;
        if (std::holds_alternative<RoundRobin>(mode)) {
            server = n % static_cast<std::size_t>(k);
        } else {
            const auto& p = std::get<RandomSplit>(mode).p;
            const double u = selector.next_uniform();
            double acc = 0;
            server = p.size() - 1;
            for (std::size_t i = 0; i < p.size(); ++i) {
                acc += p[i];
                if (u <= acc) {
                    server = i;
                    break;
                }
            }
        }
        const double s = sample(services[server], service_rng[server]);
        last_departure[server] = std::max(arrivals[n], last_departure[server]) + s;
        // fifo per server and in-order release: job n leaves once every server
        // has released the jobs it received among [1, n]
        resequenced = std::max(resequenced, last_departure[server]);
        r.sojourns[n] = resequenced - arrivals[n];
    }
    return r;
}

SimResult sim_multistage(int h, int k, const DistributionSpec& arrival,
                         const DistributionSpec& service, std::size_t n_jobs,
                         std::uint64_t seed) {
    if (h < 1 || k < 1) throw DomainError("sim_multistage: h and k must be at least 1");
    const auto external = draw_arrivals(arrival, n_jobs, seed);
    std::vector<double> stage_arrivals = external;
    std::vector<double> services_buf(n_jobs);
    std::vector<double> joined(n_jobs);
    for (int stage = 1; stage <= h; ++stage) {
        std::fill(joined.begin(), joined.end(), 0.0);
        for (int i = 1; i <= k; ++i) {
            CounterRng rng(seed, static_cast<std::uint64_t>(stage), static_cast<std::uint64_t>(i));
            for (std::size_t n = 0; n < n_jobs; ++n) services_buf[n] = sample(service, rng);
            const auto departures = serve_fifo(stage_arrivals, services_buf);
            for (std::size_t n = 0; n < n_jobs; ++n)
                joined[n] = std::max(joined[n], departures[n]);
        }
        stage_arrivals = joined;
    }
    SimResult r;
    r.warmup_discard = default_warmup(n_jobs);
    r.sojourns.resize(n_jobs);
    for (std::size_t n = 0; n < n_jobs; ++n) r.sojourns[n] = stage_arrivals[n] - external[n];
    return r;
}

std::vector<SupermartingaleRow> supermartingale_check(const DistributionSpec& arrival,
                                                      const DistributionSpec& service,
                                                      double theta, int m_max,
                                                      std::size_t replications,
                                                      std::uint64_t seed) {
    if (m_max < 1) throw DomainError("supermartingale_check: m_max must be at least 1");
    if (replications < 2) throw DomainError("supermartingale_check: need at least 2 replications");
    if (rho_service(service, theta) > rho_arrival(arrival, theta))
        throw StabilityError("supermartingale_check: rho_S(theta) exceeds rho_A(-theta)");

    const std::size_t m = static_cast<std::size_t>(m_max);
    std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
    std::vector<std::vector<double>> slices(replications);

    parallel_for(replications, [&](std::size_t rep) {
        CounterRng arr_rng(seed, 0, kReplicationBase + rep, 0);
        CounterRng svc_rng(seed, 0, kReplicationBase + rep, 1);
        auto& u = slices[rep];
        u.resize(m);
        // U(m) multiplies e^{theta S} per step and e^{-theta A} from step 2 on
        double log_u = theta * sample(service, svc_rng);
        u[0] = std::exp(log_u);
        for (std::size_t j = 1; j < m; ++j) {
            log_u += theta * (sample(service, svc_rng) - sample(arrival, arr_rng));
            u[j] = std::exp(log_u);
        }
    });
    for (const auto& u : slices) {
        for (std::size_t j = 0; j < m; ++j) {
            sum[j] += u[j];
            sum_sq[j] += u[j] * u[j];
        }
    }

    std::vector<SupermartingaleRow> rows;
    rows.reserve(m);
    const double n = static_cast<double>(replications);
    for (std::size_t j = 0; j < m; ++j) {
        const double mean = sum[j] / n;
        const double var = std::max(0.0, (sum_sq[j] / n - mean * mean) * n / (n - 1));
        rows.push_back({static_cast<int>(j + 1), mean, std::sqrt(var / n)});
    }
    return rows;
}

}  // namespace forkbound
