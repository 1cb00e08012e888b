#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "forkbound/distributions.hpp"

namespace forkbound {

// Exact trajectory simulation of the parallel systems via the max-plus
// departure recursion. Results are bit-reproducible for a given seed; the
// analytic bounds must dominate every empirical tail produced here.

struct Workload {
    std::size_t n_jobs = 0;
    int k = 1;
    std::vector<double> arrivals;               // A(1..n), non-decreasing
    std::vector<std::vector<double>> services;  // [server][job]
    std::uint64_t seed = 0;
    std::string arrival_desc;
    std::vector<std::string> service_desc;
    bool gaussian_truncated = false;  // negative Gaussian draws were clipped to 0
    bool common_copula = false;       // one uniform per job drives all task draws
};

Workload make_workload(const DistributionSpec& arrival,
                       std::span<const DistributionSpec> services, std::size_t n_jobs,
                       std::uint64_t seed, bool common_copula = false);

// Departures of a lossless work-conserving fifo server:
// D(n) = max(A(n), D(n-1)) + S(n), D(0) = 0.
std::vector<double> serve_fifo(std::span<const double> arrivals,
                               std::span<const double> services);

struct TailPoint {
    double tau;
    double fraction;
    double ci_halfwidth;  // three binomial standard errors
};

struct SimResult {
    std::vector<double> sojourns;  // T(n) for every job
    std::vector<double> waitings;  // task-start waiting, where defined
    std::size_t warmup_discard = 0;

    std::span<const double> steady() const {
        return std::span<const double>(sojourns).subspan(
            std::min(warmup_discard, sojourns.size()));
    }
    double empirical_quantile(double eps) const;
};

std::vector<TailPoint> empirical_tail(const SimResult& result, std::span<const double> taus);
std::vector<TailPoint> empirical_tail(std::span<const double> samples,
                                      std::span<const double> taus);

// First jobs dropped before tail estimation on long runs.
std::size_t default_warmup(std::size_t n_jobs);

SimResult sim_forkjoin(const Workload& w);
SimResult sim_splitmerge(const Workload& w);

// l-out-of-k join; unfinished tasks keep their servers busy.
SimResult sim_kl(const Workload& w, int l);

struct RoundRobin {};
struct RandomSplit {
    std::vector<double> p;  // per-server probabilities, sum to 1
};
using ThinningMode = std::variant<RoundRobin, RandomSplit>;

// Whole jobs fanned over k servers with in-order delivery at the output:
// D(n) = max_i D_i(Y_i(n)).
SimResult sim_thinning(const DistributionSpec& arrival,
                       std::span<const DistributionSpec> services, const ThinningMode& mode,
                       std::size_t n_jobs, std::uint64_t seed);

// Round-robin index maps: X_i(m) = k(m-1)+i and Y_i(n) = ceil((n-i+1)/k).
std::size_t round_robin_job_index(int k, std::size_t m, int i);
std::size_t round_robin_served_count(int k, std::size_t n, int i);

// h fork-join stages in tandem; the departures of a stage feed the next one,
// with fresh iid service draws per stage.
SimResult sim_multistage(int h, int k, const DistributionSpec& arrival,
                         const DistributionSpec& service, std::size_t n_jobs,
                         std::uint64_t seed);

struct SupermartingaleRow {
    int m;
    double mean_u;
    double stderr_u;
};

// Monte-Carlo estimate of E[U(m)] for U(m) = e^{theta (S(n-m+1,n) - A(n-m+1,n))};
// under stability the sequence must be non-increasing in m.
std::vector<SupermartingaleRow> supermartingale_check(const DistributionSpec& arrival,
                                                      const DistributionSpec& service,
                                                      double theta, int m_max,
                                                      std::size_t replications,
                                                      std::uint64_t seed);

}  // namespace forkbound
