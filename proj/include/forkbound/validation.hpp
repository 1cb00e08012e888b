#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace forkbound {

// Self-contained release checks: every module invariant plus the
// simulation-versus-bound cross-checks. The CLI `validate` command runs them
// and the test suites reuse them.

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct ValidationOptions {
    // Analytic bounds in the dominance cross-checks are multiplied by this
    // factor; a value below 1 is a negative control that must make the
    // dominance check fail.
    double bound_scale = 1.0;
    // Jobs per simulation in the cross-checks.
    std::size_t sim_jobs = 200000;
    std::uint64_t seed = 42;
};

std::vector<CheckResult> run_validation(const ValidationOptions& opts);

// Reference departures evaluated directly as max_{v in [1,n]} {A(v) + S(v,n)};
// deliberately not using the forward recursion it cross-checks.
std::vector<double> naive_departures(std::span<const double> arrivals,
                                     std::span<const double> services);

}  // namespace forkbound
