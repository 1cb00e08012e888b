// Exercises the installed CLI binary end to end: exit codes, CSV shape, and
// byte-for-byte determinism. The binary path arrives as argv[1].

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int g_failures = 0;
std::string g_cli;
std::filesystem::path g_dir;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

double quantile_from_meta(const std::string& csv) {
    const auto pos = csv.find("quantile(");
    if (pos == std::string::npos) return -1;
    const auto eq = csv.find(") = ", pos);
    if (eq == std::string::npos) return -1;
    return std::strtod(csv.c_str() + eq + 4, nullptr);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-forkbound>\n");
        return 2;
    }
    g_cli = argv[1];
    g_dir = std::filesystem::temp_directory_path() /
            ("forkbound_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(g_dir);

    const std::string out1 = (g_dir / "a.csv").string();
    const std::string out2 = (g_dir / "b.csv").string();

    // quantile of the 4-server fork-join example
    const std::string fj =
        "bound forkjoin --arrival exp:lambda=0.7 --service exp:mu=1 --k 4 --eps 1e-6";
    check(run(fj + " --out " + out1) == 0, "bound forkjoin exits 0");
    const double q = quantile_from_meta(slurp(out1));
    check(std::abs(q - (std::log(4.0) + std::log(1.0 / 0.7) + std::log(1e6)) / 0.3) < 1e-6,
          "fork-join quantile matches the closed form (got " + std::to_string(q) + ")");

    // determinism: identical bytes on a second run
    check(run(fj + " --out " + out2) == 0, "bound forkjoin second run exits 0");
    check(slurp(out1) == slurp(out2), "bound output is byte-identical across runs");

    const std::string sim =
        "simulate forkjoin --arrival exp:lambda=0.7 --service exp:mu=1 --k 2 "
        "--n 20000 --seed 5 --tau 2,6,10,14";
    check(run(sim + " --out " + out1) == 0, "simulate forkjoin exits 0");
    check(run(sim + " --out " + out2) == 0, "simulate forkjoin second run exits 0");
    check(slurp(out1) == slurp(out2), "simulate output is byte-identical across runs");
    {
        // empirical tail must sit below the bound column at every probed tau
        std::ifstream f(out1);
        std::string line;
        bool ok = true;
        int rows = 0;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 't') continue;
            double tau, emp, ci, bound;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &tau, &emp, &ci, &bound) == 4) {
                ++rows;
                ok = ok && emp <= bound + ci;
            }
        }
        check(ok && rows == 4, "simulated tail respects the bound column");
    }

    // multistage bound sits above the matching fork-join bound
    const std::string ms =
        "bound multistage --arrival exp:lambda=0.7 --service exp:mu=1 --k 2 --h 1 "
        "--eps 1e-3 --out ";
    const std::string fj2 =
        "bound forkjoin --arrival exp:lambda=0.7 --service exp:mu=1 --k 2 --eps 1e-3 --out ";
    check(run(ms + out1) == 0, "bound multistage exits 0");
    check(run(fj2 + out2) == 0, "bound forkjoin (eps 1e-3) exits 0");
    check(quantile_from_meta(slurp(out1)) >= quantile_from_meta(slurp(out2)),
          "single-stage tandem bound dominates the direct fork-join bound");

    // guarded preconditions surface as exit 2
    check(run("bound kl --arrival det:d=1.25 --service exp:mu=1 --k 2 --l 1 --dependent") == 2,
          "dependent (2,1) fork-join is refused with exit 2");
    check(run("bound forkjoin --arrival exp:lambda=1.2 --service exp:mu=1") == 2,
          "unstable input exits 2");
    check(run("bound splitmerge --arrival exp:lambda=0.4 --service exp:mu=1 --k 8") == 2,
          "split-merge over 8 servers at lambda 0.4 is unstable (ln k loss) and exits 2");
    check(run("bound splitmerge --arrival exp:lambda=0.1 --service exp:mu=1 --k 2 --out " +
              out1) == 0,
          "lightly loaded split-merge bound exits 0");
    check(quantile_from_meta(slurp(out1)) > 0, "split-merge quantile is positive");

    // parse problems surface as exit 3
    check(run("bound forkjoin --arrival nonsense:x=1 --service exp:mu=1") == 3,
          "bad distribution literal exits 3");
    check(run("bound forkjoin --service exp:mu=1") == 3, "missing arrival exits 3");
    check(run("frobnicate") == 3, "unknown subcommand exits 3");

    // figures
    check(run("figure fig4 --out " + (g_dir / "figs").string()) == 0, "figure fig4 exits 0");
    const std::string fig = slurp(g_dir / "figs" / "fig4.csv");
    check(fig.rfind("# forkbound", 0) == 0, "figure csv starts with the version header");
    check(fig.find("k,det_quantile,rand_quantile") != std::string::npos,
          "figure csv carries the documented columns");
    check(run("figure fig4 --out " + (g_dir / "figs2").string()) == 0,
          "figure fig4 second run exits 0");
    check(fig == slurp(g_dir / "figs2" / "fig4.csv"),
          "figure output is byte-identical across runs");
    check(run("figure fig6 --out " + (g_dir / "figs").string()) == 0, "figure fig6 exits 0");
    check(std::filesystem::exists(g_dir / "figs" / "fig6a.csv") &&
              std::filesystem::exists(g_dir / "figs" / "fig6b.csv"),
          "figure fig6 emits both panels");

    // emitted bound curves are non-increasing in tau (the kl curve goes
    // through the per-tau envelope search, the fork-join one is closed form)
    const auto curve_monotone = [&](const std::string& path) {
        std::ifstream f(path);
        std::string line;
        double prev = 2.0;
        bool ok = true;
        int rows = 0;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 't') continue;
            double tau, p;
            if (std::sscanf(line.c_str(), "%lf,%lf", &tau, &p) == 2) {
                ++rows;
                ok = ok && p <= prev + 1e-9 * std::max(prev, 1e-12);
                prev = p;
            }
        }
        return ok && rows > 10;
    };
    check(run("bound kl --arrival det:d=1.25 --service exp:mu=1 --k 15 --l 10 --eps 1e-6 "
              "--out " + out1) == 0,
          "bound kl exits 0");
    check(curve_monotone(out1), "kl bound curve is non-increasing in tau");
    check(run(fj + " --out " + out2) == 0, "bound forkjoin rerun exits 0");
    check(curve_monotone(out2), "fork-join bound curve is non-increasing in tau");

    // validation: reduced-size clean run plus the injected-fault control
    check(run("validate --n 60000 >" + (g_dir / "val.csv").string()) == 0,
          "validate (reduced n) exits 0");
    const std::string val = slurp(g_dir / "val.csv");
    check(val.find("summary,pass") != std::string::npos, "validate prints a pass summary");
    check(run("validate --n 60000 --inject-bound-scale 0.2 >/dev/null") == 1,
          "scaled-down bounds make validation fail with exit 1");

    // verdicts are stable across seeds: the statistical margins absorb noise
    bool seeds_ok = true;
    for (int seed = 1; seed <= 10; ++seed)
        seeds_ok = seeds_ok &&
                   run("validate --n 40000 --seed " + std::to_string(seed) + " >/dev/null") == 0;
    check(seeds_ok, "validation verdict identical over 10 seeds");

    std::filesystem::remove_all(g_dir);
    if (g_failures) {
        std::printf("%d CLI check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all CLI checks passed\n");
    return 0;
}
