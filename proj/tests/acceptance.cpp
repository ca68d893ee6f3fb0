// One line per acceptance criterion; exit status is nonzero if any criterion fails.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <iterator>
#include <thread>

#include "spiked/verification.hpp"

namespace {

struct Criterion {
    int id;
    const char* title;
    const char* suite;
    double budget_seconds;
};

constexpr Criterion criteria[] = {
    {1, "law sanity", "laws", 120},
    {2, "min edge, critical regime", "thm1-case1", 1200},
    {3, "min edge, supercritical regime", "thm1-case2", 1200},
    {4, "asymptotic independence of the extremes", "thm2", 2400},
    {5, "finite-M oracle", "oracle", 900},
    {6, "kernel convergence rates", "prop-rate", 600},
    {7, "condition-number identity and law", "cor2.1", 600},
    {8, "determinism and plumbing", "plumbing", 120},
};

}  // namespace

int main() {
    spiked::SuiteOptions opt;
    if (const char* j = std::getenv("SPIKED_JOBS")) opt.jobs = std::max(1, std::atoi(j));
    else opt.jobs = std::max(1u, std::thread::hardware_concurrency());
    spiked::SuiteContext context(opt);

    int failed = 0;
    for (const Criterion& c : criteria) {
        const spiked::SuiteResult r = spiked::run_suite(c.suite, context);
        const bool in_time = r.seconds <= c.budget_seconds;
        const bool ok = r.passed() && in_time;
        failed += !ok;
        for (const spiked::Assertion& a : r.assertions)
            std::printf("    %s %s: value=%.6g threshold=%.6g%s%s\n", a.passed ? "ok  " : "FAIL", a.name.c_str(),
                        a.value, a.threshold, a.detail.empty() ? "" : " ; ", a.detail.c_str());
        std::printf("criterion %d [PRIMARY] %s: %s (%zu assertions, %.1f s of %.0f s budget)\n", c.id, c.title,
                    ok ? "PASS" : "FAIL", r.assertions.size(), r.seconds, c.budget_seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
