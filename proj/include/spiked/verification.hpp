#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spiked/io.hpp"
#include "spiked/spiked_ensemble.hpp"

namespace spiked {

struct Assertion {
    std::string name;
    bool passed = false;
    double value = 0;
    double threshold = 0;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<Assertion> assertions;
    double seconds = 0;

    bool passed() const;
    json to_json() const;
};

struct SuiteOptions {
    int N = 200;
    double gamma = 2.0;
    int replicates = 4000;
    std::uint64_t seed = 20240601;
    int jobs = 1;
};

// Shares Monte Carlo samples between suites run in one process.
class SuiteContext {
public:
    explicit SuiteContext(SuiteOptions options = {}) : options_(options) {}

    const SuiteOptions& options() const { return options_; }
    // Seed is derived from the master seed and the model, so distinct models get independent streams.
    const EnsembleResult& samples(const SpikedModel& model, int replicates);

private:
    SuiteOptions options_;
    std::map<std::string, EnsembleResult> cache_;
};

const std::vector<std::string>& suite_names();

// Throws UsageError for an unknown name; errors raised inside a suite become failed assertions.
SuiteResult run_suite(const std::string& name, SuiteContext& context);

// P(a <= all eigenvalues <= b) for the null model from the Andreief Hankel determinant; b may be +inf.
double null_gap_closed_form(int N, int M, double a, double b);
// Upper regularized incomplete gamma Q(n, x) for integer n.
double upper_gamma_q(int n, double x);

// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace spiked
