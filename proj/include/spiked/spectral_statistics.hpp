#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spiked/limiting_laws.hpp"
#include "spiked/spiked_ensemble.hpp"

namespace spiked {

struct GridPoint {
    double x;
    double ecdf;
    double law;
};

struct GoFReport {
    double ks = 0;
    std::size_t n = 0;
    LawSpec law;
    std::vector<GridPoint> grid;
};

using Cdf = std::function<double(double)>;

GoFReport ks_statistic(const EmpiricalDistribution& dist, const Cdf& cdf);
GoFReport ks_statistic(const EmpiricalDistribution& dist, const LawSpec& law);

struct IndependenceReport {
    double defect = 0;
    double correlation = 0;
    int grid_per_axis = 21;
    double tail_fraction = 0.01;
};

IndependenceReport independence_defect(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax,
                                       int grid_per_axis = 21);

// Quantile `level` of the defect over random re-pairings of the two samples.
double independence_envelope(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax,
                             int shuffles = 200, double level = 0.99, std::uint64_t seed = 7,
                             int grid_per_axis = 21);

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b);

// Limit of the condition-number statistic: cx * X + cy * Y with independent X ~ law_x, Y ~ law_y.
struct CompositeLaw {
    int regime = 1;
    double cx = 0;
    double cy = 0;
    std::optional<LawSpec> law_x;
    std::optional<LawSpec> law_y;
};

struct ConditionNumberStat {
    std::vector<double> statistic;
    CompositeLaw law;
};

CompositeLaw condition_number_law(const SpikedModel& model);
ConditionNumberStat condition_number_stat(const std::vector<ExtremePair>& pairs, const SpikedModel& model);

// Regime-1 right-hand side: (lambda_-/lambda_min) * (cx * scaled_min + cy * scaled_max).
double condition_identity_rhs(const ExtremePair& pair, const SpikedModel& model);

// Draws from the composite law through tabulated inverse CDFs.
std::vector<double> sample_composite(const CompositeLaw& law, int n, std::uint64_t seed);

struct HypothesisResult {
    double T;
    bool reject;
    double scaled_min;
    double scaled_max;
};

HypothesisResult hypothesis_test(double lambda_min, double lambda_max, const SpikedModel& model, double alpha);

}  // namespace spiked
