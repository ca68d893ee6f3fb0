#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spiked/limiting_laws.hpp"

namespace spiked {

struct EnsembleRun {
    SpikedModel model;
    int replicates = 1;
    std::uint64_t seed = 0;
};

struct ExtremePair {
    int replicate;
    double lambda_min;
    double lambda_max;
};

struct ReplicateFailure {
    int replicate;
    std::string reason;
};

struct EnsembleResult {
    std::vector<ExtremePair> pairs;  // ordered by replicate index
    std::vector<ReplicateFailure> failures;
};

std::uint64_t splitmix64(std::uint64_t x);
// Stream seed for one replicate; distinct indices give distinct streams.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

// Eigenvalues (ascending) of S = XX*/M for one replicate.
Eigen::VectorXd sample_spectrum(const SpikedModel& model, std::uint64_t stream_seed);

EnsembleResult sample_extremes(const EnsembleRun& run, int jobs = 1);

struct EmpiricalDistribution {
    Side side = Side::Min;
    LawSpec law;
    std::vector<int> replicates;  // replicate index of each sample
    std::vector<double> samples;  // in replicate order
    std::vector<double> sorted;

    std::size_t size() const { return samples.size(); }
    double ecdf(double x) const;
};

EmpiricalDistribution make_distribution(std::vector<double> samples, std::vector<int> replicates, Side side = Side::Min,
                                        LawSpec law = {});

EmpiricalDistribution scale_extremes(const std::vector<ExtremePair>& pairs, const SpikedModel& model, Side side);

double ecdf(const EmpiricalDistribution& dist, double x);
double joint_ecdf(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax, double x, double y);

}  // namespace spiked
