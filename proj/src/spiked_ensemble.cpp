#include "spiked/spiked_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spiked/errors.hpp"
#include "spiked/parallel.hpp"

namespace spiked {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
}

Eigen::VectorXd sample_spectrum(const SpikedModel& model, std::uint64_t stream_seed) {
    const int N = model.N, M = model.M;
    const std::vector<double> pop = model.population();
    std::mt19937_64 rng(stream_seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd X(N, M);
    for (int j = 0; j < M; ++j) {
        for (int i = 0; i < N; ++i) {
            const double a = normal(rng);
            const double b = normal(rng);
            X(i, j) = std::complex<double>(a, b) * std::sqrt(0.5 * pop[i]);
        }
    }
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
    S.selfadjointView<Eigen::Lower>().rankUpdate(X, 1.0 / M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver did not converge");
    return es.eigenvalues();
}

EnsembleResult sample_extremes(const EnsembleRun& run, int jobs) {
    if (run.replicates < 1) throw DomainError("sample_extremes: replicates must be positive");
    std::vector<ExtremePair> slots(run.replicates);
    std::vector<std::string> errors(run.replicates);
    parallel_for(run.replicates, jobs, [&](int r) {
        try {
            const Eigen::VectorXd ev = sample_spectrum(run.model, replicate_seed(run.seed, r));
            slots[r] = {r, ev(0), ev(ev.size() - 1)};
        } catch (const std::exception& e) {
            errors[r] = e.what();
            if (errors[r].empty()) errors[r] = "unknown failure";
        }
    });
    EnsembleResult out;
    for (int r = 0; r < run.replicates; ++r) {
        if (errors[r].empty())
            out.pairs.push_back(slots[r]);
        else
            out.failures.push_back({r, errors[r]});
    }
    return out;
}

double EmpiricalDistribution::ecdf(double x) const {
    if (sorted.empty()) throw DomainError("ecdf: empty distribution");
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
}

EmpiricalDistribution make_distribution(std::vector<double> samples, std::vector<int> replicates, Side side,
                                        LawSpec law) {
    if (replicates.empty()) {
        replicates.resize(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) replicates[i] = static_cast<int>(i);
    }
    if (replicates.size() != samples.size()) throw DomainError("make_distribution: size mismatch");
    EmpiricalDistribution d;
    d.side = side;
    d.law = law;
    d.sorted = samples;
    std::sort(d.sorted.begin(), d.sorted.end());
    d.samples = std::move(samples);
    d.replicates = std::move(replicates);
    return d;
}

EmpiricalDistribution scale_extremes(const std::vector<ExtremePair>& pairs, const SpikedModel& model, Side side) {
    const LawSpec law = scaling_for(model, side);
    std::vector<double> v;
    std::vector<int> ids;
    v.reserve(pairs.size());
    ids.reserve(pairs.size());
    for (const ExtremePair& p : pairs) {
        v.push_back(law.scaled(side == Side::Min ? p.lambda_min : p.lambda_max, model.M));
        ids.push_back(p.replicate);
    }
    return make_distribution(std::move(v), std::move(ids), side, law);
}

double ecdf(const EmpiricalDistribution& dist, double x) { return dist.ecdf(x); }

double joint_ecdf(const EmpiricalDistribution& dmin, const EmpiricalDistribution& dmax, double x, double y) {
    if (dmin.replicates != dmax.replicates) throw UnpairedSamplesError("joint_ecdf: samples are not paired");
    if (dmin.samples.empty()) throw DomainError("joint_ecdf: empty distribution");
    std::size_t c = 0;
    for (std::size_t i = 0; i < dmin.samples.size(); ++i)
        if (dmin.samples[i] <= x && dmax.samples[i] <= y) ++c;
    return static_cast<double>(c) / static_cast<double>(dmin.samples.size());
}

}  // namespace spiked
