#include "spiked/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "spiked/commands.hpp"
#include "spiked/errors.hpp"
#include "spiked/finite_oracle.hpp"
#include "spiked/parallel.hpp"
#include "spiked/scaled_kernels.hpp"
#include "spiked/spectral_statistics.hpp"

namespace spiked {

namespace {

constexpr int oracle_mc_replicates = 1000000;
constexpr int small_N = 50;

Assertion at_most(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

Assertion below(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value < threshold, value, threshold, std::move(detail)};
}

std::string brief(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Assertion within(std::string name, double value, double lo, double hi) {
    return {std::move(name), value >= lo && value <= hi, value, hi, "interval [" + brief(lo) + ", " + brief(hi) + "]"};
}

std::string label(const SpikedModel& m) {
    std::string s = "N=" + std::to_string(m.N) + " M=" + std::to_string(m.M);
    if (m.spikes.empty()) return s + " null";
    for (const Spike& sp : m.spikes) s += " l=" + brief(sp.value) + "x" + std::to_string(sp.multiplicity);
    return s;
}

SpikedModel model_of(int N, double gamma, std::vector<Spike> spikes = {}) {
    return SpikedModel::from_gamma(N, gamma, std::move(spikes));
}

// One-sample KS with the law evaluated at every sample point in parallel.
double ks_against(const EmpiricalDistribution& dist, const LawSpec& spec, int jobs) {
    const std::vector<double>& x = dist.sorted;
    std::vector<double> v(x.size());
    parallel_for(static_cast<int>(x.size()), jobs, [&](int i) { v[i] = law_cdf(spec, x[i]); });
    return ks_statistic(dist, [&](double t) {
               return v[std::lower_bound(x.begin(), x.end(), t) - x.begin()];
           }).ks;
}

std::string law_label(const LawSpec& s) { return family_name(s.family) + std::to_string(s.k); }

void suite_laws(SuiteContext& ctx, std::vector<Assertion>& out) {
    const int jobs = ctx.options().jobs;
    const std::vector<std::pair<LawFamily, int>> laws = {{LawFamily::F, 0}, {LawFamily::F, 1}, {LawFamily::F, 2},
                                                         {LawFamily::G, 1}, {LawFamily::G, 2}, {LawFamily::G, 3}};
    const int count = 131;  // [-8, 5] step 0.1
    for (const auto& [fam, k] : laws) {
        std::vector<double> v(count);
        parallel_for(count, jobs, [&](int i) { v[i] = law_cdf(fam, k, -8.0 + 0.1 * i); });
        double drop = 0, excursion = 0;
        for (int i = 0; i < count; ++i) {
            if (i > 0) drop = std::max(drop, v[i - 1] - v[i]);
            excursion = std::max({excursion, -v[i], v[i] - 1});
        }
        const std::string name = family_name(fam) + std::to_string(k);
        out.push_back(at_most(name + " nondecreasing on [-8,5]", drop, 0.0, "largest decrease between grid points"));
        out.push_back(at_most(name + " within [0,1]", excursion, 1e-8, "largest excursion outside [0,1]"));
    }
    double err = 0;
    for (int i = 0; i <= 40; ++i) {
        const double x = -4.0 + 0.2 * i;
        err = std::max(err, std::abs(law_cdf(LawFamily::G, 1, x) - 0.5 * std::erfc(-x / std::sqrt(2.0))));
    }
    out.push_back(at_most("G1 equals the normal CDF", err, 1e-8, "41 points on [-4,4]"));
}

void suite_thm1_case1(SuiteContext& ctx, std::vector<Assertion>& out) {
    const SuiteOptions& o = ctx.options();
    const std::vector<std::vector<Spike>> cases = {{}, {{1 - 1 / o.gamma, 1}}, {{1 - 1 / o.gamma, 2}}};
    for (const auto& spikes : cases) {
        double ks[2];
        int idx = 0;
        for (int N : {small_N, o.N}) {
            const SpikedModel m = model_of(N, o.gamma, spikes);
            const EmpiricalDistribution d = scale_extremes(ctx.samples(m, o.replicates).pairs, m, Side::Min);
            ks[idx++] = ks_against(d, d.law, o.jobs);
            if (N == o.N)
                out.push_back(at_most("KS(min, " + law_label(d.law) + ") " + label(m), ks[1], 0.08));
        }
        const SpikedModel m = model_of(o.N, o.gamma, spikes);
        out.push_back(below("KS decreases from N=" + std::to_string(small_N) + " " + label(m), ks[1], ks[0],
                            "threshold is the KS at N=" + std::to_string(small_N)));
    }
}

void suite_thm1_case2(SuiteContext& ctx, std::vector<Assertion>& out) {
    const SuiteOptions& o = ctx.options();
    for (int k : {1, 2}) {
        const SpikedModel m = model_of(o.N, o.gamma, {{0.25, k}});
        const EnsembleResult& r = ctx.samples(m, o.replicates);
        const EmpiricalDistribution d = scale_extremes(r.pairs, m, Side::Min);
        out.push_back(at_most("KS(min, " + law_label(d.law) + ") " + label(m), ks_against(d, d.law, o.jobs), 0.06));
        double mean = 0;
        for (const ExtremePair& p : r.pairs) mean += p.lambda_min;
        mean /= r.pairs.size();
        const double limit = almost_sure_limit(0.25, o.gamma);
        out.push_back(at_most("mean lambda_min near " + brief(limit) + " " + label(m),
                              std::abs(mean - limit), 0.01, "mean " + brief(mean)));
    }
}

void suite_thm2(SuiteContext& ctx, std::vector<Assertion>& out) {
    const SuiteOptions& o = ctx.options();
    const std::vector<std::vector<Spike>> quadrants = {{}, {{3.0, 1}}, {{0.25, 1}}, {{3.0, 1}, {0.25, 1}}};
    for (const auto& spikes : quadrants) {
        const SpikedModel m = model_of(o.N, o.gamma, spikes);
        const EnsembleResult& r = ctx.samples(m, o.replicates);
        const EmpiricalDistribution dmin = scale_extremes(r.pairs, m, Side::Min);
        const EmpiricalDistribution dmax = scale_extremes(r.pairs, m, Side::Max);
        const IndependenceReport rep = independence_defect(dmin, dmax);
        const double env = independence_envelope(dmin, dmax, 200, 0.99, o.seed);
        const std::string q = "regime " + std::to_string(classify(m).quadrant()) + " " + label(m);
        out.push_back(below("defect below 99% shuffle envelope, " + q, rep.defect, env));
        out.push_back(below("|corr| " + q, std::abs(rep.correlation), 0.06));
    }
}

void suite_cor21(SuiteContext& ctx, std::vector<Assertion>& out) {
    const SuiteOptions& o = ctx.options();
    const SpikedModel m = model_of(o.N, o.gamma);
    const EnsembleResult& r = ctx.samples(m, o.replicates);
    const ConditionNumberStat stat = condition_number_stat(r.pairs, m);
    double worst = 0;
    for (std::size_t i = 0; i < r.pairs.size(); ++i)
        worst = std::max(worst, std::abs(stat.statistic[i] - condition_identity_rhs(r.pairs[i], m)) /
                                    std::max(1.0, std::abs(stat.statistic[i])));
    out.push_back(at_most("regime-1 identity per replicate", worst, 1e-12, "relative to max(1, |lhs|)"));
    const std::vector<double> draws = sample_composite(stat.law, 10000, o.seed);
    out.push_back(at_most("KS(statistic, " + brief(stat.law.cx) + " X + " + brief(stat.law.cy) +
                              " Y) " + label(m),
                          ks_two_sample(stat.statistic, draws), 0.05, "two-sample, 10000 composite draws"));
}

void suite_prop_rate(SuiteContext&, std::vector<Assertion>& out) {
    const double gamma = 2.0;
    const int m0 = 256, m1 = 2048;
    struct Case {
        std::string name;
        std::vector<Spike> spikes;
        double lo, hi;
    };
    const std::vector<Case> cases = {{"case 1 null", {}, 0.3, 0.6},
                                     {"case 1 critical k=1", {{1 - 1 / gamma, 1}}, 0.3, 0.6},
                                     {"case 2 l=0.25 k=1", {{0.25, 1}}, 0.2, 0.6}};
    for (const Case& c : cases) {
        double err[2];
        int i = 0;
        for (int M : {m0, m1}) {
            const SpikedModel m = SpikedModel::from_dimensions(static_cast<int>(M / (gamma * gamma)), M, c.spikes);
            err[i++] = scaled_kernel_limit_check(m, 0.0, {1.0}, {1.0}).max_error();
        }
        out.push_back(within("error ratio M=" + std::to_string(m1) + " vs " + std::to_string(m0) + ", " + c.name,
                             err[1] / err[0], c.lo, c.hi));
    }
    for (const Case& c : cases) {
        const SpikedModel m = SpikedModel::from_dimensions(static_cast<int>(m0 / (gamma * gamma)), m0, c.spikes);
        const double e0 = scaled_kernel_limit_check(m, 0.0, {0.0}, {0.0}).max_error();
        const double e4 = scaled_kernel_limit_check(m, 0.0, {4.0}, {4.0}).max_error();
        out.push_back(below("error at u=4 below u=0, M=" + std::to_string(m0) + ", " + c.name, e4 / e0, 1.0));
    }
    const OffDiagonalReport a = offdiagonal_check(64, gamma, 0, 0, 1, 1), b = offdiagonal_check(512, gamma, 0, 0, 1, 1);
    out.push_back(below("off-diagonal K12 decays, M=512 vs 64", b.k12 / a.k12, 1.0));
    out.push_back(below("off-diagonal K21 decays, M=512 vs 64", b.k21 / a.k21, 1.0));
}

void suite_oracle(SuiteContext& ctx, std::vector<Assertion>& out) {
    for (double xi : {0.5, 1.0, 1.5}) {
        const OracleReport r = gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(1, 20), xi));
        out.push_back(at_most("N=1 M=20 xi=" + brief(xi) + " vs incomplete gamma",
                              std::abs(r.value - upper_gamma_q(20, 20 * xi)), 1e-6));
    }
    auto mc_fraction = [](const EnsembleResult& r, auto&& hit) {
        double hits = 0;
        for (const ExtremePair& p : r.pairs) hits += hit(p);
        const double n = static_cast<double>(r.pairs.size()), p = hits / n;
        return std::pair{p, std::sqrt(std::max(p * (1 - p), 1e-12) / n)};
    };
    // the last threshold of each model sits near the median of lambda_min
    const std::vector<std::pair<std::vector<Spike>, std::vector<double>>> mc_cases = {
        {{}, {0.05, 0.1, 0.2, 0.4}}, {{{0.5, 1}}, {0.3}}};
    for (const auto& [spikes, xis] : mc_cases) {
        const SpikedModel m = SpikedModel::from_dimensions(4, 16, spikes);
        const EnsembleResult& r = ctx.samples(m, oracle_mc_replicates);
        for (double t : xis) {
            const double v = gap_probability_min(OracleProblem::make(m, t)).value;
            const auto [p, se] = mc_fraction(r, [t](const ExtremePair& e) { return e.lambda_min >= t; });
            out.push_back(at_most("P(lambda_min >= " + brief(t) + ") vs Monte Carlo in standard errors, " + label(m),
                                  std::abs(v - p) / se, 4.0, "oracle " + brief(v) + ", MC " + brief(p)));
        }
        const double xi = xis.back();
        const OracleProblem prob = OracleProblem::make(m, xi);
        const double v = gap_probability_min(prob).value;
        const OracleProblem alt = OracleProblem::make(m, xi, INFINITY, 2.0 * prob.pi_max(), 0.3 * prob.pi_min());
        out.push_back(at_most("(q1, q2) invariance " + label(m), std::abs(gap_probability_min(alt).value - v), 1e-8));
        const OracleProblem joint = OracleProblem::make(m, xi, 2.0);
        OracleOptions o1;
        const double base = gap_probability_joint(joint, o1).value;
        for (double w : {10.0, 1000.0}) {
            OracleOptions o2;
            o2.W = w;
            out.push_back(at_most("W invariance of the joint determinant, W=" + brief(w) + " " + label(m),
                                  std::abs(gap_probability_joint(joint, o2).value - base), 1e-9));
        }
        if (spikes.empty()) {
            out.push_back(at_most("P(lambda_min >= " + brief(xi) + ") vs Hankel closed form " + label(m),
                                  std::abs(v - null_gap_closed_form(4, 16, xi, INFINITY)), 1e-8));
            out.push_back(at_most("joint gap vs Hankel closed form " + label(m),
                                  std::abs(base - null_gap_closed_form(4, 16, xi, 2.0)),
                                  1e-8));
        }
    }
    const SpikedModel small = SpikedModel::from_dimensions(4, 16);
    out.push_back(at_most("P(lambda_min >= 1e-8) near one",
                          std::abs(gap_probability_min(OracleProblem::make(small, 1e-8)).value - 1), 1e-6));
    out.push_back(at_most("joint gap over (1e-8, 50) near one",
                          std::abs(gap_probability_joint(OracleProblem::make(small, 1e-8, 50.0)).value - 1), 1e-5));

    // both edges at once on a two-dimensional model
    const SpikedModel two = SpikedModel::from_dimensions(2, 8);
    const double lo = 0.2, hi = 1.4;
    const double v2 = gap_probability_joint(OracleProblem::make(two, lo, hi)).value;
    const auto [p2, se2] = mc_fraction(ctx.samples(two, oracle_mc_replicates), [&](const ExtremePair& e) {
        return e.lambda_min >= lo && e.lambda_max <= hi;
    });
    out.push_back(at_most("P(" + brief(lo) + " <= lambda_min <= lambda_max <= " + brief(hi) +
                              ") vs Monte Carlo in standard errors, " + label(two),
                          std::abs(v2 - p2) / se2, 4.0, "oracle " + brief(v2) + ", MC " + brief(p2)));
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("spiked-plumbing-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

void suite_plumbing(SuiteContext&, std::vector<Assertion>& out) {
    TempDir tmp;
    auto flag = [](std::string name, bool ok, std::string detail = {}) {
        return Assertion{std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)};
    };
    RunConfig sim;
    sim.command = "simulate";
    sim.model = {{"N", 20}, {"gamma", 2.0}, {"spikes", json::array({{{"value", 0.25}, {"multiplicity", 1}}})}};
    sim.replicates = 64;
    sim.seed = 11;
    auto run_sim = [&](const std::string& dir, int jobs) {
        RunConfig c = sim;
        c.out = tmp.path / dir;
        c.jobs = jobs;
        cmd_simulate(c);
        return read_file(c.out / "samples.csv") + read_file(c.out / "manifest.json");
    };
    const std::string a = run_sim("a", 1), b = run_sim("b", 1), c = run_sim("c", 4);
    out.push_back(flag("fixed-seed reruns are byte-identical", a == b));
    out.push_back(flag("parallel and serial runs are byte-identical", a == c));

    bool refused = false;
    try {
        RunConfig again = sim;
        again.out = tmp.path / "a";
        cmd_simulate(again);
    } catch (const OutputExistsError&) {
        refused = true;
    }
    out.push_back(flag("rerun without force keeps existing outputs", refused));

    RunConfig tab;
    tab.command = "tabulate-law";
    tab.family = "F";
    tab.k = 1;
    tab.from = -4;
    tab.to = 2;
    tab.step = 0.5;
    tab.cache_dir = tmp.path / "cache";
    RunConfig t1 = tab, t2 = tab, t3 = tab;
    t1.out = tmp.path / "t1";
    t2.out = tmp.path / "t2";
    t3.out = tmp.path / "t3";
    t3.cache_dir.clear();
    const CommandOutput o1 = cmd_tabulate_law(t1), o2 = cmd_tabulate_law(t2);
    cmd_tabulate_law(t3);
    const std::string s1 = read_file(o1.files[0]), s2 = read_file(o2.files[0]), s3 = read_file(t3.out / "law-F1.csv");
    out.push_back(flag("second tabulation is a cache hit", !o1.cache_hit && o2.cache_hit));
    out.push_back(flag("cache hit gives a byte-identical law table", s1 == s2 && s1 == s3));
    out.push_back(flag("CSV uses LF line endings", s1.find('\r') == std::string::npos && a.find('\r') == std::string::npos));
}

using SuiteFn = void (*)(SuiteContext&, std::vector<Assertion>&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r = {
        {"laws", suite_laws},     {"thm1-case1", suite_thm1_case1}, {"thm1-case2", suite_thm1_case2},
        {"thm2", suite_thm2},     {"oracle", suite_oracle},         {"prop-rate", suite_prop_rate},
        {"cor2.1", suite_cor21},  {"plumbing", suite_plumbing}};
    return r;
}

}  // namespace

bool SuiteResult::passed() const {
    return !assertions.empty() &&
           std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

json SuiteResult::to_json() const {
    json list = json::array();
    for (const Assertion& a : assertions)
        list.push_back({{"name", a.name},
                        {"passed", a.passed},
                        {"value", a.value},
                        {"threshold", a.threshold},
                        {"detail", a.detail}});
    return {{"suite", suite}, {"passed", passed()}, {"seconds", seconds}, {"assertions", list}};
}

const EnsembleResult& SuiteContext::samples(const SpikedModel& model, int replicates) {
    const std::string key = to_json(model).dump() + "/" + std::to_string(replicates);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const EnsembleRun run{model, replicates, splitmix64(options_.seed ^ fnv1a(to_json(model).dump()))};
    EnsembleResult r = sample_extremes(run, options_.jobs);
    if (!r.failures.empty())
        throw NumericalFailure("sampling " + label(model) + ": " + std::to_string(r.failures.size()) +
                               " failed replicates, first " + r.failures.front().reason);
    return cache_.emplace(key, std::move(r)).first->second;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : registry()) n.push_back(name);
        return n;
    }();
    return names;
}

SuiteResult run_suite(const std::string& name, SuiteContext& context) {
    const auto& reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
    if (it == reg.end()) throw UsageError("unknown suite '" + name + "'");
    SuiteResult result;
    result.suite = name;
    const auto start = std::chrono::steady_clock::now();
    try {
        it->second(context, result.assertions);
    } catch (const std::exception& e) {
        result.assertions.push_back({"suite completed without error", false, 0, 0, e.what()});
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

double upper_gamma_q(int n, double x) {
    if (n < 1 || x < 0) throw DomainError("upper_gamma_q: bad arguments");
    // e^{-x} sum_{j<n} x^j / j!
    long double term = 1, sum = 0;
    for (int j = 0; j < n; ++j) {
        if (j > 0) term *= static_cast<long double>(x) / j;
        sum += term;
    }
    return static_cast<double>(sum * std::exp(-static_cast<long double>(x)));
}

double null_gap_closed_form(int N, int M, double a, double b) {
    if (N < 1 || M < N || !(a >= 0) || !(b > a)) throw DomainError("null_gap_closed_form: bad arguments");
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    MatL num(N, N), den(N, N);
    // int_a^b l^n e^{-M l} dl = n! / M^{n+1} (Q(n+1, Ma) - Q(n+1, Mb))
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const int n = i + j + M - N;
            const long double c = std::tgamma(static_cast<long double>(n) + 1) / std::pow(static_cast<long double>(M), n + 1);
            const long double qb = std::isinf(b) ? 0.0L : upper_gamma_q(n + 1, M * b);
            num(i, j) = c * (upper_gamma_q(n + 1, M * a) - qb);
            den(i, j) = c;
        }
    return static_cast<double>(num.determinant() / den.determinant());
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

}  // namespace spiked
