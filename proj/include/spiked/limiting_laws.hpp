#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spiked/quadrature.hpp"

namespace spiked {

struct Spike {
    double value;
    int multiplicity = 1;
};

// Population covariance diag(spikes, 1, ..., 1) with M samples of dimension N; gamma^2 = M/N.
struct SpikedModel {
    int N = 0;
    int M = 0;
    double gamma = 0;
    std::vector<Spike> spikes;  // descending by value

    static SpikedModel from_dimensions(int N, int M, std::vector<Spike> spikes = {});
    // M = ceil(gamma^2 N)
    static SpikedModel from_gamma(int N, double gamma, std::vector<Spike> spikes = {});

    int spike_count() const;
    // All N population eigenvalues, descending.
    std::vector<double> population() const;
    double smallest() const;
    double largest() const;
    int multiplicity_of(double value) const;
};

enum class Side { Min, Max };
enum class Branch { TracyWidom, Gaussian };
enum class LawFamily { F, G };

inline constexpr double threshold_tolerance = 1e-12;

struct Regime {
    int k1 = 0;
    int k2 = 0;
    Branch min_branch = Branch::TracyWidom;
    Branch max_branch = Branch::TracyWidom;
    // 1: TW/TW, 2: Gaussian/TW, 3: TW/Gaussian, 4: Gaussian/Gaussian
    int quadrant() const;
};

Regime classify(const SpikedModel& model);

// Scaled variable: M^exponent * (center - lambda) / scale on the min side, with the sign flipped on the max side.
struct LawSpec {
    LawFamily family = LawFamily::F;
    int k = 0;
    Side side = Side::Min;
    double center = 0;
    double scale = 1;
    double exponent = 2.0 / 3.0;

    double scaled(double lambda, int M) const;
    double unscaled(double x, int M) const;
};

LawSpec scaling_for(const SpikedModel& model, Side side);

std::pair<double, double> mp_edges(double gamma);

// Limit of the extreme eigenvalue attached to a separated spike.
double almost_sure_limit(double ell, double gamma);

struct LawValue {
    double value;
    bool tail_flag = false;
};

inline constexpr int default_law_nodes = 64;
inline constexpr double law_map_scale = 10.0;
inline constexpr double law_left_cap = -10.0;

LawValue tracy_widom_F_detailed(int k, double x, int nodes = default_law_nodes);
double tracy_widom_F(int k, double x, int nodes = default_law_nodes);
double gue_edge_G(int k, double x);

double law_cdf(LawFamily family, int k, double x, int nodes = default_law_nodes);
double law_cdf(const LawSpec& spec, double x, int nodes = default_law_nodes);

std::string family_name(LawFamily family);
LawFamily parse_family(const std::string& name);

struct LawTableRow {
    double x;
    double value;
    double error_estimate;
    bool tail_flag;
};

struct LawTable {
    LawFamily family;
    int k;
    int nodes;
    std::vector<LawTableRow> rows;
};

// Error estimate is the change under node doubling (zero for G, which is exact up to rounding).
LawTable tabulate_law(LawFamily family, int k, double from, double to, double step, int nodes = default_law_nodes,
                      int jobs = 1);

// Linear interpolation on a fixed grid with inverse by bisection.
class TabulatedLaw {
public:
    TabulatedLaw(LawFamily family, int k, double from = -10.0, double to = 6.0, double step = 0.02,
                 int nodes = default_law_nodes);

    double cdf(double x) const;
    double quantile(double p) const;

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> x_;
    std::vector<double> v_;
};

}  // namespace spiked
