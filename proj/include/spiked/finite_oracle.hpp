#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "spiked/fredholm.hpp"
#include "spiked/limiting_laws.hpp"

namespace spiked {

using cplx = std::complex<double>;

struct ContourNodes {
    std::vector<cplx> z;
    std::vector<cplx> dz;
};

struct ContourSpec {
    enum class Kind { GammaLoop, Sigma1VerticalLine, Sigma2Circle };
    Kind kind = Kind::GammaLoop;
    // GammaLoop: rectangle [x_lo, x_hi] x [-half_height, half_height], counterclockwise
    double x_lo = 0, x_hi = 0, half_height = 0;
    // Sigma1: Re w = abscissa, |Im w| <= height, upward
    double abscissa = 0, height = 0;
    // Sigma2: |w| = radius, counterclockwise
    double radius = 0;
    int nodes = 0;

    ContourNodes discretize() const;
    ContourSpec doubled() const;
};

struct OracleProblem {
    SpikedModel model;
    std::vector<double> pis;  // 1 / population eigenvalue, one entry per dimension
    double q1 = 0;
    double q2 = 0;
    double xi1 = 0;
    double xi2 = std::numeric_limits<double>::infinity();

    // q1, q2 default to 1.5 max(pi) and 0.5 min(pi) when left NaN.
    static OracleProblem make(const SpikedModel& model, double xi1, double xi2 = std::numeric_limits<double>::infinity(),
                              double q1 = std::numeric_limits<double>::quiet_NaN(),
                              double q2 = std::numeric_limits<double>::quiet_NaN());
    double pi_min() const;
    double pi_max() const;
};

struct OracleContours {
    ContourSpec gamma;
    ContourSpec sigma1;
    ContourSpec sigma2;

    static OracleContours defaults(const OracleProblem& prob, int gamma_nodes = 1024, int sigma1_nodes = 768,
                                   int sigma2_nodes = 256);
    // Throws InvalidContourError if any invariant fails.
    void validate(const OracleProblem& prob) const;
    OracleContours doubled() const;
};

struct KernelBlock {
    Eigen::MatrixXd values;  // K(eta_i, zeta_j)
    double imag_residual;    // max |Im K| / (1 + |K|)
};

// Double contour quadrature of the (beta, alpha) kernel on a grid of (eta, zeta).
KernelBlock kernel_matrix(int beta, int alpha, const Eigen::VectorXd& etas, const Eigen::VectorXd& zetas,
                          const OracleProblem& prob, const OracleContours& contours);
double kernel_K(int beta, int alpha, double eta, double zeta, const OracleProblem& prob,
                const OracleContours& contours);

struct HJValue {
    cplx h;
    cplx j;
};

// H1 at eta and J1 at zeta from single contour quadratures.
HJValue H1_J1(double eta, double zeta, const OracleProblem& prob, const OracleContours& contours);

// -int_0^inf H1(y - eta) J1(y - zeta) dy
double factorized_K11(double eta, double zeta, const OracleProblem& prob, const OracleContours& contours,
                      int nodes = 160);

struct OracleOptions {
    int interval_nodes = 40;
    int tail_nodes = 48;
    double tail_scale = 0;  // 0 picks a scale from the problem
    double W = 1.0;
    bool check_convergence = true;
    double convergence_tol = 1e-8;
};

struct OracleReport {
    double value = 0;
    double raw_value = 0;
    bool clamped = false;
    double doubling_error = 0;
    double imag_residual = 0;
    OracleProblem problem;
    OracleContours contours;
    OracleOptions options;
};

inline constexpr int oracle_max_N = 16;
inline constexpr int oracle_max_M = 64;

// P(lambda_min >= xi1).
OracleReport gap_probability_min(const OracleProblem& prob, const OracleOptions& opt = {});
OracleReport gap_probability_min(const OracleProblem& prob, const OracleContours& contours,
                                 const OracleOptions& opt = {});
// P(xi1 <= lambda_min <= lambda_max <= xi2).
OracleReport gap_probability_joint(const OracleProblem& prob, const OracleOptions& opt = {});
OracleReport gap_probability_joint(const OracleProblem& prob, const OracleContours& contours,
                                   const OracleOptions& opt = {});

}  // namespace spiked
