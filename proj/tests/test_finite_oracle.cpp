#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "spiked/errors.hpp"
#include "spiked/finite_oracle.hpp"

using namespace spiked;

namespace {

// Null complex Wishart: P(a <= all eigenvalues <= b) as a ratio of moment determinants.
double null_box_probability(int N, int M, double a, double b) {
    Eigen::MatrixXd num(N, N), den(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const double s = i + j + M - N + 1;
            const double q_b = std::isfinite(b) ? boost::math::gamma_q(s, M * b) : 0.0;
            // common factor Gamma(s) M^-s scaled out by rows and columns in the ratio
            const double scale = std::exp(std::lgamma(s) - s * std::log(static_cast<double>(M)) -
                                          std::lgamma(i + M - N + 1.0) - std::lgamma(j + 1.0));
            num(i, j) = scale * (boost::math::gamma_q(s, M * a) - q_b);
            den(i, j) = scale;
        }
    return num.determinant() / den.determinant();
}

}  // namespace

TEST_CASE("one-dimensional gap probabilities are incomplete gamma values") {
    for (double xi : {0.5, 1.0, 1.5}) {
        const OracleReport r = gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(1, 20), xi));
        CHECK(std::abs(r.value - boost::math::gamma_q(20.0, 20.0 * xi)) < 1e-8);
        CHECK(r.doubling_error < 1e-8);
    }
    CHECK(gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(1, 20), 1.0)).value ==
          doctest::Approx(0.4703).epsilon(1e-4));
    // a single spiked coordinate scales the gamma variable
    for (double ell : {0.5, 2.0}) {
        const SpikedModel m = SpikedModel::from_dimensions(1, 12, {{ell, 1}});
        const double xi = 0.8 * ell;
        CHECK(std::abs(gap_probability_min(OracleProblem::make(m, xi)).value - boost::math::gamma_q(12.0, 12.0 * xi / ell)) <
              1e-8);
    }
}

TEST_CASE("null gap probabilities against moment determinants") {
    const SpikedModel m = SpikedModel::from_dimensions(3, 12);
    for (double xi : {0.2, 0.35}) {
        CHECK(std::abs(gap_probability_min(OracleProblem::make(m, xi)).value - null_box_probability(3, 12, xi, INFINITY)) <
              1e-8);
    }
    CHECK(std::abs(gap_probability_joint(OracleProblem::make(m, 0.3, 2.0)).value - null_box_probability(3, 12, 0.3, 2.0)) <
          1e-8);
    CHECK(std::abs(gap_probability_min(OracleProblem::make(m, 1e-8)).value - 1) < 1e-6);
    CHECK(std::abs(gap_probability_joint(OracleProblem::make(m, 1e-8, 50.0)).value - 1) < 1e-5);
}

TEST_CASE("invariances") {
    const SpikedModel m = SpikedModel::from_dimensions(3, 12, {{0.5, 1}, {2.0, 1}});
    const OracleProblem base = OracleProblem::make(m, 0.3);
    const double v = gap_probability_min(base).value;
    for (const auto& [q1, q2] : {std::pair{1.2 * base.pi_max(), 0.8 * base.pi_min()},
                                 std::pair{3.0 * base.pi_max(), 0.2 * base.pi_min()},
                                 std::pair{2.0 * base.pi_max(), 0.5 * base.pi_min()}})
        CHECK(std::abs(gap_probability_min(OracleProblem::make(m, 0.3, INFINITY, q1, q2)).value - v) < 1e-8);

    const OracleProblem joint = OracleProblem::make(m, 0.3, 2.5);
    const double j1 = gap_probability_joint(joint).value;
    for (double w : {10.0, 1000.0}) {
        OracleOptions o;
        o.W = w;
        CHECK(std::abs(gap_probability_joint(joint, o).value - j1) < 1e-9);
    }

    // factorization defect shrinks as both cut points leave the spectrum
    const SpikedModel n = SpikedModel::from_dimensions(2, 8);
    double prev = 1;
    for (const auto& [a, b] : {std::pair{0.25, 2.0}, std::pair{0.1, 3.0}, std::pair{0.03, 4.5}}) {
        const double both = gap_probability_joint(OracleProblem::make(n, a, b)).value;
        const double lower = gap_probability_min(OracleProblem::make(n, a)).value;
        const double upper = gap_probability_joint(OracleProblem::make(n, 1e-10, b)).value;
        const double defect = std::abs(both - lower * upper);
        CHECK(defect < prev);
        prev = defect;
    }
}

TEST_CASE("kernel evaluations") {
    const SpikedModel m = SpikedModel::from_dimensions(1, 8);
    const OracleProblem prob = OracleProblem::make(m, 0.5);
    const OracleContours c = OracleContours::defaults(prob);
    for (const auto& [eta, zeta] : {std::pair{0.2, 0.3}, std::pair{0.5, 0.1}})
        CHECK(std::abs(factorized_K11(eta, zeta, prob, c) - kernel_K(1, 1, eta, zeta, prob, c)) < 1e-8);

    double prev = INFINITY;
    for (double eta : {0.1, 0.3, 0.6, 1.0}) {
        const double h = std::abs(H1_J1(eta, 0.0, prob, c).h);
        CHECK(h < prev);
        prev = h;
    }

    const SpikedModel s = SpikedModel::from_dimensions(3, 12, {{0.5, 1}});
    const OracleProblem ps = OracleProblem::make(s, 0.3, 2.0);
    const OracleContours cs = OracleContours::defaults(ps);
    // index 1 lives on (0, xi1), index 2 on (xi2, inf)
    const Eigen::VectorXd inner = Eigen::VectorXd::LinSpaced(4, 0.05, 0.3);
    const Eigen::VectorXd outer = Eigen::VectorXd::LinSpaced(4, 2.0, 3.5);
    for (int beta : {1, 2})
        for (int alpha : {1, 2}) {
            const Eigen::VectorXd& e = beta == 1 ? inner : outer;
            const Eigen::VectorXd& z = alpha == 1 ? inner : outer;
            const KernelBlock a = kernel_matrix(beta, alpha, e, z, ps, cs);
            const KernelBlock b = kernel_matrix(beta, alpha, e, z, ps, cs.doubled());
            CHECK(a.imag_residual < 1e-8);
            CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-9 * (1 + a.values.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("oracle guards and contour validation") {
    CHECK_THROWS_AS(gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(17, 40), 0.3)),
                    OutOfScaleError);
    CHECK_THROWS_AS(gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(4, 65), 0.3)),
                    OutOfScaleError);
    CHECK_THROWS_AS(OracleProblem::make(SpikedModel::from_dimensions(2, 8), 0.5, 0.4), DomainError);
    CHECK_THROWS_AS(OracleProblem::make(SpikedModel::from_dimensions(2, 8), 0.5, INFINITY, 0.5, 0.5), DomainError);

    const OracleProblem prob = OracleProblem::make(SpikedModel::from_dimensions(2, 8, {{0.5, 1}}), 0.3);
    const OracleContours good = OracleContours::defaults(prob);
    CHECK_NOTHROW(good.validate(prob));

    OracleContours bad = good;
    bad.gamma.x_hi = 0.5 * (prob.pi_max() + prob.pi_min());
    CHECK_THROWS_AS(bad.validate(prob), InvalidContourError);
    bad = good;
    bad.gamma.x_lo = 0.5 * prob.q2;
    CHECK_THROWS_AS(bad.validate(prob), InvalidContourError);
    bad = good;
    bad.sigma1.abscissa = 0.5 * prob.q1;
    CHECK_THROWS_AS(bad.validate(prob), InvalidContourError);
    bad = good;
    bad.sigma2.radius = 2 * prob.q2;
    CHECK_THROWS_AS(bad.validate(prob), InvalidContourError);
    bad = good;
    bad.gamma.nodes = 2;
    CHECK_THROWS_AS(gap_probability_min(prob, bad), InvalidContourError);
    CHECK_THROWS_AS(gap_probability_min(OracleProblem::make(SpikedModel::from_dimensions(2, 8), 0.0)), DomainError);
}
