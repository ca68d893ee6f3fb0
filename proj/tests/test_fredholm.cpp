#include <doctest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <random>

#include "spiked/errors.hpp"
#include "spiked/fredholm.hpp"
#include "spiked/special_functions.hpp"

using namespace spiked;

namespace {

double airy_det(double s, int n) {
    const QuadratureRule rule = semi_infinite_rule(s, 10.0, n);
    return fredholm_det(discretize([](double u, double v) { return airy_kernel(u, v); }, rule, "airy"));
}

Eigen::MatrixXd contraction(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    return 0.2 * a / a.operatorNorm();
}

}  // namespace

TEST_CASE("quadrature rules") {
    const QuadratureRule r = interval_rule(0.0, 1.0, 16);
    CHECK(r.size() == 16);
    for (int i = 0; i < r.size(); ++i) CHECK(r.weights(i) > 0);
    for (int i = 1; i < r.size(); ++i) CHECK(r.nodes(i) > r.nodes(i - 1));
    CHECK(r.integrate([](double x) { return std::pow(x, 9); }) == doctest::Approx(0.1).epsilon(1e-14));
    const QuadratureRule s = semi_infinite_rule(0.0, 10.0, 64);
    for (int i = 1; i < s.size(); ++i) CHECK(s.nodes(i) > s.nodes(i - 1));
    CHECK(s.integrate([](double x) { return std::exp(-x); }) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(interval_rule(0.0, 1.0, 3), DomainError);
}

TEST_CASE("discretize") {
    const QuadratureRule r = interval_rule(0.0, 1.0, 20);
    const DiscretizedOperator zero = discretize([](double, double) { return 0.0; }, r);
    CHECK(zero.matrix.isZero(0.0));
    CHECK(fredholm_det(zero) == 1.0);

    const DiscretizedOperator rank1 =
        discretize([](double u, double v) { return std::exp(-u) * std::cos(v); }, r, "separable");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rank1.matrix);
    CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));

    const DiscretizedOperator sym = discretize([](double u, double v) { return airy_kernel(u, v); },
                                               semi_infinite_rule(-1.0, 10.0, 40));
    CHECK((sym.matrix - sym.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sym.matrix.rows() == 40);

    CHECK_THROWS_AS(discretize([](double u, double) { return u > 0.5 ? NAN : 0.0; }, r), KernelEvaluationError);
    try {
        discretize([](double u, double) -> double {
            if (u > 0.5) throw DomainError("boom");
            return 0.0;
        }, r);
        FAIL("expected an exception");
    } catch (const KernelEvaluationError& e) {
        CHECK(r.nodes(e.row) > 0.5);
    }
}

TEST_CASE("Fredholm determinants") {
    const QuadratureRule r = interval_rule(0.0, 1.0, 20);
    CHECK(std::abs(fredholm_det(discretize([](double, double) { return 1.0; }, r))) < 1e-10);
    // rank one: det = 1 - <phi, phi>
    const double c = fredholm_det(discretize([](double u, double v) { return 0.5 * u * v; }, r));
    CHECK(c == doctest::Approx(1 - 0.5 / 3).epsilon(1e-13));

    CHECK(std::abs(airy_det(0.0, 40) - airy_det(0.0, 80)) < 1e-8);
    CHECK(std::abs(airy_det(-2.0, 64) - airy_det(-2.0, 128)) < 1e-8);
    double prev = 0;
    for (double s = -6; s <= 4; s += 0.5) {
        const double d = airy_det(s, 64);
        CHECK(d >= prev);
        prev = d;
    }

    // weighting w_i K_ij gives the same determinant as the symmetric weighting
    const QuadratureRule a = semi_infinite_rule(-1.0, 10.0, 48);
    const DiscretizedOperator op = discretize([](double u, double v) { return airy_kernel(u, v); }, a);
    Eigen::MatrixXd raw(48, 48);
    for (int i = 0; i < 48; ++i)
        for (int j = 0; j < 48; ++j) raw(i, j) = a.weights(i) * airy_kernel(a.nodes(i), a.nodes(j));
    CHECK(std::abs(fredholm_det(raw) - fredholm_det(op)) < 1e-10);
}

TEST_CASE("scaled determinant error on overflow") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(200, 200) * -1e4;
    CHECK_THROWS_AS(fredholm_det(m), ScaledDeterminantError);
    try {
        fredholm_det(m);
    } catch (const ScaledDeterminantError& e) {
        CHECK(e.log_abs_det == doctest::Approx(200 * std::log(1e4 + 1)).epsilon(1e-12));
    }
}

TEST_CASE("resolvent") {
    const QuadratureRule r = interval_rule(0.0, 1.0, 24);
    Eigen::VectorXd f(24);
    for (int i = 0; i < 24; ++i) f(i) = std::sin(r.nodes(i));
    const Eigen::VectorXd same = resolvent_apply(discretize([](double, double) { return 0.0; }, r), f);
    CHECK((same - f).cwiseAbs().maxCoeff() < 1e-14);

    // phi(x) = x, <phi, phi> = 1/3, (I - phi phi^T)^{-1} phi = phi / (1 - 1/3)
    Eigen::VectorXd phi = r.nodes;
    const Eigen::VectorXd res = resolvent_apply(discretize([](double u, double v) { return u * v; }, r), phi);
    CHECK((res - 1.5 * phi).cwiseAbs().maxCoeff() < 1e-9);

    CHECK_THROWS_AS(resolvent_apply(discretize([](double, double) { return 1.0; }, r), f), SingularityError);

    // Airy kernel applied to s^(1): stable under node doubling at a common point
    auto value_at_zero = [](int n) {
        const QuadratureRule q = semi_infinite_rule(-1.0, 10.0, n);
        const DiscretizedOperator op = discretize([](double u, double v) { return airy_kernel(u, v); }, q);
        Eigen::VectorXd s1(n), ai(n);
        for (int i = 0; i < n; ++i) {
            s1(i) = s_m(1, q.nodes(i));
            ai(i) = airy_ai(q.nodes(i));
        }
        return inner_product(q, resolvent_apply(op, s1), ai);
    };
    CHECK(std::abs(value_at_zero(48) - value_at_zero(96)) < 1e-7);
}

TEST_CASE("inner products") {
    const QuadratureRule r = interval_rule(0.0, 1.0, 12);
    CHECK(inner_product(r, Eigen::VectorXd::Zero(12), Eigen::VectorXd::Zero(12)) == 0.0);
    CHECK(inner_product(r, Eigen::VectorXd::Ones(12), Eigen::VectorXd::Ones(12)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(inner_product(r, Eigen::VectorXd::Ones(11), Eigen::VectorXd::Ones(12)), DomainError);
    const QuadratureRule s = semi_infinite_rule(0.0, 10.0, 64);
    Eigen::VectorXd ai(64);
    for (int i = 0; i < 64; ++i) ai(i) = boost::math::airy_ai(s.nodes(i));
    CHECK(std::abs(inner_product(s, ai, ai) - airy_kernel(0, 0)) < 1e-8);
}

TEST_CASE("2x2 block determinants") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd a = contraction(6, rng), d = contraction(4, rng);
    const Eigen::MatrixXd b = contraction(6, rng).leftCols(4), c = contraction(6, rng).topRows(4);
    CHECK(block_det_2x2(a, Eigen::MatrixXd::Zero(6, 4), Eigen::MatrixXd::Zero(4, 6), d) ==
          doctest::Approx(fredholm_det(a) * fredholm_det(d)).epsilon(1e-12));
    CHECK(block_det_2x2(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(2, 3),
                        Eigen::MatrixXd::Zero(2, 2)) == 1.0);
    Eigen::MatrixXd full(10, 10);
    full << a, b, c, d;
    const double dense = (Eigen::MatrixXd::Identity(10, 10) - full).determinant();
    CHECK(std::abs(block_det_2x2(a, b, c, d) - dense) < 1e-12);
    CHECK_THROWS_AS(block_det_2x2(a, c, b, d), DomainError);
}
