#include <doctest.h>

#include <cmath>

#include "spiked/errors.hpp"
#include "spiked/scaled_kernels.hpp"
#include "spiked/special_functions.hpp"

using namespace spiked;

namespace {

SpikedModel at(int M, std::vector<Spike> spikes = {}) { return SpikedModel::from_dimensions(M / 4, M, std::move(spikes)); }

double err(int M, std::vector<Spike> spikes, double u = 1.0) {
    return scaled_kernel_limit_check(at(M, std::move(spikes)), 0.0, {u}, {u}).max_error();
}

}  // namespace

TEST_CASE("regime detection and constants") {
    const ScaledCheckReport null = scaled_kernel_limit_check(at(256), 0.0, {1.0}, {1.0});
    CHECK(null.case_id == 1);
    CHECK(null.k == 0);
    CHECK(null.p == doctest::Approx(2.0));
    CHECK(null.mu == doctest::Approx(0.25));
    CHECK(null.nu == doctest::Approx(0.5));
    CHECK(null.q > null.p);
    CHECK(null.h_rows.size() == 1u);
    CHECK(null.j_rows.size() == 1u);

    const ScaledCheckReport crit = scaled_kernel_limit_check(at(256, {{0.5, 1}}), 0.0, {1.0}, {1.0});
    CHECK(crit.case_id == 1);
    CHECK(crit.k == 1);

    const ScaledCheckReport sup = scaled_kernel_limit_check(at(256, {{0.25, 2}}), 0.0, {1.0}, {1.0});
    CHECK(sup.case_id == 2);
    CHECK(sup.k == 2);
    CHECK(sup.p == doctest::Approx(4.0));
    CHECK(sup.mu == doctest::Approx(1.0 / 6));
    CHECK(sup.nu == doctest::Approx(std::sqrt(5.0) / 12));
}

TEST_CASE("limits are approached") {
    // rows report the limit functions evaluated at x + u
    const ScaledCheckReport r = scaled_kernel_limit_check(at(2048), 0.5, {0.0, 1.0}, {0.5});
    CHECK(r.h_rows[1].s == 1.5);
    CHECK(r.j_rows[0].s == 1.0);
    CHECK(std::abs(r.h_rows[1].limit - h_inf_case1(0, 1.5, r.eps)) == 0.0);
    CHECK(r.max_error() < 0.05);
    CHECK(scaled_kernel_limit_check(at(2048, {{0.25, 1}}), 0.0, {1.0}, {1.0}).max_error() < 0.05);
}

TEST_CASE("convergence rates") {
    const double null_ratio = err(2048, {}) / err(256, {});
    CHECK(null_ratio >= 0.3);
    CHECK(null_ratio <= 0.6);
    const double crit_ratio = err(2048, {{0.5, 1}}) / err(256, {{0.5, 1}});
    CHECK(crit_ratio >= 0.3);
    CHECK(crit_ratio <= 0.6);
    const double sup_ratio = err(2048, {{0.25, 1}}) / err(256, {{0.25, 1}});
    CHECK(sup_ratio >= 0.2);
    CHECK(sup_ratio <= 0.6);

    for (const std::vector<Spike>& s : {std::vector<Spike>{}, std::vector<Spike>{{0.25, 1}}})
        CHECK(err(256, s, 4.0) < err(256, s, 0.0));
}

TEST_CASE("off-diagonal kernels shrink") {
    const OffDiagonalReport a = offdiagonal_check(64, 2.0, 0, 0, 1, 1), b = offdiagonal_check(512, 2.0, 0, 0, 1, 1);
    CHECK(a.M == 64);
    CHECK(b.k12 < a.k12);
    CHECK(b.k21 < a.k21);
    CHECK_THROWS_AS(offdiagonal_check(63, 2.0, 0, 0, 1, 1), DomainError);
    CHECK_THROWS_AS(offdiagonal_check(64, 1.0, 0, 0, 1, 1), DomainError);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(scaled_kernel_limit_check(at(256), 0.0, {1.0}, {1.0}, 0.0), DomainError);
    // a second supercritical spike next to the saddle leaves no room for the small circle
    CHECK_THROWS_AS(scaled_kernel_limit_check(at(256, {{0.25, 1}, {0.2501, 1}}), 0.0, {1.0}, {1.0}),
                    InvalidContourError);
}
