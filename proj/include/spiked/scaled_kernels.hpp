#pragma once

#include <complex>
#include <vector>

#include "spiked/limiting_laws.hpp"

namespace spiked {

using cplx = std::complex<double>;

struct ScaledPoint {
    double s;  // x + u or x + v
    cplx finite;
    cplx limit;
    double error;
};

struct ScaledCheckReport {
    int case_id = 1;  // 1: critical (Airy scale), 2: supercritical (Gaussian scale)
    int M = 0;
    int k = 0;
    double p = 0, q = 0, mu = 0, nu = 0, eps = 0;
    std::vector<ScaledPoint> h_rows;
    std::vector<ScaledPoint> j_rows;

    double max_error() const;
};

inline constexpr double default_saddle_eps = 0.5;

// Normalized min-side kernel factors of the finite model against their M -> inf limits.
ScaledCheckReport scaled_kernel_limit_check(const SpikedModel& model, double x, const std::vector<double>& us,
                                            const std::vector<double>& vs, double eps = default_saddle_eps);

struct OffDiagonalReport {
    int M = 0;
    double k12 = 0;  // |W^{-1} K12(u, v)| after the edge scalings
    double k21 = 0;  // |W K21(u, v)|
};

// Null model with M samples and N = M / gamma^2 (must be an integer).
OffDiagonalReport offdiagonal_check(int M, double gamma, double x, double y, double u, double v,
                                    double eps = default_saddle_eps);

}  // namespace spiked
