#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "spiked/quadrature.hpp"

namespace spiked {

using cplx = std::complex<double>;

struct AiryPair {
    double ai;
    double aip;
};

AiryPair airy(double u);
double airy_ai(double u);
double airy_ai_prime(double u);

// Ai^{(j)}(u) for j >= 0 via Ai'' = u Ai.
double airy_derivative(int j, double u);

// Polyline contour in the a-plane for Airy-type integrals.
struct AiryContour {
    std::vector<cplx> vertices;
    int nodes_per_segment = 400;

    // Two rays leaving -i*dip at angles 5pi/6 and pi/6, each of length radius.
    static AiryContour lower(double dip = 1.0, double radius = 12.0, int nodes = 400);
    // Same rays leaving +i*height; passes above the origin.
    static AiryContour upper(double height, double radius = 12.0, int nodes = 400);

    bool passes_below_origin() const;
    // Throws InvalidContourError unless the ends lie in the decay sectors.
    void validate() const;

    void nodes(std::vector<cplx>& a, std::vector<cplx>& da) const;
};

struct ContourValue {
    double value;
    double imag_residual;
};

// (1/2pi) int e^{iua + ia^3/3} (ia)^{-m} da along the contour; m >= 0.
ContourValue s_m_contour(int m, double u, const AiryContour& contour);
// (1/2pi) int e^{iva + ia^3/3} (-ia)^{m-1} da; m >= 1.
ContourValue t_m_contour(int m, double v, const AiryContour& contour);

// Lower contour for u <= 1, otherwise residue polynomial plus an upper contour.
double s_m(int m, double u);
// s_m(1..kmax, u) sharing one contour pass.
std::vector<double> s_m_all(int kmax, double u);
// (-1)^{m-1} Ai^{(m-1)}(v).
double t_m(int m, double v);

// Polynomial part picked up when the contour crosses the origin.
double s_m_residue(int m, double u);

double airy_kernel(double u, double v);
double airy_kernel(double u, double v, const AiryPair& pu, const AiryPair& pv);

// Probabilists' Hermite polynomial by three-term recurrence.
template <typename Scalar>
Scalar hermite_he(int n, Scalar x) {
    if (n < 0) throw DomainError("hermite_he: negative degree");
    Scalar h0 = Scalar(1);
    if (n == 0) return h0;
    Scalar h1 = x;
    for (int k = 1; k < n; ++k) {
        Scalar h2 = x * h1 - Scalar(k) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Limits of the normalized Gaussian-regime kernel factors.
cplx h_inf_case2(int k, double u, double eps);
cplx j_inf_case2(int k, double v, double eps);

// Limits of the normalized Airy-regime kernel factors, by contour quadrature.
cplx h_inf_case1(int k, double u, double eps);
cplx j_inf_case1(int k, double v, double eps);

}  // namespace spiked
