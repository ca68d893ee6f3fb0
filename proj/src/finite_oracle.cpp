#include "spiked/finite_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiked/errors.hpp"

namespace spiked {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

struct PiGroup {
    double value;
    int count;
};

std::vector<PiGroup> group_pis(const std::vector<double>& pis) {
    std::vector<PiGroup> g;
    for (double p : pis) {
        auto it = std::find_if(g.begin(), g.end(), [&](const PiGroup& q) { return q.value == p; });
        if (it != g.end())
            ++it->count;
        else
            g.push_back({p, 1});
    }
    return g;
}

// M log z - sum log(z - pi)
cplx log_phi_z(cplx z, int M, const std::vector<PiGroup>& groups) {
    cplx s = static_cast<double>(M) * std::log(z);
    for (const PiGroup& g : groups) s -= static_cast<double>(g.count) * std::log(z - g.value);
    return s;
}

void check_scale(const OracleProblem& prob) {
    if (prob.model.N > oracle_max_N || prob.model.M > oracle_max_M)
        throw OutOfScaleError("finite oracle is limited to N <= 16 and M <= 64");
}

double clamp_flag(double v, bool& clamped) {
    if (!std::isfinite(v)) throw NumericalFailure("oracle determinant is not finite");
    if (v < -1e-8 || v > 1 + 1e-8)
        throw NumericalFailure("oracle determinant " + std::to_string(v) + " outside [0, 1] beyond tolerance");
    const double c = std::clamp(v, 0.0, 1.0);
    clamped = c != v;
    return c;
}

}  // namespace

ContourNodes ContourSpec::discretize() const {
    ContourNodes out;
    if (nodes < 4) throw InvalidContourError("contour needs at least four nodes");
    switch (kind) {
        case Kind::GammaLoop: {
            const int per = nodes / 4;
            const auto& [t, w] = cached_gauss_legendre(per);
            const cplx corners[5] = {{x_lo, -half_height}, {x_hi, -half_height}, {x_hi, half_height},
                                     {x_lo, half_height}, {x_lo, -half_height}};
            for (int s = 0; s < 4; ++s) {
                const cplx a = corners[s], b = corners[s + 1];
                const cplx half = 0.5 * (b - a);
                for (int i = 0; i < per; ++i) {
                    out.z.push_back(a + half * (1 + t(i)));
                    out.dz.push_back(half * w(i));
                }
            }
            break;
        }
        case Kind::Sigma1VerticalLine: {
            // w = A + i c sinh(s) clusters nodes near the real axis
            const double c = abscissa;
            const double S = std::asinh(height / c);
            const int per = 16;
            const int panels = std::max(1, nodes / per);
            const auto& [t, w] = cached_gauss_legendre(per);
            const double width = 2 * S / panels;
            for (int p = 0; p < panels; ++p) {
                for (int i = 0; i < per; ++i) {
                    const double s = -S + width * (p + 0.5 * (1 + t(i)));
                    out.z.push_back(cplx(abscissa, c * std::sinh(s)));
                    out.dz.push_back(I * c * std::cosh(s) * 0.5 * width * w(i));
                }
            }
            break;
        }
        case Kind::Sigma2Circle: {
            for (int k = 0; k < nodes; ++k) {
                const cplx e = std::polar(radius, 2 * pi * k / nodes);
                out.z.push_back(e);
                out.dz.push_back(I * e * (2 * pi / nodes));
            }
            break;
        }
    }
    return out;
}

ContourSpec ContourSpec::doubled() const {
    ContourSpec c = *this;
    c.nodes *= 2;
    if (kind == Kind::Sigma1VerticalLine) c.height *= 2;
    return c;
}

OracleProblem OracleProblem::make(const SpikedModel& model, double xi1, double xi2, double q1, double q2) {
    OracleProblem p;
    p.model = model;
    for (double ell : model.population()) p.pis.push_back(1 / ell);
    p.xi1 = xi1;
    p.xi2 = xi2;
    p.q1 = std::isnan(q1) ? 1.5 * p.pi_max() : q1;
    p.q2 = std::isnan(q2) ? 0.5 * p.pi_min() : q2;
    if (!(p.q2 > 0 && p.q2 < p.pi_min() && p.pi_max() < p.q1))
        throw DomainError("OracleProblem: require 0 < q2 < min pi <= max pi < q1");
    if (!(xi1 >= 0 && xi2 > xi1)) throw DomainError("OracleProblem: require 0 <= xi1 < xi2");
    return p;
}

double OracleProblem::pi_min() const { return *std::min_element(pis.begin(), pis.end()); }
double OracleProblem::pi_max() const { return *std::max_element(pis.begin(), pis.end()); }

OracleContours OracleContours::defaults(const OracleProblem& prob, int gamma_nodes, int sigma1_nodes,
                                        int sigma2_nodes) {
    OracleContours c;
    const double pmin = prob.pi_min(), pmax = prob.pi_max();
    c.gamma.kind = ContourSpec::Kind::GammaLoop;
    c.gamma.x_lo = pmin - 0.5 * (pmin - prob.q2);
    c.gamma.x_hi = pmax + 0.5 * (prob.q1 - pmax);
    c.gamma.half_height = 0.5 * (c.gamma.x_hi - c.gamma.x_lo);
    c.gamma.nodes = gamma_nodes;

    c.sigma1.kind = ContourSpec::Kind::Sigma1VerticalLine;
    c.sigma1.abscissa = prob.q1 + 0.25 * (prob.q1 - pmax);
    const int decay = prob.model.M - prob.model.N + 1;
    c.sigma1.height = c.sigma1.abscissa * std::min(std::pow(10.0, 18.0 / decay), 1e6);
    c.sigma1.nodes = sigma1_nodes;

    c.sigma2.kind = ContourSpec::Kind::Sigma2Circle;
    c.sigma2.radius = 0.5 * prob.q2;
    c.sigma2.nodes = sigma2_nodes;
    c.validate(prob);
    return c;
}

void OracleContours::validate(const OracleProblem& prob) const {
    if (!(gamma.x_lo > prob.q2 && gamma.x_hi < prob.q1))
        throw InvalidContourError("Gamma loop leaves the strip q2 < Re z < q1");
    if (!(gamma.x_lo < prob.pi_min() && gamma.x_hi > prob.pi_max() && gamma.half_height > 0))
        throw InvalidContourError("Gamma loop does not enclose every pi");
    if (!(sigma1.abscissa > prob.q1)) throw InvalidContourError("Sigma1 abscissa must exceed q1");
    if (!(sigma1.height > sigma1.abscissa)) throw InvalidContourError("Sigma1 truncation height too small");
    if (!(sigma2.radius > 0 && sigma2.radius < prob.q2))
        throw InvalidContourError("Sigma2 radius must lie in (0, q2)");
}

OracleContours OracleContours::doubled() const {
    OracleContours c = *this;
    c.gamma = gamma.doubled();
    c.sigma1 = sigma1.doubled();
    c.sigma2 = sigma2.doubled();
    return c;
}

KernelBlock kernel_matrix(int beta, int alpha, const Eigen::VectorXd& etas, const Eigen::VectorXd& zetas,
                          const OracleProblem& prob, const OracleContours& contours) {
    if ((beta != 1 && beta != 2) || (alpha != 1 && alpha != 2)) throw DomainError("kernel: beta, alpha in {1, 2}");
    contours.validate(prob);
    const int M = prob.model.M;
    const auto groups = group_pis(prob.pis);
    const double qb = beta == 1 ? prob.q1 : prob.q2;
    const double qa = alpha == 1 ? prob.q1 : prob.q2;
    const ContourNodes zc = contours.gamma.discretize();
    const ContourNodes wc = (alpha == 1 ? contours.sigma1 : contours.sigma2).discretize();
    const int nz = static_cast<int>(zc.z.size()), nw = static_cast<int>(wc.z.size());

    Eigen::MatrixXcd ez(etas.size(), nz), ew(zetas.size(), nw), r(nz, nw);
    for (int a = 0; a < nz; ++a) {
        const cplx lz = log_phi_z(zc.z[a], M, groups);
        for (int i = 0; i < etas.size(); ++i)
            ez(i, a) = std::exp(-etas(i) * M * (zc.z[a] - qb) + lz) * zc.dz[a];
    }
    for (int b = 0; b < nw; ++b) {
        const cplx lw = -log_phi_z(wc.z[b], M, groups);
        for (int j = 0; j < zetas.size(); ++j)
            ew(j, b) = std::exp(zetas(j) * M * (wc.z[b] - qa) + lw) * wc.dz[b];
    }
    for (int a = 0; a < nz; ++a)
        for (int b = 0; b < nw; ++b) r(a, b) = 1.0 / (wc.z[b] - zc.z[a]);
    const Eigen::MatrixXcd k = (-static_cast<double>(M) / (4 * pi * pi)) * (ez * r * ew.transpose());
    if (!k.allFinite()) throw ScaledDeterminantError("kernel quadrature overflowed", INFINITY);
    KernelBlock out;
    out.values = k.real();
    out.imag_residual = (k.imag().array().abs() / (1 + k.real().array().abs())).maxCoeff();
    return out;
}

double kernel_K(int beta, int alpha, double eta, double zeta, const OracleProblem& prob,
                const OracleContours& contours) {
    Eigen::VectorXd e(1), z(1);
    e << eta;
    z << zeta;
    const KernelBlock b = kernel_matrix(beta, alpha, e, z, prob, contours);
    if (b.imag_residual > 1e-8) throw NumericalFailure("kernel_K: imaginary residual above 1e-8");
    return b.values(0, 0);
}

HJValue H1_J1(double eta, double zeta, const OracleProblem& prob, const OracleContours& contours) {
    contours.validate(prob);
    const int M = prob.model.M;
    const auto groups = group_pis(prob.pis);
    const ContourNodes zc = contours.gamma.discretize();
    const ContourNodes wc = contours.sigma1.discretize();
    HJValue v{0.0, 0.0};
    for (std::size_t a = 0; a < zc.z.size(); ++a)
        v.h += std::exp(eta * M * (zc.z[a] - prob.q1) + log_phi_z(zc.z[a], M, groups)) * zc.dz[a];
    for (std::size_t b = 0; b < wc.z.size(); ++b)
        v.j += std::exp(-zeta * M * (wc.z[b] - prob.q1) - log_phi_z(wc.z[b], M, groups)) * wc.dz[b];
    v.h *= M / (2 * pi);
    v.j *= M / (2 * pi);
    return v;
}

double factorized_K11(double eta, double zeta, const OracleProblem& prob, const OracleContours& contours,
                      int nodes) {
    const double rate = prob.model.M * std::min(prob.q1 - contours.gamma.x_hi, contours.sigma1.abscissa - prob.q1);
    const QuadratureRule rule = semi_infinite_rule(0.0, 2.0 / rate, nodes);
    cplx s = 0;
    for (int i = 0; i < rule.size(); ++i) {
        const double y = rule.nodes(i);
        const HJValue hj = H1_J1(y - eta, y - zeta, prob, contours);
        s += rule.weights(i) * hj.h * hj.j;
    }
    return -s.real();
}

namespace {

double tail_scale(const OracleProblem& prob, const OracleOptions& opt) {
    if (opt.tail_scale > 0) return opt.tail_scale;
    return std::max(0.5 * prob.xi2, 2.0 / (prob.model.M * std::min(prob.q2, prob.pi_min() - prob.q2)));
}

struct JointValue {
    double det;
    double imag;
};

JointValue min_det(const OracleProblem& prob, const OracleContours& c, int n) {
    const QuadratureRule rule = interval_rule(0.0, prob.xi1, n);
    const KernelBlock k = kernel_matrix(1, 1, rule.nodes, rule.nodes, prob, c);
    return {fredholm_det(weight_kernel_matrix(k.values, rule, rule)), k.imag_residual};
}

JointValue joint_det(const OracleProblem& prob, const OracleContours& c, int n1, int n2, const OracleOptions& opt) {
    const QuadratureRule r2 = semi_infinite_rule(prob.xi2, tail_scale(prob, opt), n2);
    const KernelBlock k22 = kernel_matrix(2, 2, r2.nodes, r2.nodes, prob, c);
    const Eigen::MatrixXd w22 = weight_kernel_matrix(k22.values, r2, r2);
    if (prob.xi1 <= 0) return {fredholm_det(w22), k22.imag_residual};
    const QuadratureRule r1 = interval_rule(0.0, prob.xi1, n1);
    const KernelBlock k11 = kernel_matrix(1, 1, r1.nodes, r1.nodes, prob, c);
    const KernelBlock k12 = kernel_matrix(1, 2, r1.nodes, r2.nodes, prob, c);
    const KernelBlock k21 = kernel_matrix(2, 1, r2.nodes, r1.nodes, prob, c);
    const double d = block_det_2x2(weight_kernel_matrix(k11.values, r1, r1),
                                   weight_kernel_matrix(k12.values, r1, r2) / opt.W,
                                   weight_kernel_matrix(k21.values, r2, r1) * opt.W, w22);
    return {d, std::max({k11.imag_residual, k12.imag_residual, k21.imag_residual, k22.imag_residual})};
}

}  // namespace

OracleReport gap_probability_min(const OracleProblem& prob, const OracleContours& contours, const OracleOptions& opt) {
    check_scale(prob);
    if (!(prob.xi1 > 0)) throw DomainError("gap_probability_min: xi1 must be positive");
    OracleReport r{.problem = prob, .contours = contours, .options = opt};
    const JointValue v = min_det(prob, contours, opt.interval_nodes);
    r.raw_value = v.det;
    r.imag_residual = v.imag;
    if (opt.check_convergence) {
        const JointValue v2 = min_det(prob, contours.doubled(), 2 * opt.interval_nodes);
        r.doubling_error = std::abs(v2.det - v.det);
        if (r.doubling_error > opt.convergence_tol)
            throw ConvergenceError("gap_probability_min: node doubling changed the value", r.doubling_error);
    }
    r.value = clamp_flag(r.raw_value, r.clamped);
    return r;
}

OracleReport gap_probability_min(const OracleProblem& prob, const OracleOptions& opt) {
    return gap_probability_min(prob, OracleContours::defaults(prob), opt);
}

OracleReport gap_probability_joint(const OracleProblem& prob, const OracleContours& contours,
                                   const OracleOptions& opt) {
    check_scale(prob);
    if (!std::isfinite(prob.xi2)) return gap_probability_min(prob, contours, opt);
    if (!(opt.W > 0)) throw DomainError("gap_probability_joint: W must be positive");
    OracleReport r{.problem = prob, .contours = contours, .options = opt};
    const JointValue v = joint_det(prob, contours, opt.interval_nodes, opt.tail_nodes, opt);
    r.raw_value = v.det;
    r.imag_residual = v.imag;
    if (opt.check_convergence) {
        const JointValue v2 = joint_det(prob, contours.doubled(), 2 * opt.interval_nodes, 2 * opt.tail_nodes, opt);
        r.doubling_error = std::abs(v2.det - v.det);
        if (r.doubling_error > opt.convergence_tol)
            throw ConvergenceError("gap_probability_joint: node doubling changed the value", r.doubling_error);
    }
    r.value = clamp_flag(r.raw_value, r.clamped);
    return r;
}

OracleReport gap_probability_joint(const OracleProblem& prob, const OracleOptions& opt) {
    return gap_probability_joint(prob, OracleContours::defaults(prob), opt);
}

}  // namespace spiked
