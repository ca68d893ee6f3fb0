#include "spiked/special_functions.hpp"

#include <cmath>
#include <numbers>

#include "spiked/errors.hpp"

namespace spiked {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Ai(0) and -Ai'(0)
constexpr long double c1 = 0.355028053887817239260063186004183176L;
constexpr long double c2 = 0.258819403792806798405183560189203963L;

AiryPair airy_maclaurin(double x) {
    const long double z = x;
    const long double z3 = z * z * z;
    long double f = 0, fp = 0, g = 0, gp = 0;
    long double a = 1, b = 1;  // coefficients of z^{3k} and z^{3k+1}
    long double zp = 1;        // z^{3k}
    long double zprev = 0;     // z^{3k-3}
    for (int k = 0; k < 200; ++k) {
        const long double tf = a * zp;
        const long double tg = b * zp * z;
        f += tf;
        g += tg;
        if (k > 0) fp += 3 * k * a * zprev * z * z;
        gp += (3 * k + 1) * b * zp;
        a /= (3.0L * k + 2) * (3.0L * k + 3);
        b /= (3.0L * k + 3) * (3.0L * k + 4);
        zprev = zp;
        zp *= z3;
        if (k > 5 && std::abs(tf) + std::abs(tg) < 1e-22L * (std::abs(f) + std::abs(g))) break;
    }
    return {static_cast<double>(c1 * f - c2 * g), static_cast<double>(c1 * fp - c2 * gp)};
}

// Ai(x) = e^{-zeta}/pi int_0^inf e^{-sqrt(x) t^2} cos(t^3/3) dt, with the matching form for Ai'.
AiryPair airy_laplace(double x) {
    const auto& rule = cached_gauss_legendre(40);
    const double s = std::sqrt(x);
    const double zeta = 2.0 / 3.0 * x * s;
    const double T = std::sqrt(40.0 / s);
    const int panels = 4;
    const double width = T / panels;
    double ia = 0, ip = 0;
    for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < rule.first.size(); ++i) {
            const double t = p * width + 0.5 * width * (1 + rule.first(i));
            const double w = 0.5 * width * rule.second(i);
            const double e = std::exp(-s * t * t);
            const double c = std::cos(t * t * t / 3), sn = std::sin(t * t * t / 3);
            ia += w * e * c;
            ip += w * e * (-s * c - t * sn);
        }
    }
    const double scale = std::exp(-zeta) / pi;
    return {scale * ia, scale * ip};
}

AiryPair airy_oscillatory(double x) {
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double u = 1, v = 1;
    double pc = 1, ps = 0, qc = 1, qs = 0;  // even/odd sums for Ai and Ai'
    double zpow = 1;
    double last = 1e300;
    for (int k = 1; k < 40; ++k) {
        u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
        v = -(6.0 * k + 1) / (6.0 * k - 1) * u;
        zpow *= zeta;
        const double tu = u / zpow, tv = v / zpow;
        if (std::abs(tu) > last) break;
        last = std::abs(tu);
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            pc += sign * tu;
            qc += sign * tv;
        } else {
            ps += sign * tu;
            qs += sign * tv;
        }
        if (last < 1e-18) break;
    }
    const double ph = zeta - pi / 4;
    const double c = std::cos(ph), s = std::sin(ph);
    const double z4 = std::pow(z, 0.25);
    const double ai = (c * pc + s * ps) / (std::sqrt(pi) * z4);
    const double aip = z4 * (s * qc - c * qs) / std::sqrt(pi);
    return {ai, aip};
}

}  // namespace

AiryPair airy(double u) {
    if (!std::isfinite(u)) throw DomainError("airy: non-finite argument");
    if (u >= 2) return airy_laplace(u);
    if (u >= -8) return airy_maclaurin(u);
    return airy_oscillatory(u);
}

double airy_ai(double u) { return airy(u).ai; }
double airy_ai_prime(double u) { return airy(u).aip; }

double airy_derivative(int j, double u) {
    if (j < 0) throw DomainError("airy_derivative: negative order");
    const AiryPair a = airy(u);
    // d_{n+2} = u d_n + n d_{n-1}
    std::vector<double> seq{a.ai, a.aip};
    for (int n = 0; static_cast<int>(seq.size()) <= j; ++n)
        seq.push_back(u * seq[n] + (n > 0 ? n * seq[n - 1] : 0.0));
    return seq[j];
}

AiryContour AiryContour::lower(double dip, double radius, int nodes) {
    AiryContour c;
    const cplx apex(0.0, -dip);
    c.vertices = {apex + radius * std::polar(1.0, 5 * pi / 6), apex, apex + radius * std::polar(1.0, pi / 6)};
    c.nodes_per_segment = nodes;
    return c;
}

AiryContour AiryContour::upper(double height, double radius, int nodes) {
    AiryContour c;
    const cplx apex(0.0, height);
    c.vertices = {apex + radius * std::polar(1.0, 5 * pi / 6), apex, apex + radius * std::polar(1.0, pi / 6)};
    c.nodes_per_segment = nodes;
    return c;
}

bool AiryContour::passes_below_origin() const {
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) {
        const cplx a = vertices[i], b = vertices[i + 1];
        if ((a.real() <= 0 && b.real() >= 0) || (a.real() >= 0 && b.real() <= 0)) {
            const double dr = b.real() - a.real();
            const double t = dr == 0 ? 0.0 : -a.real() / dr;
            const double im = a.imag() + t * (b.imag() - a.imag());
            if (im >= 0) return false;
        }
    }
    return true;
}

void AiryContour::validate() const {
    if (vertices.size() < 2) throw InvalidContourError("airy contour needs at least two vertices");
    if (nodes_per_segment < 2) throw InvalidContourError("airy contour needs at least two nodes per segment");
    // terminal rays must point along the steepest-descent directions of e^{ia^3/3}
    auto off_by = [](cplx dir, double angle) { return std::abs(std::remainder(std::arg(dir) - angle, 2 * pi)); };
    constexpr double tol = 1e-12;
    if (off_by(vertices[0] - vertices[1], 5 * pi / 6) > tol)
        throw InvalidContourError("airy contour must arrive from infinity along angle 5pi/6");
    if (off_by(vertices.back() - vertices[vertices.size() - 2], pi / 6) > tol)
        throw InvalidContourError("airy contour must leave to infinity along angle pi/6");
}

void AiryContour::nodes(std::vector<cplx>& a, std::vector<cplx>& da) const {
    const auto& [t, w] = cached_gauss_legendre(nodes_per_segment);
    a.clear();
    da.clear();
    for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
        const cplx p = vertices[s], q = vertices[s + 1];
        const cplx half = 0.5 * (q - p);
        for (int i = 0; i < t.size(); ++i) {
            a.push_back(p + half * (1 + t(i)));
            da.push_back(half * w(i));
        }
    }
}

namespace {

ContourValue s_m_raw(int m, double u, const AiryContour& contour) {
    std::vector<cplx> a, da;
    contour.nodes(a, da);
    cplx sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += da[i] * std::exp(I * u * a[i] + I * a[i] * a[i] * a[i] / 3.0) * std::pow(I * a[i], -m);
    sum /= 2 * pi;
    return {sum.real(), sum.imag()};
}

}  // namespace

ContourValue s_m_contour(int m, double u, const AiryContour& contour) {
    if (m < 0) throw DomainError("s_m: m must be nonnegative");
    contour.validate();
    if (m > 0 && !contour.passes_below_origin())
        throw InvalidContourError("s_m: contour must pass below the origin");
    return s_m_raw(m, u, contour);
}

ContourValue t_m_contour(int m, double v, const AiryContour& contour) {
    if (m < 1) throw DomainError("t_m: m must be positive");
    contour.validate();
    std::vector<cplx> a, da;
    contour.nodes(a, da);
    cplx sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += da[i] * std::exp(I * v * a[i] + I * a[i] * a[i] * a[i] / 3.0) * std::pow(-I * a[i], m - 1);
    sum /= 2 * pi;
    return {sum.real(), sum.imag()};
}

double s_m_residue(int m, double u) {
    if (m < 1) return 0;
    double total = 0;
    for (int r = 0; 3 * r <= m - 1; ++r) {
        const int n = m - 1 - 3 * r;
        total += (r % 2 == 0 ? 1.0 : -1.0) * std::pow(u, n) /
                 (std::pow(3.0, r) * std::tgamma(r + 1.0) * std::tgamma(n + 1.0));
    }
    return total;
}

double s_m(int m, double u) {
    if (m < 0) throw DomainError("s_m: m must be nonnegative");
    if (m == 0) return airy_ai(u);
    if (u <= 1) return s_m_contour(m, u, AiryContour::lower()).value;
    const double h = std::sqrt(u);
    return s_m_residue(m, u) + s_m_raw(m, u, AiryContour::upper(h)).value;
}

std::vector<double> s_m_all(int kmax, double u) {
    std::vector<double> out(kmax, 0.0);
    if (kmax < 1) return out;
    const bool lower = u <= 1;
    const AiryContour c = lower ? AiryContour::lower() : AiryContour::upper(std::sqrt(u));
    std::vector<cplx> a, da;
    c.nodes(a, da);
    std::vector<cplx> acc(kmax, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const cplx inv = 1.0 / (I * a[i]);
        cplx term = da[i] * std::exp(I * u * a[i] + I * a[i] * a[i] * a[i] / 3.0);
        for (int m = 0; m < kmax; ++m) {
            term *= inv;
            acc[m] += term;
        }
    }
    for (int m = 0; m < kmax; ++m)
        out[m] = acc[m].real() / (2 * pi) + (lower ? 0.0 : s_m_residue(m + 1, u));
    return out;
}

double t_m(int m, double v) {
    if (m < 1) throw DomainError("t_m: m must be positive");
    const double d = airy_derivative(m - 1, v);
    return (m - 1) % 2 == 0 ? d : -d;
}

double airy_kernel(double u, double v, const AiryPair& pu, const AiryPair& pv) {
    if (std::abs(u - v) > 1e-6) return (pu.ai * pv.aip - pu.aip * pv.ai) / (u - v);
    const double m = 0.5 * (u + v);
    const AiryPair pm = (u == v) ? pu : airy(m);
    return pm.aip * pm.aip - m * pm.ai * pm.ai;
}

double airy_kernel(double u, double v) { return airy_kernel(u, v, airy(u), airy(v)); }

cplx h_inf_case2(int k, double u, double eps) {
    if (k < 1) throw DomainError("h_inf_case2: k must be positive");
    return I * std::exp(-eps * u) * hermite_he(k - 1, u) / std::tgamma(static_cast<double>(k));
}

cplx j_inf_case2(int k, double v, double eps) {
    if (k < 1) throw DomainError("j_inf_case2: k must be positive");
    return I / std::sqrt(2 * pi) * std::exp(eps * v - 0.5 * v * v) * hermite_he(k, v);
}

namespace {

void gl_segment(cplx p, cplx q, int n, std::vector<cplx>& a, std::vector<cplx>& da) {
    const auto& [t, w] = cached_gauss_legendre(n);
    const cplx half = 0.5 * (q - p);
    for (int i = 0; i < n; ++i) {
        a.push_back(p + half * (1 + t(i)));
        da.push_back(half * w(i));
    }
}

void gl_arc(cplx center, double r, double th0, double th1, int n, std::vector<cplx>& a,
            std::vector<cplx>& da) {
    const auto& [t, w] = cached_gauss_legendre(n);
    const double half = 0.5 * (th1 - th0);
    for (int i = 0; i < n; ++i) {
        const double th = th0 + half * (1 + t(i));
        const cplx e = std::polar(r, th);
        a.push_back(center + e);
        da.push_back(I * e * half * w(i));
    }
}

}  // namespace

cplx h_inf_case1(int k, double u, double eps) {
    if (k < 0) throw DomainError("h_inf_case1: negative k");
    const double r0 = eps > 0 ? eps / 2 : 0.25;
    const double R = 10;
    std::vector<cplx> a, da;
    const cplx lo = std::polar(r0, -2 * pi / 3), hi = std::polar(r0, 2 * pi / 3);
    gl_segment(std::polar(R, -2 * pi / 3), lo, 200, a, da);
    gl_arc(0.0, r0, -2 * pi / 3, 2 * pi / 3, 64, a, da);
    gl_segment(hi, std::polar(R, 2 * pi / 3), 200, a, da);
    cplx sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += da[i] * std::exp(u * a[i] - a[i] * a[i] * a[i] / 3.0) * std::pow(a[i], -k);
    return std::exp(-eps * u) * sum / (2 * pi);
}

cplx j_inf_case1(int k, double v, double eps) {
    if (k < 0) throw DomainError("j_inf_case1: negative k");
    const double R = 10;
    std::vector<cplx> a, da;
    gl_segment(std::polar(R, -pi / 3), 0.0, 200, a, da);
    gl_segment(0.0, std::polar(R, pi / 3), 200, a, da);
    cplx sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += da[i] * std::exp(-v * a[i] + a[i] * a[i] * a[i] / 3.0) * std::pow(a[i], k);
    return std::exp(eps * v) * sum / (2 * pi);
}

}  // namespace spiked
