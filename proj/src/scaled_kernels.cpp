#include "spiked/scaled_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spiked/errors.hpp"
#include "spiked/special_functions.hpp"

namespace spiked {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);
constexpr int panel_nodes = 24;

struct Path {
    std::vector<cplx> z, dz;

    void segment(cplx a, cplx b, int n) {
        const auto& [x, w] = cached_gauss_legendre(n);
        const cplx h = (b - a) / 2.0;
        for (int i = 0; i < n; ++i) {
            z.push_back(a + h * (x[i] + 1.0));
            dz.push_back(h * w[i]);
        }
    }

    // a + t * dir for t from t0 to t1, panels doubling in width away from t0.
    void graded(cplx a, cplx dir, double t0, double t1, double first) {
        const double sgn = t1 >= t0 ? 1 : -1;
        double s = t0, width = first;
        while (sgn * (t1 - s) > 0) {
            const double e = sgn * (t1 - s) <= 1.5 * width ? t1 : s + sgn * width;
            segment(a + s * dir, a + e * dir, panel_nodes);
            s = e;
            width *= 2;
        }
    }

    // Reverse of graded: from t1 down to t0, fine panels last.
    void graded_in(cplx a, cplx dir, double t1, double t0, double first) {
        Path p;
        p.graded(a, dir, t0, t1, first);
        for (std::size_t i = p.z.size(); i-- > 0;) {
            z.push_back(p.z[i]);
            dz.push_back(-p.dz[i]);
        }
    }

    void arc(cplx c, double r, double th0, double th1, int n) {
        const auto& [x, w] = cached_gauss_legendre(n);
        const double h = (th1 - th0) / 2;
        for (int i = 0; i < n; ++i) {
            const double t = th0 + h * (x[i] + 1);
            const cplx e = std::polar(1.0, t);
            z.push_back(c + r * e);
            dz.push_back(I * r * e * (h * w[i]));
        }
    }

    void circle(cplx c, double r, int n) {
        for (int i = 0; i < n; ++i) {
            const cplx e = std::polar(1.0, 2 * pi * i / n);
            z.push_back(c + r * e);
            dz.push_back(I * r * e * (2 * pi / n));
        }
    }

    cplx winding(cplx a) const {
        cplx s = 0;
        for (std::size_t i = 0; i < z.size(); ++i) s += dz[i] / (z[i] - a);
        return s / (2 * pi * I);
    }

    double distance(cplx a) const {
        double d = INFINITY;
        for (const cplx& v : z) d = std::min(d, std::abs(v - a));
        return d;
    }
};

// Phi(z) = -mu M (z - q) + M log z - sum over non-critical 1/ell of log(z - pi)
struct Exponent {
    double mu, q;
    int M;
    std::vector<std::pair<double, int>> others;  // (pi, count)
    int bulk = 0;                                // multiplicity of pi = 1

    cplx operator()(cplx z) const {
        cplx v = -mu * M * (z - q) + static_cast<double>(M) * std::log(z) - static_cast<double>(bulk) * std::log(z - 1.0);
        for (const auto& [p, c] : others) v -= static_cast<double>(c) * std::log(z - p);
        return v;
    }
};

Exponent make_exponent(const SpikedModel& model, double mu, double q, double critical_pi, bool exclude) {
    Exponent e{mu, q, model.M, {}, model.N - model.spike_count()};
    for (const Spike& s : model.spikes) {
        const double p = 1 / s.value;
        if (exclude && std::abs(p - critical_pi) <= 1e-9 * critical_pi) continue;
        e.others.emplace_back(p, s.multiplicity);
    }
    return e;
}

// Loop through the saddle p around 1 with rays at +-theta from p, closed by an arc centered at 1.
// Optional small arc of radius rho around p, and an optional vertical cut at Re z = cut.
Path saddle_loop(double p, double theta, double tmax, double rho, double first, double cut = -INFINITY) {
    Path path;
    const cplx up = std::polar(1.0, theta), down = std::polar(1.0, -theta);
    const bool right = p > 1;  // loop goes upward through p when p lies right of 1
    const cplx in_dir = right ? down : up, out_dir = right ? up : down;
    path.graded_in(p, in_dir, tmax, rho, first);
    if (rho > 0) {
        if (right)
            path.arc(p, rho, -theta, theta, 64);
        else
            path.arc(p, rho, theta, 2 * pi - theta, 64);
    }
    path.graded(p, out_dir, rho, tmax, first);
    const cplx end = p + tmax * out_dir, start = p + tmax * in_dir;
    const double R = std::abs(end - 1.0);
    double a0 = std::arg(end - 1.0), a1 = std::arg(start - 1.0);
    if (a1 <= a0) a1 += 2 * pi;
    const double cos_cut = (cut - 1) / R;
    if (cut > 1 - R && cos_cut < 1) {
        // cut the leftmost part of the arc by a vertical chord
        const double tc = std::acos(cos_cut);
        path.arc(1.0, R, a0, tc, 96);
        const double h = R * std::sin(tc);
        path.segment(cplx(cut, h), cplx(cut, -h), 96);
        path.arc(1.0, R, 2 * pi - tc, a1, 96);
    } else {
        path.arc(1.0, R, a0, a1, 192);
    }
    return path;
}

// Upward path through p with rays at +-pi/3 up to |t| = 1, continued vertically at Re = p + 1/2.
Path saddle_open(double p, double first, double height) {
    Path path;
    const cplx up = std::polar(1.0, pi / 3), down = std::polar(1.0, -pi / 3);
    const double h0 = std::sqrt(3.0) / 2;
    const cplx base(p + 0.5, 0.0);
    path.graded_in(base, -I, height, h0, 0.5);
    path.graded_in(p, down, 1.0, 0.0, first);
    path.graded(p, up, 0.0, 1.0, first);
    path.graded(base, I, h0, height, 0.5);
    return path;
}

void require_enclosed(const Path& path, const Exponent& e, double margin, const char* what) {
    std::vector<double> poles{1.0};
    for (const auto& [p, c] : e.others) poles.push_back(p);
    for (double p : poles) {
        if (p == 1.0 && e.bulk == 0) continue;
        const cplx w = path.winding(p);
        if (std::abs(w - 1.0) > 1e-6 || path.distance(p) < margin)
            throw InvalidContourError(std::string(what) + ": contour does not isolate the pole at " + std::to_string(p));
    }
}

}  // namespace

double ScaledCheckReport::max_error() const {
    double e = 0;
    for (const auto& r : h_rows) e = std::max(e, r.error);
    for (const auto& r : j_rows) e = std::max(e, r.error);
    return e;
}

ScaledCheckReport scaled_kernel_limit_check(const SpikedModel& model, double x, const std::vector<double>& us,
                                            const std::vector<double>& vs, double eps) {
    if (!(eps > 0)) throw DomainError("scaled_kernel_limit_check: eps must be positive");
    const Regime regime = classify(model);
    const double g = model.gamma;
    ScaledCheckReport rep;
    rep.M = model.M;
    rep.k = regime.k1;
    rep.eps = eps;
    const int k = regime.k1;
    const double M = model.M;

    if (regime.min_branch == Branch::TracyWidom) {
        if (!(g > 1)) throw RegimeMismatchError("scaled_kernel_limit_check: the min edge needs gamma > 1");
        rep.case_id = 1;
        rep.p = g / (g - 1);
        rep.mu = std::pow(1 - 1 / g, 2);
        rep.nu = std::pow(g - 1, 4.0 / 3.0) / g;
    } else {
        rep.case_id = 2;
        rep.p = 1 / model.smallest();
        rep.mu = 1 / rep.p - 1 / (g * g * (rep.p - 1));
        const double nu2 = 1 / (rep.p * rep.p) - 1 / (g * g * (rep.p - 1) * (rep.p - 1));
        if (!(nu2 > 0)) throw RegimeMismatchError("scaled_kernel_limit_check: spike is not supercritical");
        rep.nu = std::sqrt(nu2);
    }
    const double p = rep.p;
    const double c = rep.case_id == 1 ? rep.nu * std::cbrt(M) : rep.nu * std::sqrt(M);
    rep.q = p + eps / c;
    const Exponent phi = make_exponent(model, rep.mu, rep.q, p, k > 0);
    const cplx phi_p = phi(p);

    Path hp, jp;
    if (rep.case_id == 1) {
        const double tmax = (std::sqrt(3.0) - 1) * (p - 1);
        hp = saddle_loop(p, 2 * pi / 3, tmax, eps / (2 * c), 0.25 / c);
        jp = saddle_open(p, 0.25 / c, p + 20);
    } else {
        const double R = 1 / std::sqrt(rep.mu) - 1;
        if (!(R > 0 && 1 + R < p)) throw InvalidContourError("scaled_kernel_limit_check: no room for the bulk circle");
        hp.circle(p, std::min(1.0 / c, (p - 1 - R) / 2), 128);
        hp.circle(1.0, R, 4 * model.N + 256);
        const cplx base(p + 2 * eps / c, 0.0);
        jp.graded_in(base, -I, 50.0, 0.0, 0.25 / c);
        jp.graded(base, I, 0.0, 50.0, 0.25 / c);
    }
    require_enclosed(hp, phi, 0.0, "scaled_kernel_limit_check");
    if (rep.case_id == 2)
        for (const auto& [op, cnt] : phi.others)
            if (std::abs(op - p) <= std::min(1.0 / c, (p - 1 - 1 / std::sqrt(rep.mu) + 1) / 2))
                throw InvalidContourError("scaled_kernel_limit_check: spike too close to the saddle");

    std::vector<cplx> hw(hp.z.size()), jw(jp.z.size());
    for (std::size_t i = 0; i < hp.z.size(); ++i)
        hw[i] = hp.dz[i] * std::exp(phi(hp.z[i]) - phi_p) * std::pow(c * (hp.z[i] - p), -k);
    for (std::size_t i = 0; i < jp.z.size(); ++i)
        jw[i] = jp.dz[i] * std::exp(phi_p - phi(jp.z[i])) * std::pow(c * (jp.z[i] - p), k);

    for (double u : us) {
        const double s = x + u;
        cplx sum = 0;
        for (std::size_t i = 0; i < hp.z.size(); ++i) sum += hw[i] * std::exp(c * s * (hp.z[i] - rep.q));
        const cplx fin = c / (2 * pi) * sum;
        const cplx lim = rep.case_id == 1 ? h_inf_case1(k, s, eps) : h_inf_case2(k, s, eps);
        rep.h_rows.push_back({s, fin, lim, std::abs(fin - lim)});
    }
    for (double v : vs) {
        const double s = x + v;
        cplx sum = 0;
        for (std::size_t i = 0; i < jp.z.size(); ++i) sum += jw[i] * std::exp(-c * s * (jp.z[i] - rep.q));
        const cplx fin = c / (2 * pi) * sum;
        const cplx lim = rep.case_id == 1 ? j_inf_case1(k, s, eps) : j_inf_case2(k, s, eps);
        rep.j_rows.push_back({s, fin, lim, std::abs(fin - lim)});
    }
    return rep;
}

OffDiagonalReport offdiagonal_check(int M, double gamma, double x, double y, double u, double v, double eps) {
    if (!(gamma > 1)) throw DomainError("offdiagonal_check: gamma must exceed 1");
    const double nd = M / (gamma * gamma);
    const int N = static_cast<int>(std::lround(nd));
    if (N < 1 || std::abs(nd - N) > 1e-9) throw DomainError("offdiagonal_check: M / gamma^2 must be an integer");
    const SpikedModel model = SpikedModel::from_dimensions(N, M);
    const double g = gamma, m3 = std::cbrt(static_cast<double>(M));
    const double mu1 = std::pow(1 - 1 / g, 2), nu1 = std::pow(g - 1, 4.0 / 3.0) / g;
    const double mu2 = std::pow(1 + 1 / g, 2), nu2 = std::pow(g + 1, 4.0 / 3.0) / g;
    const double p1 = g / (g - 1), p2 = g / (g + 1);
    const double c1 = nu1 * m3, c2 = nu2 * m3;
    const double q1 = p1 + eps / c1, q2 = p2 - eps / c2;
    const Exponent phi1 = make_exponent(model, mu1, q1, 0, false);
    const Exponent phi2 = make_exponent(model, mu2, q2, 0, false);
    const cplx f1 = phi1(p1), f2 = phi2(p2);
    const double pref = -static_cast<double>(M) / (4 * pi * pi);

    // K12: z on a loop through p1, w on the circle |w| = p2
    const double cut = 0.5 * (1 + p2);
    Path gam1 = saddle_loop(p1, 2 * pi / 3, (std::sqrt(3.0) - 1) * (p1 - 1), 0.0, 0.25 / c1, cut);
    Path sig2;
    {
        // circle |w| = p2, graded near the saddle at angle 0
        const double first = 0.25 / c2 / p2;
        Path a;
        a.graded(0.0, 1.0, 0.0, pi, first);
        for (std::size_t i = 0; i < a.z.size(); ++i) {
            const double t = a.z[i].real(), dt = a.dz[i].real();
            for (double sgn : {1.0, -1.0}) {
                const cplx e = std::polar(1.0, sgn * t);
                sig2.z.push_back(p2 * e);
                sig2.dz.push_back(I * p2 * e * (sgn * dt));
            }
        }
    }
    cplx k12 = 0;
    {
        std::vector<cplx> A(gam1.z.size()), B(sig2.z.size());
        for (std::size_t i = 0; i < A.size(); ++i)
            A[i] = gam1.dz[i] * std::exp(c1 * (x + u) * (gam1.z[i] - q1) + phi1(gam1.z[i]) - f1);
        for (std::size_t j = 0; j < B.size(); ++j)
            B[j] = sig2.dz[j] * std::exp(c2 * (y + v) * (sig2.z[j] - q2) - phi2(sig2.z[j]) + f2);
        for (std::size_t i = 0; i < A.size(); ++i)
            for (std::size_t j = 0; j < B.size(); ++j) k12 += A[i] * B[j] / (sig2.z[j] - gam1.z[i]);
    }
    k12 *= pref * nu2 / (m3 * m3);

    // K21: z on a loop through p2, w upward through p1
    Path gam2 = saddle_loop(p2, pi / 3, 1 - p2, 0.0, 0.25 / c2);
    Path sig1 = saddle_open(p1, 0.25 / c1, p1 + 20);
    cplx k21 = 0;
    {
        std::vector<cplx> A(gam2.z.size()), B(sig1.z.size());
        for (std::size_t i = 0; i < A.size(); ++i)
            A[i] = gam2.dz[i] * std::exp(-c2 * (y + u) * (gam2.z[i] - q2) + phi2(gam2.z[i]) - f2);
        for (std::size_t j = 0; j < B.size(); ++j)
            B[j] = sig1.dz[j] * std::exp(-c1 * (x + v) * (sig1.z[j] - q1) - phi1(sig1.z[j]) + f1);
        for (std::size_t i = 0; i < A.size(); ++i)
            for (std::size_t j = 0; j < B.size(); ++j) k21 += A[i] * B[j] / (sig1.z[j] - gam2.z[i]);
    }
    k21 *= pref * nu1 / (m3 * m3);
    return {M, std::abs(k12), std::abs(k21)};
}

}  // namespace spiked
