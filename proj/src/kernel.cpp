#include "nodalband/kernel.hpp"

#include <cmath>
#include <numbers>

#include "nodalband/errors.hpp"
#include "nodalband/specfun.hpp"

namespace nodalband {

namespace {

constexpr double kPi = std::numbers::pi;

void fill_constants(BandWindow& w)
{
    __int128 s0 = 0, s1 = 0;
    for (long long l = w.L0; l <= w.n; ++l) {
        s0 += 2 * l + 1;
        s1 += (__int128)(2 * l + 1) * l * (l + 1);
    }
    w.modes = (long long)s0;
    w.m = w.n + 0.5;
    w.Csq = 4.0 * kPi / double(s0);
    w.D = double(s1) / (2.0 * double(s0));
    w.h = (w.g / (1.0 - w.g)) * (1.0 + 1.0 / (2.0 * w.n)) + 1.0 / w.n;
}

void check_theta(double theta)
{
    if (!(theta >= 0.0 && theta < kPi))
        throw DomainError("kernel: theta outside [0, pi)");
}

// Jacobi value with negative degree read as an empty sum.
double jac(int k, double a, double b, double x)
{
    return k < 0 ? 0.0 : specfun::jacobi_p(k, a, b, x);
}

} // namespace

double BandWindow::weight(int l) const { return Csq * (2.0 * l + 1.0) / (4.0 * kPi); }

BandWindow make_window(int n, double g)
{
    if (n < 4)
        throw ConstructionError("make_window: n must be at least 4");
    if (!(g > 0.0 && g < 1.0))
        throw ConstructionError("make_window: g must lie in (0,1)");
    const double lo = (1.0 - g) * n;
    // (1-g)n is often an integer spoiled by rounding, e.g. 0.8*10.
    int L0 = (int)std::ceil(lo - 1e-9 * std::max(1.0, lo));
    if (L0 < 1)
        L0 = 1;
    if (L0 >= n)
        throw ConstructionError("make_window: window [" + std::to_string(L0) + ", " + std::to_string(n)
                                + "] holds fewer than 2 frequencies");
    BandWindow w;
    w.n = n;
    w.g = g;
    w.L0 = L0;
    fill_constants(w);
    return w;
}

BandWindow make_band(int lo, int hi)
{
    if (lo < 1 || hi < lo)
        throw ConstructionError("make_band: need 1 <= lo <= hi");
    BandWindow w;
    w.n = hi;
    w.L0 = lo;
    w.g = 1.0 - double(lo) / double(hi);
    fill_constants(w);
    return w;
}

std::string to_string(KernelMethod m)
{
    switch (m) {
    case KernelMethod::exact_sum: return "exact_sum";
    case KernelMethod::cd_form: return "cd_form";
    case KernelMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

KernelDetail gamma_exact_detail(const BandWindow& win, double theta)
{
    check_theta(theta);
    const bool far = theta > kPi / 2;
    // Past the equator every trigonometric quantity comes from phi = pi - theta,
    // which is exact in floating point and keeps them consistent near the antipode.
    const double t = far ? kPi - theta : theta;
    const double sh = std::sin(0.5 * t), ch = std::cos(0.5 * t);
    const double x = far ? -std::cos(t) : std::cos(t);
    const double s = std::sin(t);
    // 1 - x and 1 + x without cancellation.
    const double omx = far ? 2.0 * ch * ch : 2.0 * sh * sh;
    const double opx = far ? 2.0 * sh * sh : 2.0 * ch * ch;
    // Q_l = 1 - P_l(y) with y = x near the pole and y = -x past the equator.
    const double y = far ? -x : x;
    const double omy = far ? opx : omx;

    double p_prev = 1.0, p = x;
    double d_prev = 0.0, d = 1.0;
    double dd_prev = 0.0, dd = 0.0;
    double q_prev = 0.0, q = omy;
    double G = 0.0, F1 = 0.0, F2 = 0.0, Qm = 0.0, Qp = 0.0;
    const double c = win.Csq / (4.0 * kPi);
    for (int l = 0; l <= win.n; ++l) {
        double pl, dl, ddl, ql;
        if (l == 0) {
            pl = 1.0; dl = 0.0; ddl = 0.0; ql = 0.0;
        } else {
            pl = p; dl = d; ddl = dd; ql = q;
        }
        if (l >= win.L0) {
            const double w = c * (2.0 * l + 1.0);
            G += w * pl;
            F1 += w * dl;
            F2 += w * ddl;
            // 1 -+ P_l(x) as sums of nonnegative terms; past the equator P_l(x) = (-1)^l (1 - Q_l).
            if (!far) {
                Qm += w * ql;
                Qp += w * (2.0 - ql);
            } else if (l % 2 == 0) {
                Qm += w * ql;
                Qp += w * (2.0 - ql);
            } else {
                Qm += w * (2.0 - ql);
                Qp += w * ql;
            }
        }
        if (l >= 1) {
            const double k = l;
            const double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
            const double d_next = d_prev + (2 * k + 1) * p;
            const double dd_next = dd_prev + (2 * k + 1) * d;
            const double q_next = ((2 * k + 1) * (omy + y * q) - k * q_prev) / (k + 1);
            p_prev = p; p = p_next;
            d_prev = d; d = d_next;
            dd_prev = dd; dd = dd_next;
            q_prev = q; q = q_next;
        }
    }
    KernelDetail out;
    out.values.theta = theta;
    out.values.gamma = G;
    out.values.dgamma = -s * F1;
    out.values.ddgamma = F2 * s * s - F1 * x;
    out.values.method = KernelMethod::exact_sum;
    out.f1 = F1;
    out.one_minus = Qm;
    out.one_plus = Qp;
    return out;
}

KernelValues gamma_exact(const BandWindow& win, double theta)
{
    return gamma_exact_detail(win, theta).values;
}

KernelValues gamma_cd(const BandWindow& win, double theta)
{
    check_theta(theta);
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    const double c = win.Csq / (4.0 * kPi);
    const double n = win.n, L = win.L0;
    const double G = c * ((n + 1) * jac(win.n, 1, 0, x) - L * jac(win.L0 - 1, 1, 0, x));
    const double F1 = c * ((n + 1) * (n + 2) / 2 * jac(win.n - 1, 2, 1, x)
                           - L * (L + 1) / 2 * jac(win.L0 - 2, 2, 1, x));
    const double F2 = c * ((n + 1) * (n + 2) * (n + 3) / 4 * jac(win.n - 2, 3, 2, x)
                           - L * (L + 1) * (L + 2) / 4 * jac(win.L0 - 3, 3, 2, x));
    KernelValues v;
    v.theta = theta;
    v.gamma = G;
    v.dgamma = -s * F1;
    v.ddgamma = F2 * s * s - F1 * x;
    v.method = KernelMethod::cd_form;
    return v;
}

Phases phases(const BandWindow& win, double psi)
{
    const double theta = win.theta_of(psi);
    Phases ph;
    ph.A = (win.n + 1) * theta;
    ph.B = win.L0 * theta;
    ph.Theta = 0.5 * (ph.A + ph.B);
    return ph;
}

AsymValue gamma_asym(const BandWindow& win, double psi)
{
    const Phases ph = phases(win, psi);
    const double v = std::sqrt(2.0 / (kPi * psi))
                     * (std::sin(ph.Theta + kPi / 4) + std::cos(ph.B - 0.75 * kPi) / (2.0 * psi));
    return {v, psi <= 1.0};
}

AsymValue gamma_sq_asym(const BandWindow& win, double psi)
{
    const Phases ph = phases(win, psi);
    const double g = win.g, h = win.h;
    const double v = 2.0 / (kPi * psi)
                     * (0.5 + 0.5 * std::sin(2 * ph.Theta)
                        + g / (psi * h) * std::sin(ph.Theta + kPi / 4) * std::cos(ph.B - 0.75 * kPi));
    return {v, psi <= 1.0};
}

AsymValue gamma_d1sq_asym(const BandWindow& win, double psi)
{
    const Phases ph = phases(win, psi);
    const double g = win.g, h = win.h, n = win.n;
    const double v = 2.0 * n * n / (kPi * psi)
                     * (0.5 - 0.5 * std::sin(2 * ph.Theta)
                        + 3 * g / (psi * h) * std::sin(ph.Theta - kPi / 4) * std::cos(ph.B - 1.25 * kPi)
                        - 3 * g * g / (4 * psi * h) * std::sin(ph.Theta - kPi / 4) * std::cos(ph.B - kPi / 4));
    return {v, psi <= 1.0};
}

AsymValue gamma_d2_asym(const BandWindow& win, double psi)
{
    const Phases ph = phases(win, psi);
    const double g = win.g, h = win.h, n = win.n;
    const double v = std::sqrt(2.0 / (kPi * psi)) * n * n * (h / g)
                     * (-std::sin(ph.Theta + kPi / 4)
                        + 5 * g / (2 * h * psi) * std::cos(ph.B - 1.75 * kPi)
                        + std::sin(ph.Theta - kPi / 4) / psi);
    return {v, psi <= 1.0};
}

} // namespace nodalband
