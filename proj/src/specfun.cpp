#include "nodalband/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nodalband/errors.hpp"

namespace nodalband::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

double checked_arg(double x, const char* who)
{
    if (!(std::abs(x) <= 1.0 + 1e-12))
        throw DomainError(std::string(who) + ": argument outside [-1,1]: " + std::to_string(x));
    return std::clamp(x, -1.0, 1.0);
}

// Power series, adequate below x = 12 to about 1e-13 absolute.
double bessel_series(int order, double x)
{
    const double q = -0.25 * x * x;
    double term = order == 0 ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        term *= q / (double(k) * double(k + order));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && k > 4)
            break;
    }
    return sum;
}

// Hankel expansion J_v(x) = sqrt(2/(pi x)) (P cos w - Q sin w), w = x - v pi/2 - pi/4.
// The series is summed until its terms stop decreasing.
double bessel_hankel(int order, double x)
{
    const double mu = 4.0 * order * order;
    const double z = 8.0 * x;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double last = 1e300;
    for (int k = 1; k < 60; ++k) {
        const double f = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (k * z);
        term *= f;
        if (std::abs(term) >= last)
            break;
        last = std::abs(term);
        // odd k feed Q with sign (+,-,+...), even k feed P with sign (-,+,...)
        if (k % 2 == 1)
            q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
        else
            p += ((k / 2) % 2 == 1 ? -1.0 : 1.0) * term;
        if (last < 1e-17)
            break;
    }
    const double w = x - (0.5 * order + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(w) - q * std::sin(w));
}

} // namespace

double legendre_p(int l, double x)
{
    if (l < 0)
        throw DomainError("legendre_p: negative degree");
    x = checked_arg(x, "legendre_p");
    if (l == 0)
        return 1.0;
    double p0 = 1.0, p1 = x;
    for (int k = 1; k < l; ++k) {
        const double p2 = ((2.0 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double legendre_d(int l, double x, int order)
{
    if (order != 1 && order != 2)
        throw DomainError("legendre_d: order must be 1 or 2");
    if (l < order)
        throw DomainError("legendre_d: degree below derivative order");
    x = checked_arg(x, "legendre_d");
    // P'_{k+1} = P'_{k-1} + (2k+1) P_k, and the same rule one level up.
    double p_prev = 1.0, p = x;
    double d_prev = 0.0, d = 1.0;
    double dd_prev = 0.0, dd = 0.0;
    for (int k = 1; k < l; ++k) {
        const double p_next = ((2.0 * k + 1) * x * p - k * p_prev) / (k + 1);
        const double d_next = d_prev + (2.0 * k + 1) * p;
        const double dd_next = dd_prev + (2.0 * k + 1) * d;
        p_prev = p; p = p_next;
        d_prev = d; d = d_next;
        dd_prev = dd; dd = dd_next;
    }
    return order == 1 ? d : dd;
}

double jacobi_p(int n, double a, double b, double x)
{
    if (n < 0)
        throw DomainError("jacobi_p: negative degree");
    x = checked_arg(x, "jacobi_p");
    if (n == 0)
        return 1.0;
    double y0 = 1.0;
    double y1 = (a + 1) + 0.5 * (a + b + 2) * (x - 1);
    for (int k = 2; k <= n; ++k) {
        const double s = 2.0 * k + a + b;
        const double y2 = ((s - 1) * (s * (s - 2) * x + a * a - b * b) * y1
                           - 2.0 * (k + a - 1) * (k + b - 1) * s * y0)
                          / (2.0 * k * (k + a + b) * (s - 2));
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

double jacobi_asymptotic(int n, double a, double b, double t)
{
    if (n < 1)
        throw DomainError("jacobi_asymptotic: degree must be positive");
    if (!(t > 0.0 && t < kPi))
        throw DomainError("jacobi_asymptotic: angle outside (0, pi)");
    const double k = std::pow(std::sin(0.5 * t), -a - 0.5) * std::pow(std::cos(0.5 * t), -b - 0.5) / std::sqrt(kPi);
    const double big_n = n + 0.5 * (a + b + 1);
    const double gam = -(a + 0.5) * kPi / 2;
    return k * std::cos(big_n * t + gam) / std::sqrt(double(n));
}

double bessel_j(int order, double x)
{
    if (order != 0 && order != 1)
        throw DomainError("bessel_j: only orders 0 and 1");
    if (!(x >= 0.0))
        throw DomainError("bessel_j: negative argument");
    return x < 12.0 ? bessel_series(order, x) : bessel_hankel(order, x);
}

double hilb_approx(int l, double t)
{
    if (l < 1)
        throw DomainError("hilb_approx: degree must be positive");
    if (!(t >= 0.0 && t <= kPi / 2 + 1e-12))
        throw DomainError("hilb_approx: angle outside [0, pi/2]");
    const double ratio = t < 1e-8 ? 1.0 : t / std::sin(t);
    return std::sqrt(ratio) * bessel_j(0, (l + 0.5) * t);
}

double hermite_h(int q, double x)
{
    if (q < 0)
        throw DomainError("hermite_h: negative order");
    if (q == 0)
        return 1.0;
    double h0 = 1.0, h1 = x;
    for (int k = 1; k < q; ++k) {
        const double h2 = x * h1 - k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

} // namespace nodalband::specfun
