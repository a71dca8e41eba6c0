#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nodalband/errors.hpp"
#include "nodalband/kernel.hpp"
#include "nodalband/specfun.hpp"

using namespace nodalband;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

TEST_CASE("make_window constants")
{
    const BandWindow w = make_window(10, 0.2);
    CHECK(w.L0 == 8);
    CHECK(w.modes == 57);
    CHECK(w.Csq == Approx(4 * kPi / 57).epsilon(1e-15));
    // sum (2l+1) l(l+1) over 8..10 is 5244, so D = 5244 / (2 * 57)
    CHECK(w.D == Approx(46.0).epsilon(1e-14));
    CHECK(w.m == 10.5);

    const BandWindow full = make_window(10, 0.9999);
    CHECK(full.L0 == 1);
    CHECK(full.Csq == Approx(4 * kPi / 120).epsilon(1e-15));

    CHECK(make_window(100, 0.1).h == Approx(0.1 / 0.9 * (1 + 1.0 / 200) + 0.01).epsilon(1e-14));
    CHECK(make_window(100, 0.1).h == Approx(0.1217).epsilon(1e-3));
}

TEST_CASE("make_window unit variance")
{
    for (int n : {20, 117, 300, 5000})
        for (double g : {0.05, 0.3, 0.8}) {
            const BandWindow w = make_window(n, g);
            double s = 0;
            for (int l = w.L0; l <= w.n; ++l)
                s += w.weight(l);
            CHECK(s == Approx(1.0).epsilon(1e-14));
            CHECK(w.D > 0);
            CHECK(w.L0 >= 1);
            CHECK(w.L0 < w.n);
        }
}

TEST_CASE("make_window rejects bad input")
{
    CHECK_THROWS_AS(make_window(3, 0.5), ConstructionError);
    CHECK_THROWS_AS(make_window(10, 0.0), ConstructionError);
    CHECK_THROWS_AS(make_window(10, 1.0), ConstructionError);
    CHECK_THROWS_AS(make_window(10, 0.05), ConstructionError);  // L0 = n, one frequency
    CHECK_THROWS_AS(make_band(5, 4), ConstructionError);
    const BandWindow s = make_band(7, 7);
    CHECK(s.modes == 15);
    CHECK(s.D == Approx(28.0));
}

TEST_CASE("gamma_exact at zero and at the equator")
{
    for (int n : {10, 100, 1000}) {
        const KernelValues v = gamma_exact(make_window(n, 0.2), 0.0);
        CHECK(std::abs(v.gamma - 1) <= 1e-13);
        CHECK(v.dgamma == 0.0);
    }
    // P8(0) = 35/128, P9(0) = 0, P10(0) = -63/256
    const double expect = (17 * 35.0 / 128 - 21 * 63.0 / 256) / 57;
    CHECK(gamma_exact(make_window(10, 0.2), kPi / 2).gamma == Approx(expect).epsilon(1e-13));
}

TEST_CASE("single harmonic kernel is the Legendre polynomial")
{
    const BandWindow w = make_band(12, 12);
    for (double th : {0.1, 0.7, 1.5, 2.9})
        CHECK(gamma_exact(w, th).gamma == Approx(specfun::legendre_p(12, std::cos(th))).epsilon(1e-13));
}

TEST_CASE("gamma is bounded and its complements are consistent")
{
    const BandWindow w = make_window(200, 0.1);
    for (int i = 1; i < 400; ++i) {
        const double th = kPi * i / 400;
        const KernelDetail d = gamma_exact_detail(w, th);
        CHECK(std::abs(d.values.gamma) <= 1.0);
        CHECK(d.one_minus == Approx(1 - d.values.gamma).epsilon(1e-12));
        CHECK(d.one_plus == Approx(1 + d.values.gamma).epsilon(1e-12));
    }
    // near zero 1 - Gamma ~ D theta^2 / 2 keeps its relative accuracy
    const double th = 1e-7;
    const KernelDetail d = gamma_exact_detail(w, th);
    CHECK(d.one_minus == Approx(w.D * th * th / 2).epsilon(1e-6));
}

TEST_CASE("Christoffel-Darboux form matches the exact sum")
{
    for (int n : {10, 50, 200, 500})
        for (double g : {0.05, 0.2, 1 / std::sqrt(double(n))}) {
            if ((1 - g) * n > n - 1)
                continue;
            const BandWindow w = make_window(n, g);
            for (int i = 1; i <= 40; ++i) {
                const double th = kPi / 2 * i / 40;
                const KernelValues e = gamma_exact(w, th), c = gamma_cd(w, th);
                CHECK(std::abs(e.gamma - c.gamma) <= 1e-10);
                CHECK(std::abs(e.dgamma - c.dgamma) <= 1e-10 * std::sqrt(w.D));
                CHECK(std::abs(e.ddgamma - c.ddgamma) <= 1e-10 * w.D);
            }
        }
}

TEST_CASE("derivatives match finite differences")
{
    const BandWindow w = make_window(60, 0.15);
    const double h = 1e-5;
    for (double th : {0.05, 0.4, 1.2}) {
        const double fd1 = (gamma_cd(w, th + h).gamma - gamma_cd(w, th - h).gamma) / (2 * h);
        const double fd2 = (gamma_cd(w, th + h).dgamma - gamma_cd(w, th - h).dgamma) / (2 * h);
        CHECK(std::abs(gamma_cd(w, th).dgamma - fd1) <= 1e-6 * std::sqrt(w.D));
        CHECK(std::abs(gamma_cd(w, th).ddgamma - fd2) <= 1e-6 * w.D);
    }
    CHECK(gamma_cd(w, 0.0).gamma == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gamma_asym residual budget")
{
    const int n = 500;
    const double g = 1 / std::sqrt(500.0);
    const BandWindow w = make_window(n, g);
    for (int i = 0; i <= 90; ++i) {
        const double psi = 5 + 0.5 * i;
        const double r = std::abs(gamma_asym(w, psi).value - gamma_exact(w, w.theta_of(psi)).gamma);
        CHECK(r <= 10 * (g / std::sqrt(psi) + 1 / (std::sqrt(psi) * n * g) + 1 / (std::pow(n, 2.5) * g)));
    }
    CHECK(gamma_asym(w, 0.5).regime_warning);
    CHECK_FALSE(gamma_asym(w, 5).regime_warning);
}

TEST_CASE("gamma_asym residual decays")
{
    const BandWindow w = make_window(500, 1 / std::sqrt(500.0));
    auto res = [&](double psi) {
        double worst = 0;  // over one period around psi
        for (int i = 0; i < 20; ++i) {
            const double p = psi + 0.1 * std::numbers::pi * i;
            worst = std::max(worst, std::abs(gamma_asym(w, p).value - gamma_exact(w, w.theta_of(p)).gamma));
        }
        return worst;
    };
    CHECK(res(40) < res(5));
}

TEST_CASE("gamma_asym phase of the first maximum")
{
    const BandWindow w = make_window(500, 1 / std::sqrt(500.0));
    auto argmax = [&](auto f) {
        double best = -1e9, at = 0;
        for (double p = 2.0; p <= 6.0; p += 0.001) {
            const double v = f(p);
            if (v > best) {
                best = v;
                at = p;
            }
        }
        return at;
    };
    const double pe = argmax([&](double p) { return gamma_exact(w, w.theta_of(p)).gamma; });
    const double pa = argmax([&](double p) { return gamma_asym(w, p).value; });
    CHECK(std::abs(pe - pa) <= 0.1);
}

TEST_CASE("gamma_sq_asym and gamma_d2_asym residual budgets")
{
    const int n = 500;
    const double g = 1 / std::sqrt(500.0);
    const BandWindow w = make_window(n, g);
    for (int i = 0; i <= 90; ++i) {
        const double psi = 5 + 0.5 * i;
        const KernelValues e = gamma_exact(w, w.theta_of(psi));
        const double sq = std::abs(gamma_sq_asym(w, psi).value - e.gamma * e.gamma);
        CHECK(sq <= 10 * (2 / (kPi * psi) * (1 / (psi * psi) + 1 / (g * n * psi) + g / psi) + g / psi + 1 / (n * g * psi)));
        const double d2 = std::abs(gamma_d2_asym(w, psi).value - e.ddgamma);
        CHECK(d2 <= 10 * (std::sqrt(2 / (kPi * psi)) * n * n * w.h / g * (1 / (n * psi * g) + g / psi)
                          + n / (g * std::sqrt(psi))));
    }
}

TEST_CASE("phases")
{
    const BandWindow w = make_window(100, 0.1);
    const Phases p = phases(w, 7.0);
    const double th = w.theta_of(7.0);
    CHECK(p.A == Approx(101 * th));
    CHECK(p.B == Approx(w.L0 * th));
    CHECK(p.Theta == Approx((p.A + p.B) / 2));
}
