#include "nodalband/kacrice.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nodalband/errors.hpp"
#include "nodalband/parallel.hpp"
#include "nodalband/quadrature.hpp"

namespace nodalband {

namespace {

constexpr double kPi = std::numbers::pi;

bool psd(const Eigen::Matrix4d& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-10;
}

bool block_pattern(const Eigen::Matrix4d& d)
{
    const double tol = 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff());
    return std::abs(d(0, 1)) <= tol && std::abs(d(0, 3)) <= tol && std::abs(d(1, 2)) <= tol
           && std::abs(d(2, 3)) <= tol && std::abs(d(0, 0) - d(2, 2)) <= tol && std::abs(d(1, 1) - d(3, 3)) <= tol;
}

// Laplace-transform representation: for r >= 0,
//   r = (1/(2 sqrt(pi))) int_0^inf (1 - exp(-t r^2)) t^{-3/2} dt,
// so E||U|| ||V|| is a double integral of the joint Laplace transform
//   phi(s,t) = E exp(-s|U|^2 - t|V|^2) = prod_i [(1+2s p_i)(1+2t p_i) - 4 s t q_i^2]^{-1/2},
// one factor per correlated pair (U_i, V_i) with variances p_i and covariance q_i.
// The trapezoid rule in (log s, log t) converges geometrically for this integrand.
double laplace_norm_product(const double p_in[2], const double q_in[2], double step, double half)
{
    double p[2], q[2], pq[2];
    for (int i = 0; i < 2; ++i) {
        p[i] = std::max(p_in[i], 0.0);
        q[i] = std::min(std::abs(q_in[i]), p[i]);
        pq[i] = p[i] - q[i];
    }
    const double pmax = std::max(p[0], p[1]);
    if (pmax <= 0.0)
        return 0.0;
    const double lo = -half;
    const double hi = half + std::max(0.0, -std::log(pmax));
    const int count = int(std::ceil((hi - lo) / step)) + 1;

    std::vector<double> w(count), one_minus(count), phi(count);
    std::vector<double> u[2], v[2];
    for (int i = 0; i < 2; ++i) {
        u[i].resize(count);
        v[i].resize(count);
    }
    for (int k = 0; k < count; ++k) {
        const double x = lo + k * step;
        const double s = std::exp(x);
        w[k] = std::exp(-0.5 * x) * step;
        double ls = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double den = 1.0 + 2.0 * s * p[i];
            ls += std::log1p(2.0 * s * p[i]);
            u[i][k] = 2.0 * q[i] * s / den;           // 1 - r factorizes as 1 - u(s) u(t)
            v[i][k] = (1.0 + 2.0 * s * pq[i]) / den;  // 1 - u(s)
        }
        one_minus[k] = -std::expm1(-0.5 * ls);
        phi[k] = std::exp(-0.5 * ls);
    }
    // Separable part: (1 - phi(s,0)) (1 - phi(0,t)).
    std::vector<double> wt(count);
    for (int k = 0; k < count; ++k)
        wt[k] = w[k] * one_minus[k];
    const double sep = pairwise_sum(wt);

    // Coupled part: phi(s,0) phi(0,t) (phi(s,t)/(phi(s,0)phi(0,t)) - 1), symmetric in (s,t).
    std::vector<double> rows(count);
    for (int j = 0; j < count; ++j) {
        double acc = 0.0;
        for (int k = j; k < count; ++k) {
            double lsum = 0.0;
            for (int i = 0; i < 2; ++i) {
                if (q[i] == 0.0)
                    continue;
                const double r = u[i][j] * u[i][k];
                // 1 - u_j u_k = v_j + u_j v_k keeps full precision as r -> 1.
                lsum += r < 0.5 ? std::log1p(-r) : std::log(v[i][j] + u[i][j] * v[i][k]);
            }
            const double term = w[k] * phi[k] * std::expm1(-0.5 * lsum);
            acc += k == j ? term : 2.0 * term;
        }
        rows[j] = w[j] * phi[j] * acc;
    }
    const double coupled = pairwise_sum(rows);
    return (sep * sep + coupled) / (4.0 * kPi);
}

OracleValue monte_carlo(const Eigen::Matrix4d& delta, const OracleOptions& opt)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(delta);
    const Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::Matrix4d L = es.eigenvectors() * lam.asDiagonal();
    const long chunk = 1 << 16;
    const long nchunks = (opt.samples + chunk - 1) / chunk;
    std::vector<double> sum(nchunks), sumsq(nchunks);
    parallel_for(std::size_t(nchunks), opt.threads, [&](std::size_t c) {
        std::seed_seq seq{std::uint32_t(opt.seed), std::uint32_t(opt.seed >> 32), std::uint32_t(c), 0x6b72u};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> nd;
        const long count = std::min(chunk, opt.samples - long(c) * chunk);
        double s = 0.0, s2 = 0.0;
        for (long i = 0; i < count; ++i) {
            Eigen::Vector4d z(nd(rng), nd(rng), nd(rng), nd(rng));
            const Eigen::Vector4d y = L * z;
            const double val = std::hypot(y[0], y[1]) * std::hypot(y[2], y[3]);
            s += val;
            s2 += val * val;
        }
        sum[c] = s;
        sumsq[c] = s2;
    });
    const double N = double(opt.samples);
    const double mean = pairwise_sum(sum) / N;
    const double var = std::max(0.0, pairwise_sum(sumsq) / N - mean * mean) * N / (N - 1);
    return {mean, std::sqrt(var / N), OracleMethod::monte_carlo};
}

} // namespace

ConditionalCovariance covariance_from_abc(double a, double b, double c)
{
    ConditionalCovariance cov;
    cov.a = a;
    cov.b = b;
    cov.c = c;
    cov.delta = Eigen::Matrix4d::Identity();
    cov.delta(0, 0) = cov.delta(2, 2) = 1.0 + 2.0 * a;
    cov.delta(0, 2) = cov.delta(2, 0) = 2.0 * b;
    cov.delta(1, 3) = cov.delta(3, 1) = 2.0 * c;
    cov.valid = psd(cov.delta);
    cov.gamma = 0.0;
    cov.one_minus_sq = 1.0;
    return cov;
}

ConditionalCovariance conditional_covariance(const BandWindow& win, double theta)
{
    if (!(theta > 0.0 && theta < kPi))
        throw DomainError("conditional_covariance: theta outside (0, pi)");
    const KernelDetail k = gamma_exact_detail(win, theta);
    const double om = k.one_minus_sq();
    if (!(om > 1e-14))
        throw DegenerateError("conditional_covariance: 1 - Gamma^2 = " + std::to_string(om) + " at theta = "
                              + std::to_string(theta));
    const double G = k.values.gamma, G1 = k.values.dgamma, G2 = k.values.ddgamma;
    const double at = -G1 * G1 / om;
    const double bt = -G2 - G * G1 * G1 / om;
    const double ct = k.f1;
    ConditionalCovariance cov = covariance_from_abc(at / (2 * win.D), bt / (2 * win.D), ct / (2 * win.D));
    cov.theta = theta;
    cov.gamma = G;
    cov.one_minus_sq = om;
    return cov;
}

Eigen::Matrix4d omega_matrix(const BandWindow& win, double theta, int orientation)
{
    const KernelDetail k = gamma_exact_detail(win, theta);
    const double G = k.values.gamma, G1 = k.values.dgamma, G2 = k.values.ddgamma;
    const double o = orientation >= 0 ? 1.0 : -1.0;
    Eigen::Matrix2d A;
    A << 1.0, G, G, 1.0;
    // rows: f(x), f(y); columns: d1 f(x), d2 f(x), d1 f(y), d2 f(y)
    Eigen::Matrix<double, 2, 4> B = Eigen::Matrix<double, 2, 4>::Zero();
    B(0, 2) = o * G1;
    B(1, 0) = -G1;
    Eigen::Matrix4d C = win.D * Eigen::Matrix4d::Identity();
    C(0, 2) = C(2, 0) = -o * G2;
    C(1, 3) = C(3, 1) = k.f1;
    return C - B.transpose() * A.ldlt().solve(B);
}

double b_tilde_sum(const BandWindow& win, double theta)
{
    const double x = std::cos(theta), s = std::sin(theta);
    double p_prev = 1.0, p = x, d_prev = 0.0, d = 1.0, dd_prev = 0.0, dd = 0.0;
    double G = 0.0, S1 = 0.0, S2 = 0.0;
    for (int l = 1; l <= win.n; ++l) {
        if (l >= win.L0) {
            const double w = win.weight(l);
            G += w * p;
            S1 += w * d * s;
            S2 += w * (d * x - dd * s * s);
        }
        const double k = l;
        const double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
        const double d_next = d_prev + (2 * k + 1) * p;
        const double dd_next = dd_prev + (2 * k + 1) * d;
        p_prev = p; p = p_next;
        d_prev = d; d = d_next;
        dd_prev = dd; dd = dd_next;
    }
    return S2 - S1 * S1 / (1.0 - G * G) * G;
}

SeriesValue norm_product_series(double a, double b, double c)
{
    SeriesValue v;
    v.value = kPi / 2 + kPi / 2 * a + kPi / 4 * b * b - kPi / 16 * a * a - 3 * kPi / 8 * a * b * b
              + 3 * kPi / 64 * b * b * b * b;
    v.regime_flag = std::abs(a) > 0.5 || std::abs(b) > 0.5 || std::abs(c) > 0.5;
    return v;
}

OracleValue norm_product_oracle(const Eigen::Matrix4d& delta, const OracleOptions& opt)
{
    if (!psd(delta))
        throw DomainError("norm_product_oracle: covariance is not positive semi-definite");
    if (opt.method == OracleMethod::monte_carlo)
        return monte_carlo(delta, opt);
    if (!block_pattern(delta))
        throw DomainError("norm_product_oracle: quadrature needs the paired block pattern; use monte_carlo");
    const double p[2] = {delta(0, 0), delta(1, 1)};
    const double q[2] = {delta(0, 2), delta(1, 3)};
    return {laplace_norm_product(p, q, opt.step, opt.half_range), 0.0, OracleMethod::quadrature};
}

OracleValue norm_product_oracle(const ConditionalCovariance& cov, const OracleOptions& opt)
{
    return norm_product_oracle(cov.delta, opt);
}

double k_twopoint(const BandWindow& win, double psi, KMethod method, bool raw, const OracleOptions& opt)
{
    if (!(psi > 0.0))
        throw DomainError("k_twopoint: psi must be positive");
    const ConditionalCovariance cov = conditional_covariance(win, win.theta_of(psi));
    double K;
    if (method == KMethod::series) {
        const double a = cov.a, b = cov.b, G2 = cov.gamma * cov.gamma;
        K = 0.25 * (1 + a + b * b / 2 + G2 / 2 - a * a / 8 - 0.75 * a * b * b + 3 * b * b * b * b / 32 + G2 * a / 2
                    + G2 * b * b / 4 + 3 * G2 * G2 / 8);
    } else {
        K = norm_product_oracle(cov, opt).value / (2 * kPi * std::sqrt(cov.one_minus_sq));
    }
    return raw ? win.D * K : K;
}

KAsym k_asymptotic(const BandWindow& win, double psi, double c0)
{
    const Phases ph = phases(win, psi);
    const double T = ph.Theta, B = ph.B;
    const double p2 = kPi * kPi * psi * psi;
    const double v = 0.25 + 1 / (256 * p2) + std::sin(2 * T) / (2 * kPi * psi) - 75 / (256 * p2) * std::cos(4 * T)
                     + 27 / (64 * p2) * std::sin(2 * T) - 1 / (4 * kPi * psi * psi) * std::cos(2 * T)
                     + 1 / (4 * kPi * psi * psi) * std::sin(T) * std::cos(B)
                     - 3 / (2 * kPi * psi * psi) * std::sin(T - kPi / 4) * std::cos(B - 1.25 * kPi);
    return {v, psi <= c0};
}

AppendixTerms appendix_terms(const BandWindow& win, double psi)
{
    const Phases ph = phases(win, psi);
    const double T = ph.Theta, B = ph.B, g = win.g, h = win.h;
    const double pp = kPi * psi;
    const double p2 = pp * pp;
    AppendixTerms t;
    t.a = -1 / pp
          * (1 - std::sin(2 * T) + 6 / psi * g / h * std::sin(T - kPi / 4) * std::cos(B - 1.25 * kPi) + 1 / (2 * pp)
             + std::cos(4 * T) / (2 * pp));
    t.b = std::sqrt(2 / pp)
          * (std::sin(T + kPi / 4) - 5 * g / (2 * psi * h) * std::cos(B - 1.75 * kPi) + std::sin(T - kPi / 4) / psi
             - std::sin(T + kPi / 4) / pp + std::sin(2 * T) * std::sin(T + kPi / 4) / pp);
    t.b2 = 1 / pp
           * (1 + std::sin(2 * T) - 5 / psi * std::cos(T) - 5 / psi * std::sin(T - B) - 2 / psi * std::cos(2 * T) - 1 / pp
              - std::cos(4 * T) / pp);
    t.b4 = (1.5 - std::cos(4 * T) / 2 + 2 * std::sin(2 * T)) / p2;
    t.a2 = (1.5 - std::cos(4 * T) / 2 - 2 * std::sin(2 * T)) / p2;
    t.ab2 = -(0.5 + std::cos(4 * T) / 2) / p2;
    t.a_g2 = t.ab2;
    t.b2_g2 = t.b4;
    t.g4 = 4 / p2 * (0.375 - std::cos(4 * T) / 8 + 0.5 * std::sin(2 * T));
    return t;
}

double mean_nodal_length(const BandWindow& win) { return 2 * kPi * std::sqrt(win.D); }

namespace {

struct Integrand {
    const BandWindow& win;
    KMethod method;
    double series_from;
    OracleOptions oracle;
    bool subtract_quarter;
    double operator()(double psi) const
    {
        // the expansion is posed on theta < pi/2; past the equator c is no longer small
        const bool use_series = method == KMethod::series && psi >= series_from && psi <= win.psi_scale() * kPi / 2;
        const KMethod m = use_series ? KMethod::series : KMethod::oracle;
        const double K = k_twopoint(win, psi, m, false, oracle);
        return (subtract_quarter ? K - 0.25 : K) * std::sin(psi / win.psi_scale());
    }
};

std::vector<double> bulk_edges(double from, double to, Domain domain, double eps)
{
    const double width = kPi / 4;
    if (domain == Domain::hemisphere)
        return quad::uniform_edges(from, to, width);
    // Near theta = pi the field may again be almost (anti)correlated with itself.
    std::vector<double> e = quad::uniform_edges(from, to - 1.0, width);
    std::vector<double> tail = quad::geometric_edges(eps, 1.0, 24);
    for (auto it = tail.rbegin() + 1; it != tail.rend(); ++it)
        e.push_back(to - *it);
    return e;
}

} // namespace

VarianceReport variance_integral(const BandWindow& win, const VarianceOptions& opt)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opt.tol > 0.0))
        throw DomainError("variance_integral: tol must be positive");
    const double ma = win.psi_scale();
    const bool hemi = opt.domain == Domain::hemisphere;
    const double psi_max = hemi ? ma * kPi / 2 : ma * kPi;
    if (!(opt.split_C > opt.eps && opt.split_C < psi_max))
        throw DomainError("variance_integral: split_C outside (eps, psi_max)");

    VarianceReport rep;
    rep.n = win.n;
    rep.g = win.g;
    rep.L0 = win.L0;
    rep.prefactor = (hemi ? 16.0 : 8.0) * kPi * kPi * win.D / ma;
    rep.leading = std::log(double(win.n)) / 32.0;

    const Integrand f{win, opt.method, opt.series_from, {}, true};
    const auto fn = [&](double psi) { return f(psi); };
    const quad::Result r1 = quad::integrate(fn, quad::geometric_edges(opt.eps, opt.split_C, 24), opt.tol, 0.0, opt.threads);
    const quad::Result r2 = quad::integrate(fn, bulk_edges(opt.split_C, psi_max, opt.domain, opt.eps), opt.tol, 0.0,
                                            opt.threads);
    // [0, eps]: the integrand is bounded there, so a one-point rule with its own size as error.
    const double head = f(opt.eps) * opt.eps;
    rep.I1 = rep.prefactor * (r1.value + head);
    rep.I2 = rep.prefactor * r2.value;
    rep.total = rep.I1 + rep.I2;
    rep.quad_error = rep.prefactor * (r1.error + r2.error + std::abs(head));
    rep.evaluations = r1.evaluations + r2.evaluations + 1;
    rep.converged = r1.converged && r2.converged;

    if (opt.method == KMethod::series) {
        const int checks = 64;
        std::vector<double> dev(checks);
        const double lo = std::max(opt.series_from, opt.split_C);
        const double hi = ma * kPi / 2;
        parallel_for(checks, opt.threads, [&](std::size_t i) {
            const double psi = lo + (hi - lo) * (i + 0.5) / checks;
            dev[i] = std::abs(k_twopoint(win, psi, KMethod::series) - k_twopoint(win, psi, KMethod::oracle));
        });
        rep.spot_check = *std::max_element(dev.begin(), dev.end());
    }
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

SecondMoment second_moment(const BandWindow& win, double tol, int threads)
{
    const double ma = win.psi_scale();
    const double psi_max = ma * kPi;
    const double eps = 1e-6;
    const Integrand f{win, KMethod::oracle, 0.0, {}, false};
    const auto fn = [&](double psi) { return f(psi); };
    std::vector<double> edges = quad::geometric_edges(eps, 1.0, 24);
    const std::vector<double> rest = bulk_edges(1.0, psi_max, Domain::sphere, eps);
    edges.insert(edges.end(), rest.begin() + 1, rest.end());
    const quad::Result r = quad::integrate(fn, edges, tol, 0.0, threads);
    const double pref = 8.0 * kPi * kPi * win.D / ma;
    const double head = f(eps) * eps;
    SecondMoment sm;
    sm.value = pref * (r.value + head);
    sm.error = pref * (r.error + std::abs(head));
    sm.mean = mean_nodal_length(win);
    sm.converged = r.converged;
    return sm;
}

} // namespace nodalband
