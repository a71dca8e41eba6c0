#include "nodalband/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodalband/errors.hpp"
#include "nodalband/parallel.hpp"
#include "nodalband/quadrature.hpp"
#include "nodalband/specfun.hpp"

namespace nodalband {

namespace {
constexpr double kPi = std::numbers::pi;

// long double of a 128-bit integer without losing the top bits
long double to_ld(wide v)
{
    const bool neg = v < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    const long double r = (long double)(std::uint64_t)(u >> 64) * 18446744073709551616.0L + (long double)(std::uint64_t)u;
    return neg ? -r : r;
}
} // namespace

PowerSums power_sums(int lo, int hi)
{
    PowerSums ps;
    for (wide l = std::max(lo, 0); l <= hi; ++l) {
        const wide w = 2 * l + 1, lam = l * (l + 1);
        ps.s0 += w;
        ps.s1 += lam * w;
        ps.s2 += lam * lam * w;
    }
    return ps;
}

wide s1_closed(int n)
{
    const wide N = n;
    return N * (N + 1) * (N + 1) * (N + 2) / 2;
}

wide s2_closed(int n)
{
    const wide N = n;
    return N * N * (N + 1) * (N + 1) * (N + 2) * (N + 2) / 3;
}

std::string to_string(wide v)
{
    if (v == 0)
        return "0";
    const bool neg = v < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    std::string s;
    while (u > 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg)
        s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

std::optional<wide> brace_numerator(const PowerSums& ps)
{
    wide a, b, r;
    if (__builtin_mul_overflow(ps.s0, ps.s2, &a) || __builtin_mul_overflow(ps.s1, ps.s1, &b)
        || __builtin_sub_overflow(a, b, &r))
        return std::nullopt;
    return r;
}

double chaos2_variance_exact(const BandWindow& win, double csq)
{
    const PowerSums ps = power_sums(win.L0, win.n);
    const long double C2 = csq;
    // D = C^2 S1 / (8 pi)
    const long double D = C2 * to_ld(ps.s1) / (8 * std::numbers::pi_v<long double>);
    // brace = S2 - C^2 S1^2/(4 pi); with C^2 = 4 pi/S0 this is (S0 S2 - S1^2)/S0
    long double brace;
    const long double c_ratio = C2 * to_ld(ps.s0) / (4 * std::numbers::pi_v<long double>);
    if (const auto num = brace_numerator(ps)) {
        brace = to_ld(*num) / to_ld(ps.s0) + to_ld(ps.s1) * to_ld(ps.s1) / to_ld(ps.s0) * (1 - c_ratio);
    } else {
        // centred weighted sum, free of cancellation
        const long double mean = to_ld(ps.s1) / to_ld(ps.s0);
        long double acc = 0;
        for (long double l = win.L0; l <= win.n; ++l) {
            const long double d = l * (l + 1) - mean;
            acc += (2 * l + 1) * d * d;
        }
        brace = acc + to_ld(ps.s1) * mean * (1 - c_ratio);
    }
    return double(C2 * C2 / (32 * D) * brace);
}

double chaos2_variance_exact(const BandWindow& win) { return chaos2_variance_exact(win, win.Csq); }

double chaos2_variance_asym(const BandWindow& win)
{
    if (win.g == 0.0)
        return 0.0;
    const double g = win.g;
    return 2 * kPi * kPi / 3 * g * (1 + 2 * g - 2 / (win.n * g));
}

ChaosReport chaos_report(const BandWindow& win)
{
    ChaosReport r;
    r.n = win.n;
    r.g = win.g;
    r.var2_exact = chaos2_variance_exact(win);
    r.var2_asym = chaos2_variance_asym(win);
    r.ratio = r.var2_asym != 0.0 ? r.var2_exact / r.var2_asym : 0.0;
    return r;
}

double sample_h2(const std::vector<double>& values, const Mesh& mesh)
{
    if (values.size() != mesh.vertices.size())
        throw DomainError("sample_h2: one value per mesh vertex expected");
    std::vector<double> t(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        t[i] = mesh.weights[i] * specfun::hermite_h(2, values[i]);
    return pairwise_sum(t);
}

double sample_h4(const std::vector<double>& values, const Mesh& mesh)
{
    if (values.size() != mesh.vertices.size())
        throw DomainError("sample_h4: one value per mesh vertex expected");
    std::vector<double> t(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        t[i] = mesh.weights[i] * specfun::hermite_h(4, values[i]);
    return pairwise_sum(t);
}

double sample_h2(const FieldSample& sample, const Mesh& mesh)
{
    check_mesh(mesh, sample.window);
    return sample_h2(evaluate_field(sample, mesh.vertices), mesh);
}

double sample_h4(const FieldSample& sample, const Mesh& mesh)
{
    check_mesh(mesh, sample.window);
    return sample_h4(evaluate_field(sample, mesh.vertices), mesh);
}

namespace {

void mean_var(const std::vector<double>& x, double& mean, double& mean_se, double& var, double& var_se)
{
    const double N = double(x.size());
    mean = pairwise_sum(x) / N;
    std::vector<double> d2(x.size()), d4(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean;
        d2[i] = d * d;
        d4[i] = d2[i] * d2[i];
    }
    var = pairwise_sum(d2) / (N - 1);
    mean_se = std::sqrt(var / N);
    // large-sample spread of the sample variance from the fourth central moment
    const double m4 = pairwise_sum(d4) / N;
    var_se = std::sqrt(std::max(0.0, (m4 - var * var * (N - 3) / (N - 1)) / N));
}

} // namespace

HermiteStats mc_hermite_stats(const BandWindow& win, long n_samples, int level, std::uint64_t seed, int threads)
{
    if (n_samples < 2)
        throw DomainError("mc_hermite_stats: need at least two samples");
    const Mesh mesh = build_mesh(level);
    check_mesh(mesh, win);
    std::vector<double> h2(n_samples), h4(n_samples);
    const std::size_t batch = 32;
    const std::size_t nb = (std::size_t(n_samples) + batch - 1) / batch;
    parallel_for(nb, threads, [&](std::size_t b) {
        std::vector<FieldSample> group;
        for (std::size_t i = b * batch; i < std::min<std::size_t>(std::size_t(n_samples), (b + 1) * batch); ++i)
            group.push_back(sample_field(win, sample_seed(seed, i)));
        const auto values = evaluate_fields(group, mesh.vertices);
        for (std::size_t k = 0; k < group.size(); ++k) {
            h2[b * batch + k] = sample_h2(values[k], mesh);
            h4[b * batch + k] = sample_h4(values[k], mesh);
        }
    });
    HermiteStats s;
    s.n_samples = n_samples;
    mean_var(h2, s.h2_mean, s.h2_mean_stderr, s.h2_var, s.h2_var_stderr);
    mean_var(h4, s.h4_mean, s.h4_mean_stderr, s.h4_var, s.h4_var_stderr);
    return s;
}

double h2_variance_oracle(const BandWindow& win, double tol)
{
    const double scale = 16 * kPi * kPi;
    auto f = [&](double theta) {
        const double gm = gamma_exact(win, theta).gamma;
        return gm * gm * std::sin(theta);
    };
    const auto edges = quad::uniform_edges(0.0, kPi, std::min(kPi / 8, 4.0 / win.n));
    return scale * quad::integrate(f, edges, tol).value;
}

} // namespace nodalband
