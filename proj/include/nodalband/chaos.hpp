#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nodalband/field.hpp"
#include "nodalband/kernel.hpp"

namespace nodalband {

using wide = __int128;

// Direct integer sums over l in [lo, hi]: s0 = sum (2l+1), s1 = sum l(l+1)(2l+1),
// s2 = sum l^2(l+1)^2(2l+1).
struct PowerSums {
    wide s0 = 0, s1 = 0, s2 = 0;
};

PowerSums power_sums(int lo, int hi);

// Closed forms over l = 1..n.
wide s1_closed(int n);  // n(n+1)^2(n+2)/2
wide s2_closed(int n);  // n^2(n+1)^2(n+2)^2/3

std::string to_string(wide v);

// S0*S2 - S1^2 in exact arithmetic; nullopt if it overflows 128 bits.
std::optional<wide> brace_numerator(const PowerSums& ps);

// Variance of the second chaotic component of the nodal length, exact in n:
// C^4/(32 D) * (S2 - C^2 S1^2/(4 pi)) with C^2 = 4 pi / S0.
double chaos2_variance_exact(const BandWindow& win);

// Same, with the caller's C^2 in place of 4 pi / S0.
double chaos2_variance_exact(const BandWindow& win, double csq);

// (2 pi^2/3) g (1 + 2g - 2/(n g)); zero for g = 0.
double chaos2_variance_asym(const BandWindow& win);

struct ChaosReport {
    int n = 0;
    double g = 0.0;
    double var2_exact = 0.0;
    double var2_asym = 0.0;
    double ratio = 0.0;  // exact / asym
    std::optional<double> h2_var, h2_var_stderr, h4_var, h4_var_stderr;
};

ChaosReport chaos_report(const BandWindow& win);

// Integrals over the sphere of H2 and H4 of the field, from vertex values and
// Voronoi weights.
double sample_h2(const std::vector<double>& values, const Mesh& mesh);
double sample_h4(const std::vector<double>& values, const Mesh& mesh);
double sample_h2(const FieldSample& sample, const Mesh& mesh);
double sample_h4(const FieldSample& sample, const Mesh& mesh);

struct HermiteStats {
    long n_samples = 0;
    double h2_mean = 0.0, h2_mean_stderr = 0.0, h2_var = 0.0, h2_var_stderr = 0.0;
    double h4_mean = 0.0, h4_mean_stderr = 0.0, h4_var = 0.0, h4_var_stderr = 0.0;
};

HermiteStats mc_hermite_stats(const BandWindow& win, long n_samples, int level, std::uint64_t seed,
                              int threads = 1);

// 2 * int int Gamma^2 over the sphere squared = 16 pi^2 int_0^pi Gamma(theta)^2 sin theta dtheta.
double h2_variance_oracle(const BandWindow& win, double tol = 1e-10);

} // namespace nodalband
