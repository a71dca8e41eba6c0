#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "nodalband/kernel.hpp"

namespace nodalband {

// Conditional covariance of the two gradients given that the field vanishes at both
// points, scaled by the gradient variance D. Coordinates are ordered
// (U1, U2, V1, V2) with index 1 along the geodesic.
struct ConditionalCovariance {
    double theta = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;
    Eigen::Matrix4d delta = Eigen::Matrix4d::Identity();
    bool valid = true;
    double gamma = 0.0;          // Gamma(theta)
    double one_minus_sq = 1.0;   // 1 - Gamma(theta)^2
};

ConditionalCovariance covariance_from_abc(double a, double b, double c);

// theta in (0, pi). Throws DegenerateError when 1 - Gamma^2 <= 1e-14.
ConditionalCovariance conditional_covariance(const BandWindow& win, double theta);

// Unscaled Omega = C - B^T A^{-1} B built as matrices. `orientation` = +1 or -1 flips the
// frame at the second point.
Eigen::Matrix4d omega_matrix(const BandWindow& win, double theta, int orientation = 1);

// b-tilde from the explicit sum over l (as opposed to the theta-derivative form).
double b_tilde_sum(const BandWindow& win, double theta);

struct SeriesValue {
    double value = 0.0;
    bool regime_flag = false;  // some |a|,|b|,|c| > 0.5
};

// Six-term expansion of E||U|| ||V|| in a, b (c enters only through the remainder).
SeriesValue norm_product_series(double a, double b, double c);

enum class OracleMethod { quadrature, monte_carlo };

struct OracleOptions {
    OracleMethod method = OracleMethod::quadrature;
    long samples = 10'000'000;
    std::uint64_t seed = 1;
    int threads = 1;
    double step = 0.6;      // trapezoid step in log s, log t
    double half_range = 50; // log-range on each side of zero
};

struct OracleValue {
    double value = 0.0;
    double stderr_ = 0.0;  // zero for the quadrature method
    OracleMethod method = OracleMethod::quadrature;
};

// E[||U|| ||V||] for (U, V) ~ N(0, delta). The quadrature method requires the block pattern
// delta(0,1) = delta(0,3) = delta(1,2) = delta(2,3) = 0, delta(0,0) = delta(2,2),
// delta(1,1) = delta(3,3); the Monte Carlo method takes any PSD matrix.
OracleValue norm_product_oracle(const Eigen::Matrix4d& delta, const OracleOptions& opt = {});
OracleValue norm_product_oracle(const ConditionalCovariance& cov, const OracleOptions& opt = {});

enum class KMethod { series, oracle };

// Two-point correlation K(psi); raw = true returns D * K (the unscaled Kac-Rice density).
double k_twopoint(const BandWindow& win, double psi, KMethod method, bool raw = false,
                  const OracleOptions& opt = {});

struct KAsym {
    double value = 0.0;
    bool regime_warning = false;
};

// Large-psi expansion of K with seven correction terms.
KAsym k_asymptotic(const BandWindow& win, double psi, double c0 = 1.0);

// Large-psi main terms of the Kac-Rice scalars and of the products entering the series of K.
struct AppendixTerms {
    double a = 0.0, b = 0.0;
    double b2 = 0.0, b4 = 0.0, a2 = 0.0, ab2 = 0.0;
    double a_g2 = 0.0, b2_g2 = 0.0, g4 = 0.0;
};
AppendixTerms appendix_terms(const BandWindow& win, double psi);

enum class Domain { hemisphere, sphere };

struct VarianceOptions {
    double split_C = 1.0;
    double tol = 1e-6;
    double eps = 1e-6;
    KMethod method = KMethod::oracle;
    double series_from = 5.0;  // with KMethod::series, the oracle is used below this psi and past pi/2
    Domain domain = Domain::sphere;  // hemisphere folds theta -> pi - theta, exact only for one parity
    int threads = 1;
};

struct VarianceReport {
    int n = 0;
    double g = 0.0;
    int L0 = 0;
    double I1 = 0.0, I2 = 0.0, total = 0.0;
    double leading = 0.0;     // log(n)/32
    double quad_error = 0.0;
    double prefactor = 0.0;   // constant in front of the psi-integral
    double spot_check = 0.0;  // largest |series - oracle| seen at check points (series mode)
    long evaluations = 0;
    bool converged = false;
    double wall_time = 0.0;
};

VarianceReport variance_integral(const BandWindow& win, const VarianceOptions& opt = {});

struct SecondMoment {
    double value = 0.0;
    double error = 0.0;
    double mean = 0.0;  // 2 pi sqrt(D)
    bool converged = false;
};

// E[L^2] from the raw density over the whole sphere (theta in [0, pi]).
SecondMoment second_moment(const BandWindow& win, double tol = 1e-6, int threads = 1);

double mean_nodal_length(const BandWindow& win);

} // namespace nodalband
