#pragma once

#include <string>

namespace nodalband {

// Frequency window [L0, n] of the band-limited field and its normalization constants.
struct BandWindow {
    int n = 0;
    double g = 0.0;
    int L0 = 0;
    double m = 0.0;     // n + 1/2
    double Csq = 0.0;   // 4 pi / sum (2l+1)
    double D = 0.0;     // variance of one gradient component
    double h = 0.0;     // g/(1-g) (1 + 1/(2n)) + 1/n
    long long modes = 0; // sum_{l=L0}^{n} (2l+1)

    // theta = psi / ((1-g) m)
    double psi_scale() const { return (1.0 - g) * m; }
    double theta_of(double psi) const { return psi / psi_scale(); }
    double psi_of(double theta) const { return theta * psi_scale(); }
    double weight(int l) const;  // Csq (2l+1)/(4 pi)
};

// L0 = ceil((1-g) n); requires n >= 4, g in (0,1) and at least two frequencies.
BandWindow make_window(int n, double g);

// Explicit window [lo, hi]; lo == hi gives a single spherical harmonic (g = 1 - lo/hi).
BandWindow make_band(int lo, int hi);

enum class KernelMethod { exact_sum, cd_form, asymptotic };
std::string to_string(KernelMethod m);

// Gamma and its first two derivatives with respect to theta.
struct KernelValues {
    double theta = 0.0;
    double gamma = 0.0;
    double dgamma = 0.0;
    double ddgamma = 0.0;
    KernelMethod method = KernelMethod::exact_sum;
};

// Exact sum plus the pieces the Kac-Rice code needs: F1 = Csq sum w P'_l(cos theta),
// and 1 - Gamma, 1 + Gamma evaluated without cancellation.
struct KernelDetail {
    KernelValues values;
    double f1 = 0.0;
    double one_minus = 0.0;
    double one_plus = 0.0;
    double one_minus_sq() const { return one_minus * one_plus; }  // 1 - Gamma^2
};

KernelValues gamma_exact(const BandWindow& win, double theta);
KernelDetail gamma_exact_detail(const BandWindow& win, double theta);
KernelValues gamma_cd(const BandWindow& win, double theta);

// Large-psi main terms in the rescaled angle psi. The flag is set when psi <= 1.
struct AsymValue {
    double value = 0.0;
    bool regime_warning = false;
};
AsymValue gamma_asym(const BandWindow& win, double psi);
AsymValue gamma_sq_asym(const BandWindow& win, double psi);
AsymValue gamma_d1sq_asym(const BandWindow& win, double psi);
AsymValue gamma_d2_asym(const BandWindow& win, double psi);

// Phases used by the expansions: A = (n+1) theta, B = L0 theta, Theta = (A+B)/2.
struct Phases {
    double A = 0.0, B = 0.0, Theta = 0.0;
};
Phases phases(const BandWindow& win, double psi);

} // namespace nodalband
