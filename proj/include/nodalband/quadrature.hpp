#pragma once

#include <functional>
#include <vector>

namespace nodalband::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

// 15-point Kronrod rule with the embedded 7-point Gauss error estimate.
Estimate gk15(const std::function<double(double)>& f, double a, double b);

struct Result {
    double value = 0.0;
    double error = 0.0;
    double abs_value = 0.0;  // integral of |f| as seen by the rule, used for scaling
    long evaluations = 0;
    int panels = 0;
    bool converged = false;
};

// Adaptive integration over the given breakpoints. Panels are refined by bisection in
// rounds until each one meets rel_tol * |integral| * (width / total width).
// Evaluation inside a round runs on `threads` workers.
Result integrate(const std::function<double(double)>& f, const std::vector<double>& edges,
                 double rel_tol, double abs_tol = 0.0, int threads = 1, int max_rounds = 14);

// Breakpoints lo, lo*r, lo*r^2, ..., hi with `count` geometric panels.
std::vector<double> geometric_edges(double lo, double hi, int count);

// Uniform panels of width at most `width` covering [lo, hi].
std::vector<double> uniform_edges(double lo, double hi, double width);

} // namespace nodalband::quad
