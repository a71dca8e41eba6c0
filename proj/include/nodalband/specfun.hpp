#pragma once

namespace nodalband::specfun {

// Legendre polynomial P_l(x) by the three-term recurrence.
double legendre_p(int l, double x);

// d/dx or d^2/dx^2 of P_l at x (order 1 or 2). Derivatives are in x, not in the angle.
double legendre_d(int l, double x, int order);

// Jacobi polynomial P_n^{(a,b)}(x).
double jacobi_p(int n, double a, double b, double x);

// Main term n^{-1/2} k(t) cos(N t + gamma) of the Szego asymptotic at x = cos t.
double jacobi_asymptotic(int n, double a, double b, double t);

// Bessel J0 or J1 for x >= 0.
double bessel_j(int order, double x);

// (t/sin t)^{1/2} J0((l+1/2)t), the Bessel profile of P_l(cos t).
double hilb_approx(int l, double t);

// Probabilists' Hermite polynomial He_q(x).
double hermite_h(int q, double x);

} // namespace nodalband::specfun
