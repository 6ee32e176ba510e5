#pragma once

#include <complex>

namespace hgbm {

using Complex = std::complex<double>;

// Principal-enough log Gamma: exp(log_gamma(z)) = Gamma(z); the imaginary part
// is only determined modulo 2 pi.
Complex log_gamma(Complex z);

// 1 / Gamma(z), exactly zero at the poles.
Complex reciprocal_gamma(Complex z);

Complex digamma(Complex z);

// Rising factorial (x)_j.
double pochhammer(double x, int j);

// Gauss hypergeometric function 2F1(a, b; c; z) for real z <= 1.
// |z| <= 0.5: power series. z < -0.5: Pfaff transformation to z / (z - 1).
// z in (0.5, 1): connection formula in 1 - z, with the logarithmic form when
// c - a - b is an integer. z = 1: Gauss summation (requires Re(c - a - b) > 0).
Complex gauss_2f1(Complex a, Complex b, Complex c, double z);
double gauss_2f1(double a, double b, double c, double z);

}  // namespace hgbm
