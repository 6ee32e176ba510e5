#include "hgbm/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hgbm/errors.hpp"

namespace hgbm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesEps = 1e-17;
constexpr int kMaxTerms = 20000;

// Lanczos approximation, g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// Nearest integer to a complex value that is (numerically) real and integral, or false.
bool integer_value(Complex z, double tol, long& m) {
  if (std::abs(z.imag()) > tol) return false;
  const double r = std::round(z.real());
  if (std::abs(z.real() - r) > tol) return false;
  m = static_cast<long>(r);
  return true;
}

Complex series(Complex a, Complex b, Complex c, double z) {
  Complex term = 1.0;
  Complex sum = 1.0;
  for (int n = 0; n < kMaxTerms; ++n) {
    term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
    sum += term;
    if (std::abs(term) <= kSeriesEps * std::abs(sum)) {
      // guard against a single accidental small term
      const Complex next = term * (a + double(n + 1)) * (b + double(n + 1)) / ((c + double(n + 1)) * double(n + 2)) * z;
      if (std::abs(next) <= kSeriesEps * std::abs(sum)) return sum + next;
    }
    if (term == 0.0) return sum;
  }
  throw AccuracyError("gauss_2f1: power series did not converge");
}

Complex terminating(Complex a, Complex b, Complex c, double z) {
  // one of a, b is a nonpositive integer: finite sum
  const double na = is_nonpositive_integer(a) ? -a.real() : 1e300;
  const double nb = is_nonpositive_integer(b) ? -b.real() : 1e300;
  const long terms = static_cast<long>(std::min(na, nb));
  Complex term = 1.0;
  Complex sum = 1.0;
  for (long n = 0; n < terms; ++n) {
    term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
    sum += term;
  }
  return sum;
}

// Gamma(p1) Gamma(p2) / (Gamma(q1) Gamma(q2)), with 1/Gamma = 0 at poles.
Complex gamma_ratio(Complex p1, Complex p2, Complex q1, Complex q2) {
  if (is_nonpositive_integer(q1) || is_nonpositive_integer(q2)) return 0.0;
  return std::exp(log_gamma(p1) + log_gamma(p2) - log_gamma(q1) - log_gamma(q2));
}

// c = a + b + m with integer m >= 0, 0 < 1 - z <= 0.5 (logarithmic case).
Complex log_case(Complex a, Complex b, long m, double z) {
  const Complex c = a + b + double(m);
  const double y = 1.0 - z;
  Complex finite = 0.0;
  if (m > 0) {
    // Gamma(c) / (Gamma(a + m) Gamma(b + m)) sum_{n<m} (a)_n (b)_n (m - n - 1)! / n! (z - 1)^n
    const Complex pref = std::exp(log_gamma(c) - log_gamma(a + double(m)) - log_gamma(b + double(m)));
    Complex poch = 1.0;
    Complex sum = 0.0;
    for (long n = 0; n < m; ++n) {
      sum += poch * std::tgamma(double(m - n)) / std::tgamma(double(n + 1)) * std::pow(-y, double(n));
      poch *= (a + double(n)) * (b + double(n));
    }
    finite = pref * sum;
  }
  // - (z - 1)^m Gamma(c) / (Gamma(a) Gamma(b)) sum_n (a+m)_n (b+m)_n / (n! (n+m)!) y^n
  //   [ln y - psi(n+1) - psi(n+m+1) + psi(a+n+m) + psi(b+n+m)]
  const Complex pref = std::pow(-y, double(m)) * std::exp(log_gamma(c)) * reciprocal_gamma(a) * reciprocal_gamma(b);
  const double log_y = std::log(y);
  double psi_n1 = -std::numbers::egamma;  // psi(1)
  double psi_nm1 = psi_n1;
  for (long j = 1; j <= m; ++j) psi_nm1 += 1.0 / double(j);
  Complex psi_a = digamma(a + double(m));
  Complex psi_b = digamma(b + double(m));
  Complex coeff = 1.0 / std::tgamma(double(m + 1));
  Complex sum = 0.0;
  for (long n = 0; n < kMaxTerms; ++n) {
    const Complex term = coeff * (log_y - psi_n1 - psi_nm1 + psi_a + psi_b);
    sum += term;
    if (std::abs(term) <= kSeriesEps * std::abs(sum) && n > 2) return finite - pref * sum;
    coeff *= (a + double(m + n)) * (b + double(m + n)) / (double(n + 1) * double(n + m + 1)) * y;
    psi_n1 += 1.0 / double(n + 1);
    psi_nm1 += 1.0 / double(n + m + 1);
    psi_a += 1.0 / (a + double(m + n));
    psi_b += 1.0 / (b + double(m + n));
  }
  throw AccuracyError("gauss_2f1: logarithmic series did not converge");
}

Complex connection(Complex a, Complex b, Complex c, double z);

// c - a - b exactly an integer.
Complex integer_case(Complex a, Complex b, Complex c, long m, double z) {
  if (m >= 0) return log_case(a, b, m, z);
  // Euler: F(a, b; c; z) = (1 - z)^{c-a-b} F(c - a, c - b; c; z), which has c - a' - b' = -m > 0
  return std::pow(1.0 - z, double(m)) * log_case(c - a, c - b, -m, z);
}

Complex connection(Complex a, Complex b, Complex c, double z) {
  const Complex s = c - a - b;
  const double y = 1.0 - z;
  long m = 0;
  if (integer_value(s, 1e-14, m)) return integer_case(a, b, a + b + double(m), m, z);
  constexpr double delta = 1e-5;
  long near = 0;
  if (integer_value(s, delta, near)) {
    // quadratic interpolation in c through the integer case and c - a - b = near +- delta
    const Complex d = s - double(near);
    const Complex f0 = integer_case(a, b, a + b + double(near), near, z);
    const Complex fp = connection(a, b, a + b + double(near) + delta, z);
    const Complex fm = connection(a, b, a + b + double(near) - delta, z);
    return f0 + d * (fp - fm) / (2.0 * delta) + d * d * (fp - 2.0 * f0 + fm) / (2.0 * delta * delta);
  }
  const Complex t1 = gamma_ratio(c, s, c - a, c - b) * series(a, b, 1.0 - s, y);
  const Complex t2 = std::exp(s * std::log(y)) * gamma_ratio(c, -s, a, b) * series(c - a, c - b, 1.0 + s, y);
  return t1 + t2;
}

}  // namespace

Complex log_gamma(Complex z) {
  if (z.real() < 0.5) {
    if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole");
    // reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
    return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
  }
  z -= 1.0;
  Complex x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  const Complex t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

Complex reciprocal_gamma(Complex z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

Complex digamma(Complex z) {
  if (z.real() < 0.5) {
    if (is_nonpositive_integer(z)) throw DomainError("digamma: pole");
    return digamma(1.0 - z) - kPi / std::tan(kPi * z);
  }
  Complex shift = 0.0;
  while (std::abs(z) < 12.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  const Complex r = 1.0 / z;
  const Complex r2 = r * r;
  const Complex tail =
      r2 * (1.0 / 12 - r2 * (1.0 / 120 - r2 * (1.0 / 252 - r2 * (1.0 / 240 - r2 * (1.0 / 132)))));
  return shift + std::log(z) - 0.5 * r - tail;
}

double pochhammer(double x, int j) {
  double p = 1.0;
  for (int i = 0; i < j; ++i) p *= x + i;
  return p;
}

Complex gauss_2f1(Complex a, Complex b, Complex c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
  if (!(z <= 1.0)) throw DomainError("gauss_2f1: requires real z <= 1");
  if (z == 0.0) return 1.0;
  if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) return terminating(a, b, c, z);
  if (z == 1.0) {
    if (!((c - a - b).real() > 0.0)) throw DomainError("gauss_2f1: divergent at z = 1 (c - a - b <= 0)");
    return gamma_ratio(c, c - a - b, c - a, c - b);
  }
  if (std::abs(z) <= 0.5) return series(a, b, c, z);
  if (z < -0.5) {
    // Pfaff: (1 - z)^{-a} F(a, c - b; c; z / (z - 1))
    const double x = z / (z - 1.0);
    return std::exp(-a * std::log(1.0 - z)) * gauss_2f1(a, c - b, c, x);
  }
  return connection(a, b, c, z);
}

double gauss_2f1(double a, double b, double c, double z) {
  return gauss_2f1(Complex(a), Complex(b), Complex(c), z).real();
}

}  // namespace hgbm
