#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;

/// Adaptive Gauss-Kronrod over [a, b], real and imaginary parts separately.
template <class F>
cplx integrate(F f, double a, double b, double tol = 1e-14) {
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 61>::integrate([&](double t) { return f(t).real(); }, a, b, 20, tol);
  const double im = gauss_kronrod<double, 61>::integrate([&](double t) { return f(t).imag(); }, a, b, 20, tol);
  return {re, im};
}

/// w(z) = (i/pi) int e^{-t^2}/(z - t) dt along the real axis, Im z > 0.
inline cplx faddeeva_quadrature(cplx z) {
  const auto f = [z](double t) { return std::exp(-t * t) / (z - t); };
  const double c = std::clamp(z.real(), -8.0, 8.0);
  const cplx sum = integrate(f, -9.0, c) + integrate(f, c, 9.0);
  return cplx{0.0, 1.0 / std::numbers::pi} * sum;
}

/// Dawson integral F(x) = int_0^x exp(t^2 - x^2) dt.
inline double dawson(double x) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([x](double t) { return std::exp((t - x) * (t + x)); }, 0.0,
                                              x, 20, 1e-15);
}

/// e * erfc(1) from the Maclaurin series of erf in long double.
inline long double e_erfc1() {
  long double term = 1.0L, sum = 0.0L;  // term = (-1)^n / n!
  for (int n = 0; n < 60; ++n) {
    sum += term / (2 * n + 1);
    term *= -1.0L / (n + 1);
  }
  const long double erf1 = 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
  return std::exp(1.0L) * (1.0L - erf1);
}

}  // namespace oracle
