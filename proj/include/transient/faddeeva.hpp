#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz) on the whole complex plane.
//
// The upper half plane is covered by three regions:
//   |z| < 0.5        Maclaurin series  sum (iz)^n / Gamma(n/2 + 1)
//   0.5 <= |z| < 6   Weideman rational approximation (N = 40 terms)
//   |z| >= 6         Laplace continued fraction
// The lower half plane goes through w(z) = 2 exp(-z^2) - w(-z).

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include "transient/errors.hpp"

namespace transient::faddeeva {

inline constexpr double kMaxArgument = 1e6;
inline constexpr double kSeriesRadius = 0.5;
inline constexpr double kFractionRadius = 6.0;
// exp(709.78) is the largest finite double.
inline constexpr double kMaxExponent = 709.0;

struct WEvaluation {
  cplx z;
  cplx w;
  double est_error = 0.0;
};

namespace detail {

inline constexpr int kWeidemanTerms = 40;

struct WeidemanTable {
  double L = 0.0;
  std::array<double, kWeidemanTerms> a{};  // highest power first
};

inline WeidemanTable make_weideman_table() {
  constexpr int N = kWeidemanTerms;
  constexpr int M = 2 * N;
  constexpr int M2 = 2 * M;
  WeidemanTable tab;
  tab.L = std::sqrt(N / std::numbers::sqrt2);
  // Samples f(t_k) on k = -M+1 .. M-1 with a leading zero, then rotated by M
  // (the even-length fftshift) before the transform.
  std::array<double, M2> f{};
  for (int k = -M + 1; k <= M - 1; ++k) {
    const double theta = k * std::numbers::pi / M;
    const double t = tab.L * std::tan(theta / 2.0);
    f[static_cast<std::size_t>(k + M)] = std::exp(-t * t) * (tab.L * tab.L + t * t);
  }
  std::array<double, M2> g{};
  for (int m = 0; m < M2; ++m) g[static_cast<std::size_t>(m)] = f[static_cast<std::size_t>((m + M) % M2)];
  std::array<double, N + 1> re{};
  for (int j = 1; j <= N; ++j) {
    double acc = 0.0;
    for (int m = 0; m < M2; ++m) {
      acc += g[static_cast<std::size_t>(m)] * std::cos(2.0 * std::numbers::pi * j * m / M2);
    }
    re[static_cast<std::size_t>(j)] = acc / M2;
  }
  for (int j = 1; j <= N; ++j) tab.a[static_cast<std::size_t>(N - j)] = re[static_cast<std::size_t>(j)];
  return tab;
}

inline const WeidemanTable& weideman_table() {
  static const WeidemanTable tab = make_weideman_table();
  return tab;
}

inline cplx series(cplx z, double* err = nullptr) {
  const cplx iz{-z.imag(), z.real()};
  const cplx iz2 = iz * iz;
  cplx even = 1.0;                                          // (iz)^0 / Gamma(1)
  cplx odd = iz * (2.0 / std::sqrt(std::numbers::pi));      // (iz)^1 / Gamma(3/2)
  cplx sum = even + odd;
  double last = 0.0;
  for (int n = 0; n < 60; n += 2) {
    even *= iz2 / (n / 2.0 + 1.0);
    odd *= iz2 / ((n + 1) / 2.0 + 1.0);
    sum += even + odd;
    last = std::abs(even) + std::abs(odd);
    if (last < 1e-18 * std::abs(sum)) break;
  }
  if (err) *err = last + 4e-16 * std::abs(sum);
  return sum;
}

inline cplx weideman(cplx z) {
  const auto& tab = weideman_table();
  const cplx iz{-z.imag(), z.real()};
  const cplx denom = tab.L - iz;
  const cplx Z = (tab.L + iz) / denom;
  cplx p = 0.0;
  for (double c : tab.a) p = p * Z + c;
  return 2.0 * p / (denom * denom) + (1.0 / std::sqrt(std::numbers::pi)) / denom;
}

inline int fraction_depth(double r) { return r < 8.0 ? 40 : (r < 20.0 ? 24 : 12); }

inline cplx continued_fraction(cplx z, int depth) {
  cplx r = 0.0;
  for (int k = depth; k >= 1; --k) r = (0.5 * k) / (z - r);
  return cplx{0.0, 1.0 / std::sqrt(std::numbers::pi)} / (z - r);
}

inline cplx upper(cplx z, double* err = nullptr) {
  const double r = std::abs(z);
  if (r < kSeriesRadius) return series(z, err);
  if (r < kFractionRadius) {
    if (err) *err = 1e-14;
    return weideman(z);
  }
  const int depth = fraction_depth(r);
  const cplx w = continued_fraction(z, depth);
  if (err) *err = std::abs(w - continued_fraction(z, depth / 2)) + 1e-16 * std::abs(w);
  return w;
}

inline std::string describe(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

inline cplx evaluate(cplx z, double* err) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > kMaxArgument) {
    throw InputError("faddeeva: argument outside |z| <= 1e6: z = " + describe(z));
  }
  if (z.imag() >= 0.0) return upper(z, err);
  const cplx mz2 = -z * z;
  if (mz2.real() > kMaxExponent) {
    throw NumericalError("faddeeva: |exp(-z^2)| overflows at z = " + describe(z));
  }
  const cplx gauss = 2.0 * std::exp(mz2);
  const cplx w = gauss - upper(-z, err);
  if (err) *err += 4e-16 * std::abs(gauss);
  return w;
}

}  // namespace detail

/// w(z) = exp(-z^2) erfc(-iz).
inline cplx w(cplx z) { return detail::evaluate(z, nullptr); }

/// w(z) with an estimate of the absolute error of the returned value.
inline WEvaluation evaluate(cplx z) {
  WEvaluation out{z, {}, 0.0};
  out.w = detail::evaluate(z, &out.est_error);
  return out;
}

}  // namespace transient::faddeeva
