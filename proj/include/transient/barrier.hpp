#pragma once

// Stationary scattering off a square barrier of height V0 on |x| < d/2.
//
//   x < -d/2 :  I e^{ik'x} + R e^{-ik'x}      (I = 1)
//   |x| < d/2:  C e^{ik''x} + D e^{-ik''x}
//   x > d/2  :  T e^{ik'x}
//
// with k' = p'/hbar and k'' = sqrt(p'^2 - 2 m V0)/hbar. Momenta may be complex;
// everything here is an analytic function of p' away from p' = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "transient/errors.hpp"

namespace transient {

struct BarrierSpec {
  double V0 = 0.0;  // height (scaled energy); V0 = 0 is accepted as the free case
  double d = 1.0;   // width
  double m = 1.0;   // particle mass

  void validate() const {
    if (!(V0 >= 0.0) || !std::isfinite(V0)) throw InputError("barrier.V0: must be >= 0");
    if (!(d > 0.0) || !std::isfinite(d)) throw InputError("barrier.d: must be positive");
    if (!(m > 0.0) || !std::isfinite(m)) throw InputError("barrier.m: must be positive");
  }

  /// sqrt(2 m V0): the lowest momentum that classically crosses the barrier.
  double threshold_momentum() const { return std::sqrt(2.0 * m * V0); }

  double potential(double x) const { return std::abs(x) < 0.5 * d ? V0 : 0.0; }
};

struct Wavenumbers {
  cplx k_prime;
  cplx k_dprime;
};

struct ScatteringAmplitudes {
  cplx p_prime;
  cplx k_prime;
  cplx k_dprime;
  cplx R, C, D, T;
  cplx Omega;

  /// Stationary wavefunction (without the h^{-1/2} normalisation) at x.
  cplx wavefunction(double x, double d) const {
    const cplx i{0.0, 1.0};
    if (x < -0.5 * d) return std::exp(i * k_prime * x) + R * std::exp(-i * k_prime * x);
    if (x > 0.5 * d) return T * std::exp(i * k_prime * x);
    return C * std::exp(i * k_dprime * x) + D * std::exp(-i * k_dprime * x);
  }
};

inline constexpr double kThresholdSeries = 1e-8;  // |k'' d| below this uses limits

/// Principal branch of the square root for k'': real positive above threshold,
/// positive imaginary below it.
inline Wavenumbers wavenumbers(const BarrierSpec& spec, cplx p_prime, double hbar) {
  if (!(hbar > 0.0)) throw InputError("wavenumbers: hbar must be positive");
  const cplx radicand = p_prime * p_prime - 2.0 * spec.m * spec.V0;
  return {p_prime / hbar, std::sqrt(radicand) / hbar};
}

namespace detail {

// (k''/k' + k'/k'') sin(k'' d) with the k'' -> 0 limit k' d.
inline cplx mixed_sine(cplx k, cplx q, double d) {
  if (std::abs(q * d) < kThresholdSeries) return k * d;
  return (q / k + k / q) * std::sin(q * d);
}

// (k'/k'' - k''/k') sin(k'' d) with the same limit.
inline cplx split_sine(cplx k, cplx q, double d) {
  if (std::abs(q * d) < kThresholdSeries) return k * d;
  return (k / q - q / k) * std::sin(q * d);
}

inline std::array<cplx, 4> solve4(std::array<std::array<cplx, 5>, 4> a) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) == 0.0) throw NumericalError("barrier matching system is singular");
    std::swap(a[col], a[piv]);
    for (int r = col + 1; r < 4; ++r) {
      const cplx factor = a[r][col] / a[col][col];
      for (int c = col; c < 5; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::array<cplx, 4> x{};
  for (int r = 3; r >= 0; --r) {
    cplx acc = a[r][4];
    for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

}  // namespace detail

/// Omega(p') = cos(k''d) - (i/2)(k''/k' + k'/k'') sin(k''d); T = exp(-ik'd)/Omega.
inline cplx omega(const BarrierSpec& spec, cplx p_prime, double hbar) {
  const auto [k, q] = wavenumbers(spec, p_prime, hbar);
  return std::cos(q * spec.d) - cplx{0.0, 0.5} * detail::mixed_sine(k, q, spec.d);
}

/// dOmega/dp'.
inline cplx omega_derivative(const BarrierSpec& spec, cplx p_prime, double hbar) {
  const auto [k, q] = wavenumbers(spec, p_prime, hbar);
  const double d = spec.d;
  const cplx i{0.0, 1.0};
  if (std::abs(q * d) < 1e-4) {
    // Omega is even in q: expand in q^2 around zero.
    // Omega ~ 1 - (i/2) k d + q^2 [ -d^2/2 - (i/2)(d/k - k d^3/6) ] + O(q^4)
    const cplx dOmega_dq2 = -d * d / 2.0 - 0.5 * i * (d / k - k * d * d * d / 6.0);
    const cplx dOmega_dk = -0.5 * i * d;
    // q^2 = k^2 - 2mV0/hbar^2, so dq^2/dp = 2k/hbar.
    return dOmega_dq2 * (2.0 * k / hbar) + dOmega_dk / hbar;
  }
  const cplx s = std::sin(q * d);
  const cplx c = std::cos(q * d);
  const cplx dOmega_dq =
      -d * s - 0.5 * i * ((1.0 / k - k / (q * q)) * s + (q / k + k / q) * d * c);
  const cplx dOmega_dk = -0.5 * i * (-q / (k * k) + 1.0 / q) * s;
  const cplx dq_dp = p_prime / (hbar * hbar * q);
  return dOmega_dq * dq_dp + dOmega_dk / hbar;
}

/// Transmission amplitude from the closed form exp(-ik'd)/Omega.
inline cplx transmission(const BarrierSpec& spec, cplx p_prime, double hbar) {
  const cplx k = p_prime / hbar;
  return std::exp(cplx{0.0, -1.0} * k * spec.d) / omega(spec, p_prime, hbar);
}

/// Solves the four continuity conditions at x = -d/2 and x = +d/2 with I = 1.
/// Near threshold (|k''d| < 1e-8) R and T come from the k'' -> 0 limits, and C, D
/// (which diverge as 1/k'') are evaluated at |k''| = 1e-8/d.
inline ScatteringAmplitudes amplitudes(const BarrierSpec& spec, cplx p_prime, double hbar) {
  if (std::abs(p_prime) == 0.0) throw InputError("amplitudes: p' must be nonzero");
  auto [k, q] = wavenumbers(spec, p_prime, hbar);
  const double d = spec.d;
  const cplx i{0.0, 1.0};
  ScatteringAmplitudes out{p_prime, k, q, {}, {}, {}, {}, omega(spec, p_prime, hbar)};

  if (std::imag(p_prime) == 0.0 && std::abs(out.Omega) < 1e-14) {
    throw NumericalError("amplitudes: |Omega| < 1e-14 at real momentum (degenerate input)");
  }

  const bool near_threshold = std::abs(q * d) < kThresholdSeries;
  if (near_threshold) {
    const cplx phase = std::exp(-i * k * d);
    out.T = phase / out.Omega;
    out.R = -0.5 * i * detail::split_sine(k, q, d) * phase / out.Omega;
    q = cplx{kThresholdSeries / d, 0.0};
    // Interior coefficients from the right edge given T.
    const double b = 0.5 * d;
    const cplx right = out.T * std::exp(i * k * b);
    out.C = 0.5 * right * (1.0 + k / q) * std::exp(-i * q * b);
    out.D = 0.5 * right * (1.0 - k / q) * std::exp(i * q * b);
    return out;
  }

  const double a = -0.5 * d;
  const double b = 0.5 * d;
  const cplx eka = std::exp(i * k * a), ekma = std::exp(-i * k * a);
  const cplx eqa = std::exp(i * q * a), eqma = std::exp(-i * q * a);
  const cplx eqb = std::exp(i * q * b), eqmb = std::exp(-i * q * b);
  const cplx ekb = std::exp(i * k * b);
  // Unknowns ordered R, C, D, T.
  std::array<std::array<cplx, 5>, 4> sys{{
      {ekma, -eqa, -eqma, 0.0, -eka},
      {-k * ekma, -q * eqa, q * eqma, 0.0, -k * eka},
      {0.0, eqb, eqmb, -ekb, 0.0},
      {0.0, q * eqb, -q * eqmb, -k * ekb, 0.0},
  }};
  const auto x = detail::solve4(sys);
  out.R = x[0];
  out.C = x[1];
  out.D = x[2];
  out.T = x[3];

  const cplx expected = std::exp(-i * k * d);
  const cplx product = out.T * out.Omega;
  if (std::abs(product - expected) > 1e-8 * std::max(1.0, std::abs(expected))) {
    throw NumericalError("amplitudes: linear solve disagrees with T = exp(-ik'd)/Omega");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poles

enum class ContourSide { Above, Below };

/// p'_I = p + i0, p'_R = -p - i0, p'_T = p - i0: the value plus which side of
/// the real p' axis the infinitesimal pushes it to.
struct StructuralPole {
  char label;
  cplx value;
  ContourSide side;
};

inline std::array<StructuralPole, 3> structural_poles(double p) {
  return {{{'I', cplx{p, 0.0}, ContourSide::Above},
           {'R', cplx{-p, 0.0}, ContourSide::Below},
           {'T', cplx{p, 0.0}, ContourSide::Below}}};
}

struct ResonancePole {
  cplx p;
  double abs_omega;
};

struct ComplexRect {
  double re_min, re_max, im_min, im_max;

  bool contains(cplx z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct PoleSet {
  std::array<StructuralPole, 3> structural;
  std::vector<ResonancePole> resonances;
};

struct PoleSearchOptions {
  int seeds_re = 0;  // 0: choose from the expected zero spacing
  int seeds_im = 0;
  int max_iterations = 50;
  double tolerance = 1e-10;
  double merge_radius = 1e-6;
};

/// Zeros of Omega in a lower-half-plane rectangle by grid-seeded Newton
/// iteration. Seeds that fail to converge inside the region are dropped.
inline std::vector<ResonancePole> find_resonance_poles(const BarrierSpec& spec, double hbar,
                                                       const ComplexRect& region,
                                                       std::size_t max_count,
                                                       PoleSearchOptions opt = {}) {
  if (!(region.re_max > region.re_min) || !(region.im_max > region.im_min)) {
    throw InputError("find_resonance_poles: empty search rectangle");
  }
  if (region.im_max >= 0.0) {
    throw InputError("find_resonance_poles: search rectangle must lie in Im p' < 0");
  }
  std::vector<ResonancePole> found;
  if (spec.V0 == 0.0) return found;  // |Omega| = 1 identically

  // Zeros sit near k''d = n pi, so seed a few points per zero spacing in k''.
  if (opt.seeds_re <= 0) {
    const double spacing = std::numbers::pi * hbar / spec.d;  // zero spacing in p' far above threshold
    opt.seeds_re = std::clamp(
        static_cast<int>(4.0 * (region.re_max - region.re_min) / spacing) + 8, 16, 4000);
  }
  if (opt.seeds_im <= 0) opt.seeds_im = 24;

  auto residual = [&](cplx z) { return std::abs(omega(spec, z, hbar)); };
  for (int a = 0; a < opt.seeds_re; ++a) {
    for (int b = 0; b < opt.seeds_im; ++b) {
      cplx z{region.re_min + (a + 0.5) * (region.re_max - region.re_min) / opt.seeds_re,
             region.im_min + (b + 0.5) * (region.im_max - region.im_min) / opt.seeds_im};
      bool converged = false;
      for (int it = 0; it < opt.max_iterations; ++it) {
        const cplx f = omega(spec, z, hbar);
        if (std::abs(f) < opt.tolerance) {
          converged = true;
          break;
        }
        const cplx df = omega_derivative(spec, z, hbar);
        if (df == 0.0 || !std::isfinite(std::abs(df))) break;
        z -= f / df;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
      }
      if (!converged || !region.contains(z)) continue;
      const bool duplicate = std::any_of(found.begin(), found.end(), [&](const ResonancePole& r) {
        return std::abs(r.p - z) < opt.merge_radius;
      });
      if (!duplicate) found.push_back({z, residual(z)});
    }
  }
  std::sort(found.begin(), found.end(), [](const ResonancePole& x, const ResonancePole& y) {
    return x.p.real() != y.p.real() ? x.p.real() < y.p.real() : x.p.imag() < y.p.imag();
  });
  if (found.size() > max_count) found.resize(max_count);
  return found;
}

}  // namespace transient
