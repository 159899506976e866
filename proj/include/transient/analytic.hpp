#pragma once

// Uniform saddle-point approximation of the momentum-space wavefunction
// during a Gaussian-packet collision with a square barrier.
//
// Keeping only the incidence and transmission components of the stationary
// states and the structural poles p' = p +- i0,
//
//   psi(p,t) ~ h^{-1/2} pi tau hbar exp(-delta_x p_c^2/hbar^2 + eta^2) exp(ipd/2hbar)
//              * [ w(u_I) + T(p) w(-u_T) ],
//
// with u_I = u_T = u = (p - s)/f, s the complex saddle of the phase
//   phi(p') = -i p'^2 t/(2 m hbar) - delta_x (p' - p_c)^2/hbar^2 + i p'(alpha delta_x - d/2)/hbar
// and f = (delta_x/hbar^2 + i t/(2 m hbar))^{-1/2}. The prefactor
// h^{-1/2} pi tau hbar collapses to (1/2)(2 delta_x/(pi hbar^2))^{1/4}.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "transient/barrier.hpp"
#include "transient/distribution.hpp"
#include "transient/errors.hpp"
#include "transient/faddeeva.hpp"

namespace transient {

/// Minimum-uncertainty Gaussian
///   <p'|psi(0)> = (2 delta_x/(pi hbar^2))^{1/4} exp(-delta_x (p'-p_c)^2/hbar^2 + i p' alpha delta_x/hbar),
/// centred in space at x0 = -alpha delta_x with position variance delta_x.
struct GaussianPacket {
  double delta_x = 1.0;
  double p_c = 1.0;
  double alpha = 1.0;
  double hbar = 1.0;

  static GaussianPacket from_center(double delta_x, double p_c, double x0, double hbar) {
    return {delta_x, p_c, -x0 / delta_x, hbar};
  }

  double x0() const { return -alpha * delta_x; }
  double sigma_x() const { return std::sqrt(delta_x); }
  double sigma_p() const { return hbar / (2.0 * std::sqrt(delta_x)); }

  /// Probability mass of the initial momentum density below p' = 0.
  double negative_momentum_weight() const {
    return 0.5 * std::erfc(p_c * std::sqrt(2.0 * delta_x) / hbar);
  }

  void validate() const {
    if (!(delta_x > 0.0) || !std::isfinite(delta_x)) throw InputError("packet.delta_x: must be positive");
    if (!(p_c > 0.0) || !std::isfinite(p_c)) throw InputError("packet.p_c: must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("packet.alpha: must be positive (start left of the barrier)");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InputError("packet.hbar: must be positive");
  }

  /// Also checks the packet is clear of the barrier at 3 sigma and carries
  /// negligible negative momenta.
  void validate(const BarrierSpec& barrier) const {
    validate();
    if (x0() + 3.0 * sigma_x() >= -0.5 * barrier.d) {
      throw InputError("packet: initial state overlaps the barrier (x0 + 3 sigma >= -d/2)");
    }
    if (negative_momentum_weight() >= 1e-6) {
      throw InputError("packet: negative-momentum weight >= 1e-6");
    }
  }
};

inline cplx gaussian_amp(const GaussianPacket& g, double p_prime) {
  const double norm = std::pow(2.0 * g.delta_x / (std::numbers::pi * g.hbar * g.hbar), 0.25);
  const double dp = p_prime - g.p_c;
  return norm * std::exp(cplx{-g.delta_x * dp * dp / (g.hbar * g.hbar),
                              p_prime * g.alpha * g.delta_x / g.hbar});
}

inline double gaussian_density(const GaussianPacket& g, double p_prime) {
  return std::norm(gaussian_amp(g, p_prime));
}

struct SaddleData {
  double t = 0.0;
  cplx s;         // saddle point
  cplx f;         // scale: u = (p' - s)/f, Re f > 0
  cplx eta;       // eta^2 = B^2/(4A)
  cplx exponent;  // eta^2 - delta_x p_c^2/hbar^2, cancelled analytically
  double tau = 0.0;
  double slope = 0.0;  // -t hbar/(2 m delta_x)
  cplx direction;      // unit vector along the line p' = s + f u, u real
};

inline SaddleData saddle_data(const GaussianPacket& g, const BarrierSpec& b, double t) {
  if (!(t >= 0.0)) throw InputError("saddle_data: t must be >= 0");
  const double hb = g.hbar;
  const double dl = g.delta_x;
  const double shift = g.alpha * dl - 0.5 * b.d;  // alpha delta_x - d/2
  const double a = t / (2.0 * b.m * hb);
  const cplx A{dl / (hb * hb), a};                          // f^{-2}
  const cplx B{2.0 * dl * g.p_c / (hb * hb), shift / hb};   // linear coefficient of phi

  SaddleData out;
  out.t = t;
  out.s = B / (2.0 * A);
  out.f = 1.0 / std::sqrt(A);
  out.eta = B / std::sqrt(4.0 * A);
  // B^2 - 4 A delta_x p_c^2/hbar^2: the delta_x^2 p_c^2/hbar^4 terms cancel exactly.
  const cplx numer{-shift * shift / (hb * hb),
                   4.0 * dl * g.p_c * shift / (hb * hb * hb) - 4.0 * a * dl * g.p_c * g.p_c / (hb * hb)};
  out.exponent = numer / (4.0 * A);
  out.tau = std::pow(2.0 * dl / (std::numbers::pi * hb * hb), 0.25) / std::sqrt(2.0 * std::numbers::pi * hb);
  out.slope = -t * hb / (2.0 * b.m * dl);
  out.direction = out.f / std::abs(out.f);
  return out;
}

struct MomentumAmplitude {
  double p = 0.0;
  cplx psi;
  cplx incident_term;
  cplx transmitted_term;
};

namespace detail {

// exp(log_scale) * w(z) without forming exp(log_scale) or w(z) separately
// when either alone would leave the double range.
inline cplx scaled_w(cplx log_scale, cplx z) {
  cplx out;
  if (z.imag() >= 0.0) {
    out = std::exp(log_scale) * faddeeva::w(z);
  } else {
    out = 2.0 * std::exp(log_scale - z * z) - std::exp(log_scale) * faddeeva::w(-z);
  }
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) {
    throw NumericalError("psi_IT0: amplitude overflow (log prefactor = " +
                         std::to_string(log_scale.real()) + ")");
  }
  return out;
}

inline cplx log_prefactor(const GaussianPacket& g, const BarrierSpec& b, const SaddleData& sd,
                          double p) {
  const double hb = g.hbar;
  const double log_norm =
      std::log(0.5) + 0.25 * std::log(2.0 * g.delta_x / (std::numbers::pi * hb * hb));
  const cplx lp = log_norm + sd.exponent + cplx{0.0, p * b.d / (2.0 * hb)};
  if (lp.real() > faddeeva::kMaxExponent) {
    throw NumericalError("psi_IT0: combined exponent overflows: Re = " + std::to_string(lp.real()));
  }
  return lp;
}

}  // namespace detail

inline MomentumAmplitude psi_it0(const GaussianPacket& g, const BarrierSpec& b,
                                 const SaddleData& sd, double p) {
  if (!(p > 0.0)) throw InputError("psi_IT0: p must be positive");
  const cplx u = (p - sd.s) / sd.f;
  const cplx lp = detail::log_prefactor(g, b, sd, p);
  MomentumAmplitude out;
  out.p = p;
  out.incident_term = detail::scaled_w(lp, u);
  out.transmitted_term = detail::scaled_w(lp + std::log(transmission(b, p, g.hbar)), -u);
  out.psi = out.incident_term + out.transmitted_term;
  return out;
}

inline MomentumAmplitude psi_it0(const GaussianPacket& g, const BarrierSpec& b, double p,
                                 double t) {
  return psi_it0(g, b, saddle_data(g, b, t), p);
}

/// |psi_IT0|^2 sampled on p_grid.
inline MomentumDistribution analytic_distribution(const GaussianPacket& g, const BarrierSpec& b,
                                                  double t, std::span<const double> p_grid) {
  const SaddleData sd = saddle_data(g, b, t);
  MomentumDistribution out;
  out.t = t;
  out.p.assign(p_grid.begin(), p_grid.end());
  out.density.reserve(p_grid.size());
  for (double p : p_grid) out.density.push_back(std::norm(psi_it0(g, b, sd, p).psi));
  return out;
}

/// One Argand sample: the two terms of psi_IT0 and their w-function anatomy.
/// incident = pref_I * w(u_I), transmitted = pref_T * (-w(-u_T)).
struct ArgandPoint {
  double p = 0.0;
  cplx incident;
  cplx transmitted;
  cplx w_uI;
  cplx mw_muT;
  cplx pref_I;
  cplx pref_T;
};

inline std::vector<ArgandPoint> argand_scan(const GaussianPacket& g, const BarrierSpec& b,
                                            double t, std::span<const double> p_grid) {
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 0.0)) throw InputError("argand_scan: momenta must be positive");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) {
      throw InputError("argand_scan: momenta must be strictly increasing");
    }
  }
  const SaddleData sd = saddle_data(g, b, t);
  std::vector<ArgandPoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    const MomentumAmplitude amp = psi_it0(g, b, sd, p);
    const cplx u = (p - sd.s) / sd.f;
    const cplx pref = std::exp(detail::log_prefactor(g, b, sd, p));
    out.push_back({p, amp.incident_term, amp.transmitted_term, faddeeva::w(u),
                   -faddeeva::w(-u), pref, -pref * transmission(b, p, g.hbar)});
  }
  return out;
}

/// Distance from z to the steepest-descent line through the saddle.
inline double distance_to_sdp(const SaddleData& sd, cplx z) {
  return std::abs(std::imag((z - sd.s) * std::conj(sd.direction)));
}

/// Resonance poles within `radius` of the steepest-descent line. A non-empty
/// result means the dropped pole residues may matter at this time.
inline std::vector<ResonancePole> poles_near_sdp(const SaddleData& sd,
                                                 std::span<const ResonancePole> poles,
                                                 double radius = 3.0) {
  std::vector<ResonancePole> near;
  for (const auto& r : poles) {
    if (distance_to_sdp(sd, r.p) < radius) near.push_back(r);
  }
  return near;
}

}  // namespace transient
