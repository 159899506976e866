#pragma once

// G^q(p,t) = int_p^inf ( |psi(p',t)|^2 - |psi(p',0)|^2 ) dp', its maximum over
// (p,t), and the classical-ensemble counterpart.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "transient/analytic.hpp"
#include "transient/barrier.hpp"
#include "transient/distribution.hpp"
#include "transient/errors.hpp"
#include "transient/split_operator.hpp"

namespace transient {

/// G^q along the sample grid of two distributions, integrated down from the
/// top of the grid with the trapezoid rule on linearly interpolated densities.
class GqProfile {
 public:
  GqProfile(const MomentumDistribution& dist_t, const MomentumDistribution& dist_0) {
    if (dist_t.p != dist_0.p || dist_t.density.size() != dist_t.p.size() ||
        dist_0.density.size() != dist_0.p.size()) {
      throw InputError("gq: distributions are not sampled on the same momenta");
    }
    if (dist_t.p.size() < 2) throw InputError("gq: need at least two momentum samples");
    p_ = dist_t.p;
    const std::size_t n = p_.size();
    delta_.resize(n);
    for (std::size_t i = 0; i < n; ++i) delta_[i] = dist_t.density[i] - dist_0.density[i];
    value_.assign(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
      value_[i] = value_[i + 1] + 0.5 * (delta_[i] + delta_[i + 1]) * (p_[i + 1] - p_[i]);
    }
  }

  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& values() const { return value_; }

  double operator()(double p) const {
    if (p < p_.front() || p > p_.back()) throw InputError("gq: p outside the sampled range");
    auto it = std::upper_bound(p_.begin(), p_.end(), p);
    if (it == p_.end()) return 0.0;
    const std::size_t j = static_cast<std::size_t>(it - p_.begin());  // p_[j-1] <= p < p_[j]
    const double h = p_[j] - p_[j - 1];
    const double frac = (p - p_[j - 1]) / h;
    const double delta_p = delta_[j - 1] + frac * (delta_[j] - delta_[j - 1]);
    return value_[j] + 0.5 * (delta_p + delta_[j]) * (p_[j] - p);
  }

  /// Maximum of G^q over p in [lo, hi], refined inside the bracketing cell to
  /// the zero crossing of the interpolated density difference.
  std::pair<double, double> max_in(double lo, double hi) const {
    double best = -std::numeric_limits<double>::infinity();
    double best_p = lo;
    auto consider = [&](double p) {
      const double v = (*this)(p);
      if (v > best) {
        best = v;
        best_p = p;
      }
    };
    consider(std::clamp(lo, p_.front(), p_.back()));
    consider(std::clamp(hi, p_.front(), p_.back()));
    for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
      if (p_[i + 1] < lo || p_[i] > hi) continue;
      if (p_[i] >= lo && p_[i] <= hi) consider(p_[i]);
      if (delta_[i] < 0.0 && delta_[i + 1] > 0.0) {
        const double root = p_[i] + (p_[i + 1] - p_[i]) * (-delta_[i]) / (delta_[i + 1] - delta_[i]);
        if (root >= lo && root <= hi) consider(root);
      }
    }
    return {best, best_p};
  }

 private:
  std::vector<double> p_;
  std::vector<double> delta_;
  std::vector<double> value_;
};

inline double gq(const MomentumDistribution& dist_t, const MomentumDistribution& dist_0, double p) {
  return GqProfile(dist_t, dist_0)(p);
}

// ---------------------------------------------------------------------------
// Distribution sources

class DistributionSource {
 public:
  virtual ~DistributionSource() = default;
  virtual MomentumDistribution at(double t) = 0;
  virtual const MomentumDistribution& initial() const = 0;
  virtual std::string name() const = 0;
};

/// |psi_IT0|^2 on a fixed momentum grid. The t = 0 distribution is the
/// prepared Gaussian itself.
class AnalyticSource final : public DistributionSource {
 public:
  AnalyticSource(GaussianPacket packet, BarrierSpec barrier, std::vector<double> p_grid)
      : packet_(packet), barrier_(barrier) {
    initial_.t = 0.0;
    initial_.p = std::move(p_grid);
    initial_.density.reserve(initial_.p.size());
    for (double p : initial_.p) initial_.density.push_back(gaussian_density(packet_, p));
  }

  MomentumDistribution at(double t) override {
    if (t == 0.0) return initial_;
    return analytic_distribution(packet_, barrier_, t, initial_.p);
  }

  const MomentumDistribution& initial() const override { return initial_; }
  std::string name() const override { return "analytic"; }

 private:
  GaussianPacket packet_;
  BarrierSpec barrier_;
  MomentumDistribution initial_;
};

/// Split-operator oracle. Every state it visits is cached, and a request for
/// time t resumes from the latest cached state at or before t.
class OracleSource final : public DistributionSource {
 public:
  OracleSource(std::shared_ptr<const SplitOperator> propagator, GridState start)
      : prop_(std::move(propagator)) {
    initial_ = prop_->momentum_distribution(start);
    cache_.emplace(start.t, std::move(start));
  }

  MomentumDistribution at(double t) override { return prop_->momentum_distribution(state_at(t)); }

  const GridState& state_at(double t) {
    auto it = cache_.upper_bound(t);
    if (it == cache_.begin()) throw InputError("oracle: requested time precedes the initial state");
    --it;
    if (it->first == t) return it->second;
    GridState st = it->second;
    prop_->propagate_to(st, t);
    return cache_.insert_or_assign(t, std::move(st)).first->second;
  }

  const MomentumDistribution& initial() const override { return initial_; }
  std::string name() const override { return "oracle"; }
  const SplitOperator& propagator() const { return *prop_; }

 private:
  std::shared_ptr<const SplitOperator> prop_;
  std::map<double, GridState> cache_;
  MomentumDistribution initial_;
};

// ---------------------------------------------------------------------------
// Maximum search

struct GqMaxRecord {
  double gq_max = 0.0;
  double p_star = 0.0;
  double t_star = 0.0;
  bool boundary_warning = false;
};

struct GqSearch {
  double p_lo = 0.0, p_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  int t_count = 25;          // coarse time samples
  double t_tol = 1e-3;       // golden-section bracket width
  double gq_tol = 1e-3;      // stop once successive maxima agree this well
};

/// Maximum over p of G^q at a fixed time.
inline GqMaxRecord gq_max_at(DistributionSource& src, double t, double p_lo, double p_hi) {
  const GqProfile prof(src.at(t), src.initial());
  const auto [value, p] = prof.max_in(p_lo, p_hi);
  const double tol = 1e-12 * std::max(1.0, std::abs(p_hi));
  return {value, p, t, std::abs(p - p_lo) <= tol || std::abs(p - p_hi) <= tol};
}

/// Coarse scan in t followed by golden-section refinement around the best
/// coarse sample. Deterministic for a given search specification.
inline GqMaxRecord gq_max(DistributionSource& src, const GqSearch& s) {
  if (!(s.t_hi > s.t_lo) || !(s.p_hi > s.p_lo) || s.t_count < 3) {
    throw InputError("gq_max: empty search ranges or fewer than 3 time samples");
  }
  std::map<double, GqMaxRecord> seen;
  auto eval = [&](double t) {
    if (auto it = seen.find(t); it != seen.end()) return it->second;
    const auto r = gq_max_at(src, t, s.p_lo, s.p_hi);
    seen.emplace(t, r);
    return r;
  };
  const double h = (s.t_hi - s.t_lo) / (s.t_count - 1);
  int best_k = 0;
  GqMaxRecord best = eval(s.t_lo);
  for (int k = 1; k < s.t_count; ++k) {
    const auto r = eval(s.t_lo + k * h);
    if (r.gq_max > best.gq_max) {
      best = r;
      best_k = k;
    }
  }
  double a = s.t_lo + std::max(best_k - 1, 0) * h;
  double b = s.t_lo + std::min(best_k + 1, s.t_count - 1) * h;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  auto fc = eval(c);
  auto fd = eval(d);
  double previous = best.gq_max;
  for (int iter = 0; iter < 200; ++iter) {
    if (fc.gq_max >= fd.gq_max) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
    const GqMaxRecord& lead = fc.gq_max >= fd.gq_max ? fc : fd;
    if (lead.gq_max > best.gq_max) best = lead;
    const bool settled = std::abs(best.gq_max - previous) < s.gq_tol;
    previous = best.gq_max;
    if (b - a < s.t_tol && settled) break;
  }
  const double t_edge = 1e-9 * std::max(1.0, std::abs(s.t_hi));
  best.boundary_warning =
      best.boundary_warning || best.t_star - s.t_lo <= t_edge || s.t_hi - best.t_star <= t_edge;
  return best;
}

struct GqSurface {
  std::vector<double> t_samples;
  std::vector<double> p_samples;
  std::vector<std::vector<double>> gq_values;  // [t][p]
  GqMaxRecord max_record;
};

inline GqSurface gq_surface(DistributionSource& src, std::span<const double> t_samples,
                            std::span<const double> p_samples) {
  GqSurface out;
  out.t_samples.assign(t_samples.begin(), t_samples.end());
  out.p_samples.assign(p_samples.begin(), p_samples.end());
  out.max_record.gq_max = -std::numeric_limits<double>::infinity();
  for (double t : t_samples) {
    const GqProfile prof(src.at(t), src.initial());
    auto& row = out.gq_values.emplace_back();
    row.reserve(p_samples.size());
    for (double p : p_samples) {
      const double v = prof(p);
      row.push_back(v);
      if (v > out.max_record.gq_max) out.max_record = {v, p, t, false};
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Classical ensemble

/// Counter-based stream: every draw is a pure function of (seed, index, lane),
/// so results do not depend on evaluation order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t index, std::uint64_t lane) const {
    return mix(mix(seed_ ^ (lane * 0xD1B54A32D192ED03ull)) + index * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index, std::uint64_t lane) const {
    return (static_cast<double>(bits(index, lane) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal pair from lanes (2*pair, 2*pair+1) by Box-Muller.
  std::pair<double, double> normal_pair(std::uint64_t index, std::uint64_t pair) const {
    const double r = std::sqrt(-2.0 * std::log(uniform(index, 2 * pair)));
    const double a = 2.0 * std::numbers::pi * uniform(index, 2 * pair + 1);
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
  bool stuck = false;  // arrived at an edge with exactly zero interior momentum
};

/// Exact classical motion through the square barrier for a time t >= 0.
/// Momentum is p outside and sign(p) sqrt(p^2 - 2 m V0) inside; a particle
/// without enough energy reflects elastically at the edge.
inline PhasePoint classical_evolve(const BarrierSpec& b, PhasePoint s, double t) {
  const double e = 0.5 * b.d;
  const double two_m_v0 = 2.0 * b.m * b.V0;
  double left = t;
  auto drift = [&](double dt) { s.x += s.p / b.m * dt; };

  // A particle exactly on an edge counts as outside.
  if (std::abs(s.x) < e) {
    if (s.p == 0.0) {
      s.stuck = true;
      return s;
    }
    const double edge = std::copysign(e, s.p);
    const double tau = (edge - s.x) / (s.p / b.m);
    if (tau >= left) {
      drift(left);
      return s;
    }
    left -= tau;
    s.x = edge;
    s.p = std::copysign(std::sqrt(s.p * s.p + two_m_v0), s.p);
  }

  const bool heading_in = (s.x <= -e && s.p > 0.0) || (s.x >= e && s.p < 0.0);
  if (!heading_in || b.V0 == 0.0) {
    drift(left);
    return s;
  }
  const double edge = s.x <= -e ? -e : e;
  const double tau = (edge - s.x) / (s.p / b.m);
  if (tau >= left) {
    drift(left);
    return s;
  }
  left -= tau;
  s.x = edge;
  const double p2 = s.p * s.p;
  if (p2 < two_m_v0) {
    s.p = -s.p;
    drift(left);
    return s;
  }
  if (p2 == two_m_v0) {
    s.p = 0.0;
    s.stuck = true;
    return s;
  }
  const double p_out = s.p;
  s.p = std::copysign(std::sqrt(p2 - two_m_v0), p_out);
  const double dwell = b.d / (std::abs(s.p) / b.m);
  if (dwell >= left) {
    drift(left);
    return s;
  }
  left -= dwell;
  s.x = -edge;
  s.p = p_out;
  drift(left);
  return s;
}

struct ClassicalEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 95% confidence
};

/// Draws the Wigner ensemble of the Gaussian packet: x ~ N(x0, delta_x),
/// p ~ N(p_c, hbar^2/(4 delta_x)), uncorrelated.
inline std::vector<PhasePoint> classical_ensemble(const GaussianPacket& g, std::size_t n,
                                                  std::uint64_t seed) {
  const CounterRng rng(seed);
  std::vector<PhasePoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [zx, zp] = rng.normal_pair(i, 0);
    pts[i] = {g.x0() + g.sigma_x() * zx, g.p_c + g.sigma_p() * zp, false};
  }
  return pts;
}

/// Classical G(p,t) on a (t, p) grid from one shared ensemble; result[t][p].
inline std::vector<std::vector<ClassicalEstimate>> classical_gq_grid(
    const GaussianPacket& g, const BarrierSpec& b, std::span<const double> ps,
    std::span<const double> ts, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 10000) throw InputError("classical_gq: need at least 1e4 samples");
  const auto start = classical_ensemble(g, n_samples, seed);
  std::vector<std::vector<ClassicalEstimate>> out;
  out.reserve(ts.size());
  std::vector<double> p_now(n_samples);
  for (double t : ts) {
    for (std::size_t i = 0; i < n_samples; ++i) p_now[i] = classical_evolve(b, start[i], t).p;
    auto& row = out.emplace_back();
    for (double p : ps) {
      // Per-sample difference of indicators, in {-1, 0, 1}.
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t i = 0; i < n_samples; ++i) {
        const double diff = (p_now[i] > p ? 1.0 : 0.0) - (start[i].p > p ? 1.0 : 0.0);
        sum += diff;
        sum2 += diff * diff;
      }
      const double n = static_cast<double>(n_samples);
      const double mean = sum / n;
      const double var = std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0);
      row.push_back({mean, 1.96 * std::sqrt(var / n)});
    }
  }
  return out;
}

inline ClassicalEstimate classical_gq(const GaussianPacket& g, const BarrierSpec& b, double p,
                                      double t, std::size_t n_samples, std::uint64_t seed) {
  const double ps[] = {p};
  const double ts[] = {t};
  return classical_gq_grid(g, b, ps, ts, n_samples, seed)[0][0];
}

}  // namespace transient
