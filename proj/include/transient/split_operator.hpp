#pragma once

// Split-operator reference propagation of the 1D Schroedinger equation on a
// periodic grid. One Strang step:
//   exp(-i V dt/2hbar) IFFT exp(-i p^2 dt/(2 m hbar)) FFT exp(-i V dt/2hbar)

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstring>
#include <memory>
#include <limits>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "transient/analytic.hpp"
#include "transient/barrier.hpp"
#include "transient/distribution.hpp"
#include "transient/errors.hpp"

namespace transient {

struct SpatialGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 2;

  double dx() const { return (x_max - x_min) / static_cast<double>(n); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  double dp(double hbar) const { return 2.0 * std::numbers::pi * hbar / (static_cast<double>(n) * dx()); }
  /// Largest representable momentum (Nyquist).
  double p_max(double hbar) const { return std::numbers::pi * hbar / dx(); }

  /// Momentum of FFT bin j (standard frequency ordering).
  double momentum(std::size_t j, double hbar) const {
    const auto nn = static_cast<std::ptrdiff_t>(n);
    auto jj = static_cast<std::ptrdiff_t>(j);
    if (jj >= nn / 2) jj -= nn;
    return static_cast<double>(jj) * dp(hbar);
  }

  void validate() const {
    if (n < 2 || (n & (n - 1)) != 0) throw InputError("grid.n: must be a power of two");
    if (!(x_max > x_min)) throw InputError("grid: x_max must exceed x_min");
  }

  /// Checks momentum coverage of the packet and that the transmitted packet
  /// stays at least four widths inside the box up to t_final.
  void validate(const GaussianPacket& g, const BarrierSpec& b, double t_final) const {
    validate();
    if (p_max(g.hbar) <= g.p_c + 8.0 * g.hbar / (2.0 * std::sqrt(g.delta_x))) {
      throw InputError("grid: momentum span does not cover the packet (refine dx)");
    }
    const double width_t =
        std::sqrt(g.delta_x + std::pow(g.hbar * t_final / (2.0 * b.m * std::sqrt(g.delta_x)), 2));
    const double front = std::max(g.x0() + g.p_c * t_final / b.m, 0.5 * b.d);
    if (front + 4.0 * width_t > x_max) throw InputError("grid.x_max: packet reaches the box edge");
    if (g.x0() - 4.0 * width_t < x_min) throw InputError("grid.x_min: packet reaches the box edge");
  }
};

struct GridState {
  double t = 0.0;
  SpatialGrid grid;
  std::vector<cplx> samples;

  double norm() const {
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    return acc * grid.dx();
  }
};

/// <x|psi0> = (2 pi delta_x)^{-1/4} exp(-(x-x0)^2/(4 delta_x)) exp(i p_c (x-x0)/hbar),
/// the phase convention of gaussian_amp.
inline GridState init_packet(const SpatialGrid& grid, const GaussianPacket& g,
                             const BarrierSpec& b) {
  grid.validate();
  g.validate(b);
  GridState st{0.0, grid, std::vector<cplx>(grid.n)};
  const double norm = std::pow(2.0 * std::numbers::pi * g.delta_x, -0.25);
  const double x0 = g.x0();
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    st.samples[i] = norm * std::exp(cplx{-(x - x0) * (x - x0) / (4.0 * g.delta_x), g.p_c * (x - x0) / g.hbar});
  }
  return st;
}

namespace detail {

// FFTW planning is not thread-safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace detail

/// Complex FFT of fixed length over an owned SIMD-aligned buffer. Calls on
/// one instance must not overlap.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), buf_(fftw_alloc_complex(n)) {
    if (!buf_) throw NumericalError("fftw: allocation failed");
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_.reset(fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    backward_.reset(fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
    if (!forward_ || !backward_) throw NumericalError("fftw: plan creation failed");
  }

  void forward(std::vector<cplx>& v) const { run(forward_.get(), v); }

  /// Unnormalised: backward(forward(v)) == n * v.
  void backward(std::vector<cplx>& v) const { run(backward_.get(), v); }

  std::size_t size() const { return n_; }

 private:
  struct BufferDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };

  void run(fftw_plan p, std::vector<cplx>& v) const {
    if (v.size() != n_) throw InputError("fft: length mismatch");
    std::memcpy(buf_.get(), v.data(), n_ * sizeof(cplx));
    fftw_execute(p);
    std::memcpy(v.data(), buf_.get(), n_ * sizeof(cplx));
  }

  std::size_t n_;
  std::unique_ptr<fftw_complex[], BufferDeleter> buf_;
  detail::PlanHandle forward_;
  detail::PlanHandle backward_;
};

struct NormRecord {
  double t;
  double norm;
};

/// Propagator bound to one grid, barrier and time step. Shares one FFT
/// buffer, so calls on one instance must not overlap.
class SplitOperator {
 public:
  SplitOperator(SpatialGrid grid, BarrierSpec barrier, double hbar, double dt)
      : grid_(grid), barrier_(barrier), hbar_(hbar), dt_(dt), fft_(grid.n) {
    grid_.validate();
    barrier_.validate();
    if (!(hbar > 0.0)) throw InputError("split operator: hbar must be positive");
    if (!(dt > 0.0)) throw InputError("split operator: dt must be positive");
    potential_.resize(grid_.n);
    for (std::size_t i = 0; i < grid_.n; ++i) {
      potential_[i] = sampled_potential(i);
      if (potential_[i] != 0.0) {
        v_begin_ = std::min(v_begin_, i);
        v_end_ = i + 1;
      }
    }
    if (v_end_ == 0) v_begin_ = 0;
    make_factors(dt_, half_potential_, kinetic_);
  }

  const SpatialGrid& grid() const { return grid_; }
  const BarrierSpec& barrier() const { return barrier_; }
  double hbar() const { return hbar_; }
  double dt() const { return dt_; }
  const std::vector<double>& potential() const { return potential_; }

  /// Cell average of the square barrier over [x_i - dx/2, x_i + dx/2], so the
  /// sampled barrier has area exactly V0 d.
  double sampled_potential(std::size_t i) const {
    const double x = grid_.x(i);
    const double h = 0.5 * grid_.dx();
    const double e = 0.5 * barrier_.d;
    const double overlap = std::min(x + h, e) - std::max(x - h, -e);
    return overlap > 0.0 ? barrier_.V0 * std::min(overlap / grid_.dx(), 1.0) : 0.0;
  }

  void step(GridState& st) const { apply(st, half_potential_, kinetic_, dt_); }

  /// Steps to t_final (whole steps of dt, then one fractional step) and
  /// returns the norm every `record_every` steps plus at the end.
  std::vector<NormRecord> propagate_to(GridState& st, double t_final,
                                       std::size_t record_every = 0) const {
    if (t_final < st.t) throw InputError("propagate_to: t_final precedes the state time");
    std::vector<NormRecord> log;
    const double span = t_final - st.t;
    double whole = std::floor(span / dt_);
    double frac = span - whole * dt_;
    if (dt_ - frac < 1e-9 * dt_) {  // span is a multiple of dt up to rounding
      whole += 1.0;
      frac = 0.0;
    }
    const double t_start = st.t;
    const auto steps = static_cast<std::size_t>(whole);
    for (std::size_t k = 0; k < steps; ++k) {
      apply(st, half_potential_, kinetic_, dt_);
      if (record_every != 0 && (k + 1) % record_every == 0) log.push_back({st.t, st.norm()});
    }
    if (frac > 1e-12 * dt_) {
      std::vector<cplx> hv, kin;
      make_factors(frac, hv, kin);
      apply(st, hv, kin, frac);
    }
    // Pin the clock to the requested time instead of the accumulated sum.
    st.t = (frac > 1e-12 * dt_ || steps > 0) ? t_final : t_start;
    log.push_back({st.t, st.norm()});
    return log;
  }

  /// <p|psi> ~ dx/sqrt(2 pi hbar) sum_x psi(x) exp(-ipx/hbar), ordered by increasing p.
  std::vector<cplx> momentum_amplitudes(const GridState& st, std::vector<double>* momenta) const {
    std::vector<cplx> a = st.samples;
    fft_.forward(a);
    const std::size_t n = grid_.n;
    const double scale = grid_.dx() / std::sqrt(2.0 * std::numbers::pi * hbar_);
    std::vector<cplx> out(n);
    if (momenta) momenta->resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = (k + n / 2) % n;  // fftshift
      const double p = grid_.momentum(j, hbar_);
      out[k] = a[j] * scale * std::exp(cplx{0.0, -p * grid_.x_min / hbar_});
      if (momenta) (*momenta)[k] = p;
    }
    return out;
  }

  MomentumDistribution momentum_distribution(const GridState& st) const {
    MomentumDistribution d;
    d.t = st.t;
    const auto amp = momentum_amplitudes(st, &d.p);
    d.density.resize(amp.size());
    std::transform(amp.begin(), amp.end(), d.density.begin(), [](cplx v) { return std::norm(v); });
    return d;
  }

  /// <H> = sum |psi(p)|^2 p^2/2m dp + sum V |psi(x)|^2 dx.
  double energy(const GridState& st) const {
    std::vector<double> p;
    const auto amp = momentum_amplitudes(st, &p);
    const double dp = grid_.dp(hbar_);
    double kin = 0.0;
    for (std::size_t k = 0; k < amp.size(); ++k) kin += std::norm(amp[k]) * p[k] * p[k];
    kin *= dp / (2.0 * barrier_.m);
    double pot = 0.0;
    for (std::size_t i = 0; i < grid_.n; ++i) pot += potential_[i] * std::norm(st.samples[i]);
    return kin + pot * grid_.dx();
  }

  /// Probability on x > d/2.
  double transmitted_probability(const GridState& st) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid_.n; ++i) {
      if (grid_.x(i) > 0.5 * barrier_.d) acc += std::norm(st.samples[i]);
    }
    return acc * grid_.dx();
  }

 private:
  void make_factors(double dt, std::vector<cplx>& half_potential, std::vector<cplx>& kinetic) const {
    const std::size_t n = grid_.n;
    half_potential.resize(n);
    kinetic.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      half_potential[i] = std::exp(cplx{0.0, -potential_[i] * dt / (2.0 * hbar_)});
      const double p = grid_.momentum(i, hbar_);
      // 1/n folds the inverse-FFT normalisation into the kinetic factor.
      kinetic[i] = std::exp(cplx{0.0, -p * p * dt / (2.0 * barrier_.m * hbar_)}) / static_cast<double>(n);
    }
  }

  void apply(GridState& st, const std::vector<cplx>& half_potential, const std::vector<cplx>& kinetic,
             double dt) const {
    if (st.samples.size() != grid_.n) throw InputError("split operator: state/grid size mismatch");
    cplx* v = st.samples.data();
    auto potential_kick = [&] {
      for (std::size_t i = v_begin_; i < v_end_; ++i) v[i] = mul(v[i], half_potential[i]);
    };
    potential_kick();
    fft_.forward(st.samples);
    for (std::size_t i = 0; i < grid_.n; ++i) v[i] = mul(v[i], kinetic[i]);
    fft_.backward(st.samples);
    potential_kick();
    st.t += dt;
  }

  // Plain product: skips the inf/nan recovery of operator* on the hot path.
  static cplx mul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
  }

  SpatialGrid grid_;
  BarrierSpec barrier_;
  double hbar_;
  double dt_;
  Fft fft_;
  std::vector<double> potential_;
  std::vector<cplx> half_potential_;
  std::vector<cplx> kinetic_;
  std::size_t v_begin_ = std::numeric_limits<std::size_t>::max();  // nonzero potential cells
  std::size_t v_end_ = 0;
};

}  // namespace transient
