#pragma once

// Subcommands of the transient-scatter front end. Each returns a process exit
// code: 0 success, 2 configuration error, 3 numerical failure, 4 failed
// acceptance threshold (compare).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transient/analytic.hpp"
#include "transient/barrier.hpp"
#include "transient/config.hpp"
#include "transient/faddeeva.hpp"
#include "transient/io.hpp"
#include "transient/observables.hpp"
#include "transient/split_operator.hpp"

namespace transient::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kThresholdFailure = 4 };

struct Context {
  RunConfig config;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0x5eed;
  std::ostream* out = &std::cout;
};

namespace detail {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

inline std::pair<double, double> window(const nlohmann::json& block, const char* key,
                                        std::pair<double, double> fallback) {
  if (!block.contains(key)) return fallback;
  const auto& w = block.at(key);
  if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
    throw InputError(std::string(key) + ": expected [lo, hi]");
  }
  const double lo = w[0].get<double>(), hi = w[1].get<double>();
  if (!(hi > lo)) throw InputError(std::string(key) + ": hi must exceed lo");
  return {lo, hi};
}

inline std::pair<double, double> default_p_window(const RunConfig& c) {
  return {c.packet.p_c - 3.5, c.packet.p_c + 3.5};
}

/// Collision window: arrival of the packet centre at the barrier +- 4 widths.
inline std::pair<double, double> default_t_window(const RunConfig& c) {
  const double v = c.packet.p_c / c.barrier.m;
  const double arrival = (-c.packet.x0() - 0.5 * c.barrier.d) / v;
  const double spread = 4.0 * c.packet.sigma_x() / v;
  return {std::max(arrival - spread, 0.0), arrival + spread};
}

inline std::shared_ptr<const SplitOperator> make_oracle(const RunConfig& c, double t_final) {
  c.grid.grid.validate(c.packet, c.barrier, t_final);
  return std::make_shared<const SplitOperator>(c.grid.grid, c.barrier, c.hbar, c.grid.dt);
}

/// Analytic integration grid for G^q: wide enough for the slowly decaying
/// pole tails of psi_IT0.
inline std::vector<double> analytic_gq_grid(const RunConfig& c) {
  const double half = 15.0;
  const double lo = std::max(c.packet.p_c - half, 1e-3);
  return linspace(lo, c.packet.p_c + half, static_cast<std::size_t>((c.packet.p_c + half - lo) / 2e-3) + 1);
}

inline void stamp(io::CsvWriter& w, const Context& ctx) {
  w.comment(io::kVersion);
  w.comment("config: " + ctx.config.resolved().dump());
  w.comment("seed: " + std::to_string(ctx.seed));
}

/// JSON has no comments, so the provenance header travels as two keys.
inline void emit_json(const Context& ctx, nlohmann::json j, const std::string& file) {
  j["version"] = io::kVersion;
  j["config"] = ctx.config.resolved();
  j["seed"] = ctx.seed;
  const std::string text = j.dump(2) + "\n";
  *ctx.out << text;
  io::write_atomic(ctx.out_dir / file, text);
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// One CSV per (engine, time): p, density, re_psi, im_psi.
inline int cmd_evolve(const Context& ctx, std::vector<double> times) {
  const RunConfig& c = ctx.config;
  const auto& blk = c.task("evolve");
  if (times.empty() && blk.contains("times")) times = blk.at("times").get<std::vector<double>>();
  if (times.empty()) throw InputError("evolve.times: empty");
  for (double t : times) {
    if (!(t >= 0.0)) throw InputError("evolve.times: must be non-negative");
  }
  const auto [p_lo, p_hi] = detail::window(blk, "p_window", detail::default_p_window(c));
  const std::size_t count = blk.value("p_count", std::size_t{1401});

  std::vector<double> sorted = times;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<double> p_grid = detail::linspace(p_lo, p_hi, count);
  std::map<double, std::pair<std::vector<double>, std::vector<cplx>>> oracle_rows;
  if (c.uses_oracle()) {
    const auto prop = detail::make_oracle(c, sorted.back());
    GridState st = init_packet(c.grid.grid, c.packet, c.barrier);
    for (double t : sorted) {
      prop->propagate_to(st, t);
      std::vector<double> p;
      const auto amp = prop->momentum_amplitudes(st, &p);
      std::vector<double> pw;
      std::vector<cplx> aw;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] >= p_lo && p[k] <= p_hi) {
          pw.push_back(p[k]);
          aw.push_back(amp[k]);
        }
      }
      oracle_rows[t] = {std::move(pw), std::move(aw)};
    }
    // Shared momenta make the two engines' files directly comparable.
    p_grid = oracle_rows.begin()->second.first;
  }

  nlohmann::json written = nlohmann::json::array();
  for (double t : sorted) {
    if (c.uses_oracle()) {
      io::CsvWriter w({"p", "density", "re_psi", "im_psi"});
      detail::stamp(w, ctx);
      w.comment("engine: oracle, t = " + io::format_double(t));
      const auto& [p, a] = oracle_rows.at(t);
      for (std::size_t k = 0; k < p.size(); ++k) w.row({p[k], std::norm(a[k]), a[k].real(), a[k].imag()});
      const auto name = "evolve_oracle_t" + io::format_label(t) + ".csv";
      w.save(ctx.out_dir / name);
      written.push_back(name);
    }
    if (c.uses_analytic()) {
      io::CsvWriter w({"p", "density", "re_psi", "im_psi"});
      detail::stamp(w, ctx);
      w.comment("engine: analytic, t = " + io::format_double(t));
      const SaddleData sd = saddle_data(c.packet, c.barrier, t);
      for (double p : p_grid) {
        const cplx a = psi_it0(c.packet, c.barrier, sd, p).psi;
        w.row({p, std::norm(a), a.real(), a.imag()});
      }
      const auto name = "evolve_analytic_t" + io::format_label(t) + ".csv";
      w.save(ctx.out_dir / name);
      written.push_back(name);
    }
  }
  *ctx.out << nlohmann::json{{"files", written}}.dump() << "\n";
  return kOk;
}

inline nlohmann::json gq_record_json(const GqMaxRecord& r, const std::string& engine,
                                     const nlohmann::json& resolution) {
  return {{"gq_max", r.gq_max}, {"p_star", r.p_star}, {"t_star", r.t_star},
          {"engine", engine},   {"resolution", resolution}, {"boundary_warning", r.boundary_warning}};
}

/// G^q maximum over (p, t), or over p at a pinned time ("t_fixed").
inline int cmd_gqmax(const Context& ctx, std::optional<double> t_fixed, bool with_classical) {
  const RunConfig& c = ctx.config;
  const auto& blk = c.task("gqmax");
  if (!t_fixed && blk.contains("t_fixed")) t_fixed = blk.at("t_fixed").get<double>();
  GqSearch search;
  std::tie(search.p_lo, search.p_hi) = detail::window(blk, "p_range", detail::default_p_window(c));
  std::tie(search.t_lo, search.t_hi) = detail::window(blk, "t_range", detail::default_t_window(c));
  search.t_count = blk.value("t_count", 25);
  search.t_tol = blk.value("t_tol", 1e-3);
  if (t_fixed && !(*t_fixed >= 0.0)) throw InputError("gqmax.t_fixed: must be non-negative");

  nlohmann::json records = nlohmann::json::array();
  auto run = [&](DistributionSource& src, nlohmann::json resolution) {
    resolution["t_count"] = search.t_count;
    resolution["t_tol"] = search.t_tol;
    GqMaxRecord r = t_fixed ? gq_max_at(src, *t_fixed, search.p_lo, search.p_hi) : gq_max(src, search);
    auto rec = gq_record_json(r, src.name(), resolution);
    if (t_fixed) rec["t_fixed"] = *t_fixed;
    if (with_classical) {
      const std::size_t n = blk.value("classical_samples", std::size_t{100000});
      const auto est = classical_gq(c.packet, c.barrier, r.p_star, r.t_star, n, ctx.seed);
      rec["classical_gq"] = est.value;
      rec["classical_half_width"] = est.half_width;
    }
    records.push_back(rec);
  };
  if (c.uses_oracle()) {
    const double t_end = t_fixed ? *t_fixed : search.t_hi;
    OracleSource src(detail::make_oracle(c, t_end), init_packet(c.grid.grid, c.packet, c.barrier));
    run(src, {{"n", c.grid.grid.n}, {"x_min", c.grid.grid.x_min}, {"x_max", c.grid.grid.x_max},
              {"dt", c.grid.dt}});
  }
  if (c.uses_analytic()) {
    auto grid = detail::analytic_gq_grid(c);
    const nlohmann::json res{{"p_min", grid.front()}, {"p_max", grid.back()}, {"p_samples", grid.size()}};
    AnalyticSource src(c.packet, c.barrier, std::move(grid));
    run(src, res);
  }
  detail::emit_json(ctx, records.size() == 1 ? records[0] : nlohmann::json{{"records", records}}, "gqmax.json");
  return kOk;
}

/// Argand anatomy of psi_IT0 at `count` equally spaced momenta.
inline int cmd_argand(const Context& ctx, std::optional<double> t, std::optional<double> p_lo,
                      std::optional<double> p_hi, std::optional<int> count) {
  const RunConfig& c = ctx.config;
  if (c.engine == Engine::Oracle) throw InputError("engine: argand requires the analytic engine");
  const auto& blk = c.task("argand");
  const auto win = detail::window(blk, "p_window", {28.0, 29.0});
  const double tt = t ? *t : blk.value("t", 0.0);
  const double lo = p_lo ? *p_lo : win.first;
  const double hi = p_hi ? *p_hi : win.second;
  const int n = count ? *count : blk.value("count", 41);
  if (!(tt >= 0.0)) throw InputError("argand.t: must be non-negative");
  if (n < 2) throw InputError("argand.count: must be >= 2");
  if (!(lo > 0.0) || !(hi > lo)) throw InputError("argand.p_window: must be positive and increasing");

  const auto grid = detail::linspace(lo, hi, static_cast<std::size_t>(n));
  const auto scan = argand_scan(c.packet, c.barrier, tt, grid);
  io::CsvWriter w({"p", "re_inc", "im_inc", "re_trans", "im_trans", "re_w_uI", "im_w_uI", "re_mw_muT",
                   "im_mw_muT", "re_prefI", "im_prefI", "re_prefT", "im_prefT"});
  detail::stamp(w, ctx);
  w.comment("t = " + io::format_double(tt));
  for (const auto& a : scan) {
    w.row({a.p, a.incident.real(), a.incident.imag(), a.transmitted.real(), a.transmitted.imag(),
           a.w_uI.real(), a.w_uI.imag(), a.mw_muT.real(), a.mw_muT.imag(), a.pref_I.real(),
           a.pref_I.imag(), a.pref_T.real(), a.pref_T.imag()});
  }
  const auto name = "argand_t" + io::format_label(tt) + ".csv";
  w.save(ctx.out_dir / name);
  *ctx.out << nlohmann::json{{"file", name}, {"rows", w.rows()}}.dump() << "\n";
  return kOk;
}

/// Resonance zeros of Omega, the structural poles at momentum p and the
/// saddle / steepest-descent line at time t.
inline int cmd_poles(const Context& ctx, std::optional<ComplexRect> region_arg, std::optional<double> t_arg) {
  const RunConfig& c = ctx.config;
  const auto& blk = c.task("poles");
  ComplexRect region{5.0, 60.0, -30.0, -0.01};
  if (region_arg) {
    region = *region_arg;
  } else if (blk.contains("region")) {
    const auto& r = blk.at("region");
    if (!r.is_array() || r.size() != 4) throw InputError("poles.region: expected [re_min, re_max, im_min, im_max]");
    region = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
  }
  if (!(region.re_max > region.re_min) || !(region.im_max > region.im_min) || region.im_max >= 0.0) {
    throw InputError("poles.region: must be a non-empty rectangle with Im < 0");
  }
  const double t = t_arg ? *t_arg : blk.value("t", 0.0);
  const double p = blk.value("p", c.packet.p_c);
  const std::size_t max_count = blk.value("max_count", std::size_t{1000});
  if (!(t >= 0.0)) throw InputError("poles.t: must be non-negative");

  const auto poles = find_resonance_poles(c.barrier, c.hbar, region, max_count);
  const SaddleData sd = saddle_data(c.packet, c.barrier, t);

  io::CsvWriter w({"re_p", "im_p", "abs_omega", "kind"});
  detail::stamp(w, ctx);
  w.comment("kind: 0 resonance, 1 structural I (above contour), 2 structural R (below), "
            "3 structural T (below), 4 saddle");
  w.comment("t = " + io::format_double(t) + ", sdp_slope = " + io::format_double(sd.slope) +
            ", sdp_direction = (" + io::format_double(sd.direction.real()) + ", " +
            io::format_double(sd.direction.imag()) + ")");
  for (const auto& r : poles) w.row({r.p.real(), r.p.imag(), r.abs_omega, 0.0});
  for (const auto& s : structural_poles(p)) {
    const double kind = s.label == 'I' ? 1.0 : (s.label == 'R' ? 2.0 : 3.0);
    w.row({s.value.real(), s.value.imag(), std::abs(omega(c.barrier, s.value, c.hbar)), kind});
  }
  w.row({sd.s.real(), sd.s.imag(), std::abs(omega(c.barrier, sd.s, c.hbar)), 4.0});
  w.save(ctx.out_dir / "poles.csv");

  const auto near = poles_near_sdp(sd, poles);
  nlohmann::json summary{{"file", "poles.csv"},
                         {"resonances", poles.size()},
                         {"saddle", {sd.s.real(), sd.s.imag()}},
                         {"sdp_slope", sd.slope},
                         {"sdp_direction", {sd.direction.real(), sd.direction.imag()}},
                         {"poles_near_sdp", near.size()}};
  if (!near.empty()) std::cerr << "warning: " << near.size() << " resonance pole(s) within 3 of the SDP\n";
  *ctx.out << summary.dump() << "\n";
  return kOk;
}

struct Comparison {
  double t = 0.0;
  double max_rel_error = 0.0;  // max |a - o| / max o over the window
  double l2_distance = 0.0;    // ||a - o||_2 / ||o||_2 over the window
  std::size_t samples = 0;
};

/// Analytic vs oracle density on the oracle's momentum samples inside [p_lo, p_hi].
inline Comparison compare_engines(const GaussianPacket& g, const BarrierSpec& b,
                                  const SplitOperator& prop, const GridState& st, double p_lo,
                                  double p_hi) {
  const auto od = prop.momentum_distribution(st);
  const SaddleData sd = saddle_data(g, b, st.t);
  double num = 0.0, den = 0.0, max_abs = 0.0, max_o = 0.0;
  Comparison cmp;
  cmp.t = st.t;
  for (std::size_t k = 0; k < od.p.size(); ++k) {
    if (od.p[k] < p_lo || od.p[k] > p_hi) continue;
    const double a = std::norm(psi_it0(g, b, sd, od.p[k]).psi);
    const double o = od.density[k];
    num += (a - o) * (a - o);
    den += o * o;
    max_abs = std::max(max_abs, std::abs(a - o));
    max_o = std::max(max_o, o);
    ++cmp.samples;
  }
  if (cmp.samples == 0 || den == 0.0) throw InputError("compare: no oracle momenta in the window");
  cmp.l2_distance = std::sqrt(num / den);
  cmp.max_rel_error = max_abs / max_o;
  return cmp;
}

inline int cmd_compare(const Context& ctx, std::optional<double> t_arg) {
  const RunConfig& c = ctx.config;
  if (c.engine != Engine::Both) throw InputError("engine: compare requires \"both\"");
  const auto& blk = c.task("compare");
  const double t = t_arg ? *t_arg : blk.value("t", 0.0);
  if (!(t >= 0.0)) throw InputError("compare.t: must be non-negative");
  const auto [lo, hi] = detail::window(blk, "p_window", {25.0, 32.0});
  const double threshold = blk.value("threshold", 0.1);

  const auto prop = detail::make_oracle(c, t);
  GridState st = init_packet(c.grid.grid, c.packet, c.barrier);
  prop->propagate_to(st, t);
  const auto cmp = compare_engines(c.packet, c.barrier, *prop, st, lo, hi);
  const bool pass = cmp.l2_distance <= threshold;
  nlohmann::json j{{"t", t},
                   {"p_window", {lo, hi}},
                   {"samples", cmp.samples},
                   {"max_rel_error", cmp.max_rel_error},
                   {"l2_distance", cmp.l2_distance},
                   {"threshold", threshold},
                   {"pass", pass}};
  detail::emit_json(ctx, j, "compare_t" + io::format_label(t) + ".json");
  return pass ? kOk : kThresholdFailure;
}

inline int cmd_w_eval(std::ostream& out, double re, double im) {
  const auto e = faddeeva::evaluate({re, im});
  out << nlohmann::json{{"re", re}, {"im", im}, {"w_re", e.w.real()}, {"w_im", e.w.imag()},
                        {"est_error", e.est_error}}
             .dump()
      << "\n";
  return kOk;
}

}  // namespace transient::cli
