#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "transient/cli.hpp"

namespace {

template <class T>
std::optional<T> opt(const CLI::Option* o, const T& v) {
  return o->count() ? std::optional<T>(v) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace transient;
  CLI::App app{"Transient momentum interference of a Gaussian packet on a square barrier"};
  app.set_version_flag("--version", std::string(io::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0x5eed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
  };

  auto* evolve = app.add_subcommand("evolve", "momentum densities at selected times");
  add_common(evolve);
  std::vector<double> times;
  evolve->add_option("--times", times, "override evolve.times")->delimiter(',');

  auto* gqmax = app.add_subcommand("gqmax", "maximum of the quantum G^q over (p, t)");
  add_common(gqmax);
  double t_fixed = 0.0;
  auto* t_fixed_opt = gqmax->add_option("--t-fixed", t_fixed, "maximise over p only, at this time");
  bool classical = false;
  gqmax->add_flag("--classical", classical, "add a Monte Carlo classical G at the maximiser");

  auto* argand = app.add_subcommand("argand", "Argand decomposition of the analytic amplitude");
  add_common(argand);
  double a_t = 0.0, a_lo = 0.0, a_hi = 0.0;
  int a_count = 0;
  auto* a_t_opt = argand->add_option("--t", a_t);
  auto* a_lo_opt = argand->add_option("--p-lo", a_lo);
  auto* a_hi_opt = argand->add_option("--p-hi", a_hi);
  auto* a_count_opt = argand->add_option("--count", a_count);

  auto* poles = app.add_subcommand("poles", "resonance, structural and saddle poles");
  add_common(poles);
  std::vector<double> region;
  auto* region_opt = poles->add_option("--region", region, "re_min,re_max,im_min,im_max")->delimiter(',');
  double p_t = 0.0;
  auto* p_t_opt = poles->add_option("--t", p_t);

  auto* compare = app.add_subcommand("compare", "analytic vs oracle densities");
  add_common(compare);
  double c_t = 0.0;
  auto* c_t_opt = compare->add_option("--t", c_t);

  auto* weval = app.add_subcommand("w-eval", "evaluate the Faddeeva function");
  weval->group("");  // hidden
  double re = 0.0, im = 0.0;
  weval->add_option("--re", re)->required();
  weval->add_option("--im", im)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kConfigError;
  }

  try {
    if (weval->parsed()) return cli::cmd_w_eval(std::cout, re, im);

    cli::Context ctx;
    ctx.config = load_config(config_path);
    ctx.out_dir = out_dir;
    ctx.seed = seed;
    std::filesystem::create_directories(ctx.out_dir);

    if (evolve->parsed()) return cli::cmd_evolve(ctx, times);
    if (gqmax->parsed()) return cli::cmd_gqmax(ctx, opt(t_fixed_opt, t_fixed), classical);
    if (argand->parsed()) {
      return cli::cmd_argand(ctx, opt(a_t_opt, a_t), opt(a_lo_opt, a_lo), opt(a_hi_opt, a_hi),
                             opt(a_count_opt, a_count));
    }
    if (poles->parsed()) {
      std::optional<ComplexRect> r;
      if (region_opt->count()) {
        if (region.size() != 4) throw InputError("--region: expected four numbers");
        r = ComplexRect{region[0], region[1], region[2], region[3]};
      }
      return cli::cmd_poles(ctx, r, opt(p_t_opt, p_t));
    }
    if (compare->parsed()) return cli::cmd_compare(ctx, opt(c_t_opt, c_t));
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return cli::kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kNumericalError;
  }
  return cli::kConfigError;
}
