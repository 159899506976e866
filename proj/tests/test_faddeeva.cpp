#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "transient/faddeeva.hpp"

using namespace transient;
using faddeeva::w;

TEST(Faddeeva, SpecialValues) {
  EXPECT_NEAR(std::abs(w({0.0, 0.0}) - 1.0), 0.0, 1e-15);
  const cplx wi = w({0.0, 1.0});
  EXPECT_NEAR(wi.real(), static_cast<double>(oracle::e_erfc1()), 1e-14);
  EXPECT_NEAR(wi.imag(), 0.0, 1e-15);
}

TEST(Faddeeva, ReflectionIdentity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.0, 5.0), a(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const cplx z = std::polar(r(rng), a(rng));
    const cplx lhs = w(z) + w(-z);
    const cplx rhs = 2.0 * std::exp(-z * z);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs))) << "z = " << z;
  }
}

TEST(Faddeeva, Conjugation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 1000; ++i) {
    const cplx z{u(rng), u(rng)};
    const cplx lhs = w(std::conj(z));
    const cplx rhs = std::conj(w(-z));
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs))) << "z = " << z;
  }
}

TEST(Faddeeva, RealAxis) {
  for (int i = 0; i <= 200; ++i) {
    const double x = -5.0 + 0.05 * i;
    const cplx v = w({x, 0.0});
    EXPECT_LT(std::abs(v.real() - std::exp(-x * x)), 1e-10) << "x = " << x;
    const double im = 2.0 / std::sqrt(std::numbers::pi) * (x >= 0 ? oracle::dawson(x) : -oracle::dawson(-x));
    EXPECT_LT(std::abs(v.imag() - im), 1e-10) << "x = " << x;
  }
}

TEST(Faddeeva, LargeArgumentAsymptotics) {
  for (int k = 0; k <= 10; ++k) {
    const double arg = std::numbers::pi * k / 10.0;
    const cplx z = std::polar(100.0, arg);
    const cplx v = z * w(z) * std::sqrt(std::numbers::pi);
    EXPECT_LT(std::abs(v - cplx{0.0, 1.0}), 1e-4) << "arg = " << arg;
  }
}

TEST(Faddeeva, QuadratureOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-7.0, 7.0), im(0.1, 7.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const cplx z{re(rng), im(rng)};
    const cplx ref = oracle::faddeeva_quadrature(z);
    const double err = std::abs(w(z) - ref);
    worst = std::max(worst, err);
    EXPECT_LT(err, 1e-8) << "z = " << z;
  }
  RecordProperty("worst_abs_error", std::to_string(worst));
}

// Points straddling every algorithm switch.
TEST(Faddeeva, RegionBoundaries) {
  for (double r : {faddeeva::kSeriesRadius, faddeeva::kFractionRadius, 8.0, 20.0}) {
    for (int k = 1; k < 8; ++k) {
      const double a = std::numbers::pi * k / 8.0;
      for (double eps : {-1e-9, 1e-9}) {
        const cplx z = std::polar(r + eps, a);
        EXPECT_LT(std::abs(w(z) - oracle::faddeeva_quadrature(z)), 1e-8) << "z = " << z;
      }
    }
  }
}

TEST(Faddeeva, ErrorEstimateBoundsActualError) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-30.0, 30.0), im(0.1, 30.0);
  for (int i = 0; i < 60; ++i) {
    const cplx z{re(rng), im(rng)};
    const auto e = faddeeva::evaluate(z);
    const double tol = std::max(1e-10, 1e-8 * std::abs(e.w));
    EXPECT_LE(e.est_error, tol) << "z = " << z;
    if (std::abs(z) < 12.0) {
      EXPECT_LE(std::abs(e.w - oracle::faddeeva_quadrature(z)), tol) << "z = " << z;
    }
  }
}

TEST(Faddeeva, Errors) {
  EXPECT_THROW(w({2e6, 0.0}), InputError);
  EXPECT_THROW(w({0.0, -40.0}), NumericalError);
  try {
    w({0.0, -40.0});
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("-40"), std::string::npos);
  }
}
