#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracspec/fracops.hpp"
#include "fracspec/spectral.hpp"

using namespace fracspec;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Coefficients decaying_coefficients(
    const std::shared_ptr<const SpectralSystem>& sys) {
  auto c = sys->zero_coefficients();
  for (std::size_t m = 0; m < c.values.size(); ++m)
    c.values[m] = std::cos(1.9 * static_cast<double>(m) + 0.3) /
                  (1.0 + static_cast<double>(m * m));
  return c;
}

// closed form of the oscillator heat kernel for H = -d^2/dx^2 + x^2
double mehler_kernel(double t, double x, double y) {
  const double sh = std::sinh(2.0 * t);
  const double ch = std::cosh(2.0 * t);
  const double expo = -((x * x + y * y) * ch - 2.0 * x * y) / (2.0 * sh);
  return std::exp(expo) / std::sqrt(2.0 * kPi * sh);
}

}  // namespace

TEST_CASE("balakrishnan_scalar reproduces lambda^sigma") {
  for (double lam : {1e-3, 0.1, 1.0, 10.0, 1e3, 2.5e4})
    for (double sigma : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CAPTURE(lam);
      CAPTURE(sigma);
      CHECK(rel_gap(balakrishnan_scalar(lam, sigma),
                    std::pow(lam, sigma)) < 1e-9);
    }
  // lambda = 0 is annihilated exactly
  CHECK(balakrishnan_scalar(0.0, 0.25) == 0.0);
  CHECK(balakrishnan_scalar(0.0, 0.75) == 0.0);
}

TEST_CASE("balakrishnan_scalar rejects out-of-range arguments") {
  // the left-tail series correction requires lambda * e^{s_lo} small
  CHECK_THROWS_AS(balakrishnan_scalar(2e10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(balakrishnan_scalar(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(balakrishnan_scalar(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(balakrishnan_scalar(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(balakrishnan_scalar(1.0, -0.2), std::invalid_argument);
  // widening the window restores large eigenvalues
  BalakrishnanOptions wide;
  wide.s_lo = -40.0;
  CHECK(rel_gap(balakrishnan_scalar(2e10, 0.5, wide), std::sqrt(2e10)) <
        1e-9);
}

TEST_CASE("frac_power_spectral multiplies by lambda^sigma mode-wise") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 24);
  const auto c = decaying_coefficients(sys);
  for (double sigma : {0.25, 0.5, 0.9}) {
    const auto out = frac_power_spectral(c, sigma);
    REQUIRE(out.values.size() == c.values.size());
    for (std::size_t m = 0; m < out.values.size(); ++m)
      CHECK(rel_gap(out.values[m],
                    c.values[m] * std::pow(sys->eigenvalue(m), sigma)) <
            1e-14);
  }
  CHECK_THROWS_AS(frac_power_spectral(c, 1.2), std::invalid_argument);
}

TEST_CASE("semigroup and spectral routes agree on generic coefficients") {
  const auto sys = make_harmonic_oscillator({1.3}, 32);
  const auto c = decaying_coefficients(sys);
  for (double sigma : {0.3, 0.75}) {
    const auto a = frac_power_balakrishnan(c, sigma);
    const auto b = frac_power_spectral(c, sigma);
    for (std::size_t m = 0; m < c.values.size(); ++m) {
      CAPTURE(m);
      CHECK(std::abs(a.values[m] - b.values[m]) <=
            1e-9 * std::max(std::abs(b.values[m]), 1e-30));
    }
  }
}

TEST_CASE("heat semigroup is the identity at t=0 and contracts afterwards") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 20);
  const auto c = decaying_coefficients(sys);

  const auto same = heat_semigroup(c, 0.0);
  for (std::size_t m = 0; m < c.values.size(); ++m)
    CHECK(same.values[m] == c.values[m]);

  double prev = c.norm2();
  for (double t : {0.01, 0.1, 0.5, 2.0}) {
    const double cur = heat_semigroup(c, t).norm2();
    CHECK(cur <= prev * (1.0 + 1e-15));
    prev = cur;
  }

  // semigroup law: e^{-sL} e^{-tL} = e^{-(s+t)L}
  const auto two_step = heat_semigroup(heat_semigroup(c, 0.35), 0.15);
  const auto one_step = heat_semigroup(c, 0.5);
  for (std::size_t m = 0; m < c.values.size(); ++m)
    CHECK(std::abs(two_step.values[m] - one_step.values[m]) <=
          1e-14 * std::max(std::abs(one_step.values[m]), 1e-300));

  CHECK_THROWS_AS(heat_semigroup(c, -0.1), std::invalid_argument);
}

TEST_CASE("oscillator heat kernel matches the Gaussian closed form") {
  const auto sys = make_harmonic_oscillator({1.0}, 320);
  const double xs[] = {-2.5, -1.0, 0.0, 0.4, 1.3, 3.0};
  for (double t : {0.05, 0.2, 1.0})
    for (double x : xs)
      for (double y : xs) {
        if (std::abs(x - y) > 1.5) continue;
        const double got = heat_kernel(*sys, t, {&x, 1}, {&y, 1});
        const double want = mehler_kernel(t, x, y);
        CAPTURE(t);
        CAPTURE(x);
        CAPTURE(y);
        CHECK(rel_gap(got, want) < 1e-10);
      }

  // positivity across the window, including well-separated pairs where
  // the kernel is exponentially small
  for (double t : {0.05, 0.2, 1.0}) {
    double kmax = 0.0;
    double kmin = 0.0;
    for (int i = 0; i <= 12; ++i)
      for (int j = 0; j <= 12; ++j) {
        const double x = -3.0 + 0.5 * i;
        const double y = -3.0 + 0.5 * j;
        const double k = heat_kernel(*sys, t, {&x, 1}, {&y, 1});
        kmax = std::max(kmax, k);
        kmin = std::min(kmin, k);
      }
    CHECK(kmax > 0.0);
    CHECK(kmin >= -1e-8 * kmax);
  }
}

TEST_CASE("negative powers respect the zero-mode policy") {
  FdGridSpec spec{1, {0.0}, {1.0}, {24}};
  const auto fd = make_divergence_form_fd(
      [](std::span<const double>) { return 1.0; },
      [](std::span<const double>) { return 0.0; }, spec, 1.5,
      FdBoundary::neumann);
  REQUIRE(std::abs(fd->eigenvalue(0)) < 1e-10);

  // a function with nonzero mean loads the zero mode
  const auto c = fd->analyze(
      [](std::span<const double> x) { return 1.0 + 0.2 * x[0]; });
  REQUIRE(std::abs(c.values[0]) > 0.1);
  CHECK_THROWS_AS(neg_frac_power(c, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(neg_frac_power(c, 0.5, ZeroModePolicy::reject),
                  std::invalid_argument);

  const auto dropped = neg_frac_power(c, 0.5, ZeroModePolicy::drop);
  CHECK(dropped.values[0] == 0.0);
  for (std::size_t m = 1; m < c.values.size(); ++m)
    CHECK(rel_gap(dropped.values[m],
                  c.values[m] * std::pow(fd->eigenvalue(m), -0.5)) < 1e-13);

  // L^sigma L^{-sigma} restores everything except the annihilated mode
  const auto round = frac_power_spectral(dropped, 0.5);
  CHECK(round.values[0] == 0.0);
  for (std::size_t m = 1; m < c.values.size(); ++m)
    CHECK(rel_gap(round.values[m], c.values[m]) < 1e-12);
}

TEST_CASE("inverse fractional power preserves positivity of smooth bumps") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 64);
  // smooth compactly supported bump, nonnegative
  const auto c = sys->analyze([](std::span<const double> p) {
    const double u = (p[0] - 1.6) / 0.8;
    return std::abs(u) < 1.0 ? std::exp(-u * u / (1.0 - u * u)) : 0.0;
  });
  const auto inv = neg_frac_power(c, 0.5);
  const auto grid = sys->scan_grid(201);
  const auto vals = sys->synthesize_values(inv, grid);
  double vmax = 0.0;
  for (double v : vals) vmax = std::max(vmax, v);
  CHECK(vmax > 0.0);
  for (double v : vals) CHECK(v >= -1e-8 * vmax);
}
