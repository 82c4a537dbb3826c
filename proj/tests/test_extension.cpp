#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracspec/extension.hpp"
#include "fracspec/fracops.hpp"
#include "fracspec/spectral.hpp"

using namespace fracspec;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// exact integral of |y|^{1-2s} over [lo, hi]
double band_mass(double lo, double hi, double sigma) {
  const double p = 2.0 - 2.0 * sigma;
  const auto prim = [p](double y) {
    return std::copysign(std::pow(std::abs(y), p) / p, y);
  };
  return prim(hi) - prim(lo);
}

Coefficients decaying_coefficients(
    const std::shared_ptr<const SpectralSystem>& sys) {
  auto c = sys->zero_coefficients();
  for (std::size_t m = 0; m < c.values.size(); ++m)
    c.values[m] = 1.0 / ((1.0 + static_cast<double>(m)) *
                         (1.0 + static_cast<double>(m)));
  return c;
}

}  // namespace

TEST_CASE("extension multiplier reduces to a pure exponential at sigma=1/2") {
  for (double lam : {0.3, 1.0, 4.0, 25.0, 400.0})
    for (double y : {1e-3, 0.1, 0.7, 2.0, 5.0}) {
      CAPTURE(lam);
      CAPTURE(y);
      CHECK(rel_gap(extension_multiplier(y, lam, 0.5),
                    std::exp(-y * std::sqrt(lam))) < 1e-12);
    }
}

TEST_CASE("extension multiplier behaves like a decay profile") {
  for (double sigma : {0.2, 0.5, 0.8}) {
    // zero eigenvalue never decays
    CHECK(extension_multiplier(1.7, 0.0, sigma) == 1.0);
    CHECK(extension_multiplier(0.0, 3.0, sigma) == 1.0);
    // continuous at the boundary: 1 - m = O((y sqrt(lambda))^{2 sigma})
    const double z = 1e-10 * std::sqrt(3.0);
    const double near_one =
        std::max(6.0 * std::pow(0.5 * z, 2.0 * sigma), 1e-12);
    CHECK(std::abs(extension_multiplier(1e-10, 3.0, sigma) - 1.0) <
          near_one);
    // strictly decreasing, trapped in (0, 1]
    double prev = 1.0;
    for (double y : {0.05, 0.2, 0.8, 2.0, 6.0}) {
      const double m = extension_multiplier(y, 3.0, sigma);
      CHECK(m > 0.0);
      CHECK(m < prev);
      prev = m;
    }
  }
  CHECK_THROWS_AS(extension_multiplier(1.0, 1.0, 1.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(extension_multiplier(-1.0, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(extension_multiplier(1.0, -1.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("closed-form multiplier matches the subordination quadrature") {
  for (double y : {0.1, 1.0, 3.0})
    for (double lam : {0.5, 2.0, 10.0})
      for (double sigma : {0.25, 0.5, 0.75}) {
        CAPTURE(y);
        CAPTURE(lam);
        CAPTURE(sigma);
        CHECK(rel_gap(extension_multiplier(y, lam, sigma),
                      extension_multiplier_quadrature(y, lam, sigma)) <
              1e-8);
      }
}

TEST_CASE("multiplier derivative matches difference quotients") {
  const double h = 1e-5;
  for (double y : {0.3, 1.0, 2.5})
    for (double lam : {0.7, 4.0, 16.0})
      for (double sigma : {0.25, 0.5, 0.75}) {
        const double fd = (extension_multiplier(y + h, lam, sigma) -
                           extension_multiplier(y - h, lam, sigma)) /
                          (2.0 * h);
        CAPTURE(y);
        CAPTURE(lam);
        CAPTURE(sigma);
        CHECK(rel_gap(extension_multiplier_dy(y, lam, sigma), fd) < 1e-6);
      }
  // exponential case differentiates exactly
  for (double y : {0.2, 1.5})
    CHECK(rel_gap(extension_multiplier_dy(y, 9.0, 0.5),
                  -3.0 * std::exp(-3.0 * y)) < 1e-10);
}

TEST_CASE("trace constant satisfies its functional identities") {
  CHECK(trace_constant(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  for (double s : {0.1, 0.25, 0.4})
    CHECK(trace_constant(s) * trace_constant(1.0 - s) ==
          doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rel_gap(trace_constant(0.25), 2.092099240106203297904) < 1e-13);
  CHECK(rel_gap(trace_constant(0.1), 5.113165415658188669388) < 1e-13);
  CHECK(rel_gap(trace_constant(0.75), 0.4779887974861249953638) < 1e-13);
}

TEST_CASE("scalar trace ladder recovers lambda^sigma") {
  const auto lad = trace_ladder(4.0, 0.5, 5, 12);
  REQUIRE(lad.y.size() == 8);
  REQUIRE(lad.raw.size() == 8);
  // levels descend geometrically
  for (std::size_t j = 1; j < lad.y.size(); ++j)
    CHECK(lad.y[j] == doctest::Approx(0.5 * lad.y[j - 1]).epsilon(1e-15));
  // raw readings approach 4^{1/2} = 2 monotonically
  double prev = std::abs(lad.raw[0] - 2.0);
  for (std::size_t j = 1; j < lad.raw.size(); ++j) {
    const double cur = std::abs(lad.raw[j] - 2.0);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(std::abs(lad.extrapolated - 2.0) < 2e-6);

  for (double sigma : {0.25, 0.75})
    for (double lam : {1.0, 9.0}) {
      CAPTURE(sigma);
      CAPTURE(lam);
      const auto l = trace_ladder(lam, sigma, 5, 12);
      CHECK(rel_gap(l.extrapolated, std::pow(lam, sigma)) < 1e-5);
    }
  CHECK_THROWS_AS(trace_ladder(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(trace_ladder(1.0, 0.5, 7, 6), std::invalid_argument);
}

TEST_CASE("mode-wise Neumann trace converges to the spectral power") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 24);
  const auto c = decaying_coefficients(sys);
  for (double sigma : {0.25, 0.5, 0.75}) {
    const auto traced = trace_derivative(c, sigma);
    const auto direct = frac_power_spectral(c, sigma);
    for (std::size_t m = 0; m < c.values.size(); ++m) {
      CAPTURE(sigma);
      CAPTURE(m);
      CHECK(std::abs(traced.values[m] - direct.values[m]) <=
            1e-6 * std::max(std::abs(direct.values[m]), 1e-30));
    }
  }
  // a spread tolerance nothing can satisfy aborts the ladder
  CHECK_THROWS_AS(trace_derivative(c, 0.5, 3, 12, 1e-18),
                  std::runtime_error);
  CHECK_THROWS_AS(trace_derivative(c, 0.5, 3, 5), std::invalid_argument);
}

TEST_CASE("reflection is even in the extension variable") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 16);
  const auto c = decaying_coefficients(sys);
  const double x = 1.2;
  for (double y : {0.1, 0.7, 2.3}) {
    const double up = reflected_value(c, 0.5, {&x, 1}, y);
    const double dn = reflected_value(c, 0.5, {&x, 1}, -y);
    CHECK(up == dn);  // bitwise: both go through |y|
    CHECK(up == extension_value(c, 0.5, {&x, 1}, y));
  }
  // y = 0 restores the trace itself
  CHECK(rel_gap(reflected_value(c, 0.3, {&x, 1}, 0.0),
                sys->synthesize_at(c, {&x, 1})) < 1e-14);
}

TEST_CASE("reflected sampling carries the band measure in its weights") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 8);
  const auto c = decaying_coefficients(sys);
  const double sigma = 0.3;

  GridFunction xg;
  xg.dim = 1;
  xg.coords = {0.8, 1.6, 2.4};
  xg.values.assign(3, 0.0);
  xg.weights = {0.25, 0.5, 0.25};

  const std::vector<double> levels = {-0.8, -0.2, 0.2, 0.5, 1.0};
  const auto out = reflect_even(c, sigma, xg, levels);
  REQUIRE(out.dim == 2);
  REQUIRE(out.size() == xg.size() * levels.size());

  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double y = levels[j];
    const double lo = (j == 0) ? y - 0.5 * (levels[1] - levels[0])
                               : 0.5 * (levels[j - 1] + y);
    const double hi = (j + 1 == levels.size())
                          ? y + 0.5 * (y - levels[levels.size() - 2])
                          : 0.5 * (y + levels[j + 1]);
    const double wy = band_mass(lo, hi, sigma);
    for (std::size_t p = 0; p < xg.size(); ++p) {
      const std::size_t q = j * xg.size() + p;
      CHECK(out.coords[q * 2 + 0] == xg.coords[p]);
      CHECK(out.coords[q * 2 + 1] == y);
      CHECK(rel_gap(out.weights[q], xg.weights[p] * wy) < 1e-13);
      // values only depend on |y|
      const double want = reflected_value(c, sigma, {&xg.coords[p], 1}, y);
      CHECK(rel_gap(out.values[q], want) < 1e-12);
    }
  }
  CHECK_THROWS_AS(reflect_even(c, sigma, xg, {}), std::invalid_argument);
  CHECK_THROWS_AS(reflect_even(c, sigma, xg, {0.5, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("weak form closes onto the boundary pairing as the strip shrinks") {
  const auto sys = make_dirichlet_interval(0.0, kPi, 24);
  const auto c = decaying_coefficients(sys);
  const double sigma = 0.4;

  SeparableTest test;
  test.chi_x = [](std::span<const double> p) {
    const double u = (p[0] - 1.5) / 0.9;
    return std::abs(u) < 1.0 ? std::exp(-u * u / (1.0 - u * u)) : 0.0;
  };
  test.y_extent = 1.0;
  test.chi_y = [](double y) {
    const double t = 1.0 - y * y;
    return t * t;
  };
  test.chi_y_prime = [](double y) { return -4.0 * y * (1.0 - y * y); };

  const auto coarse = weak_residual(c, sigma, test, 0.1, 12);
  const auto fine = weak_residual(c, sigma, test, 0.0125, 24);
  CHECK(std::abs(coarse.boundary_term) > 1e-4);
  // both strips see the same boundary pairing
  CHECK(rel_gap(fine.boundary_term, coarse.boundary_term) < 1e-12);
  const double gap_coarse = std::abs(coarse.value - coarse.boundary_term);
  const double gap_fine = std::abs(fine.value - fine.boundary_term);
  CHECK(gap_fine < 0.5 * gap_coarse);

  // everything is linear in the trace
  auto c2 = c;
  for (double& v : c2.values) v *= 3.0;
  const auto scaled = weak_residual(c2, sigma, test, 0.1, 12);
  CHECK(rel_gap(scaled.value, 3.0 * coarse.value) < 1e-12);
  CHECK(rel_gap(scaled.strip_flux, 3.0 * coarse.strip_flux) < 1e-12);
  CHECK(rel_gap(scaled.boundary_term, 3.0 * coarse.boundary_term) < 1e-12);

  // a test vanishing on the boundary kills the pairing identically
  SeparableTest vanish = test;
  vanish.chi_y = [](double y) {
    const double t = 1.0 - y * y;
    return y * y * t * t;
  };
  vanish.chi_y_prime = [](double y) {
    const double t = 1.0 - y * y;
    return 2.0 * y * t * t - 4.0 * y * y * y * t;
  };
  const auto zero = weak_residual(c, sigma, vanish, 0.05, 12);
  CHECK(zero.boundary_term == 0.0);

  CHECK_THROWS_AS(weak_residual(c, sigma, test, 1.5, 12),
                  std::invalid_argument);
  CHECK_THROWS_AS(weak_residual(c, sigma, test, 0.1, 0),
                  std::invalid_argument);
}

TEST_CASE("degenerate solver reproduces exactly representable solutions") {
  DegenerateGrid grid;
  grid.x_lo = 0.5;
  grid.x_hi = 2.5;
  grid.y_max = 1.0;
  grid.nx = 12;
  grid.ny = 10;
  const auto zero_V = [](double) { return 0.0; };

  for (double sigma : {0.25, 0.5, 0.75}) {
    CAPTURE(sigma);
    // constants survive any coefficient field
    const auto ones = solve_degenerate_fd(
        grid, sigma, [](double, double) { return 1.0; }, zero_V,
        [](double x) { return 1.0 + 0.4 * std::sin(x); });
    CHECK(ones.residual < 1e-10);
    for (double v : ones.values) CHECK(std::abs(v - 1.0) < 1e-10);

    // harmonic-in-x data with constant diffusion
    const auto linear = solve_degenerate_fd(
        grid, sigma, [](double x, double) { return x; }, zero_V);
    for (std::size_t i = 0; i < linear.x_nodes.size(); ++i)
      for (std::size_t j = 0; j < linear.y_nodes.size(); ++j)
        CHECK(std::abs(linear.value_at(i, j) - linear.x_nodes[i]) < 1e-10);

    // odd profile with constant weighted flux across y = 0
    const auto h = [sigma](double y) {
      return std::copysign(std::pow(std::abs(y), 2.0 * sigma), y) /
             (2.0 * sigma);
    };
    const auto flux = solve_degenerate_fd(
        grid, sigma, [&h](double, double y) { return h(y); }, zero_V);
    for (std::size_t i = 0; i < flux.x_nodes.size(); ++i)
      for (std::size_t j = 0; j < flux.y_nodes.size(); ++j)
        CHECK(std::abs(flux.value_at(i, j) - h(flux.y_nodes[j])) < 1e-10);
  }
}

TEST_CASE("degenerate solver keeps even data even and validates input") {
  DegenerateGrid grid;
  grid.nx = 9;
  grid.ny = 8;
  const auto even = solve_degenerate_fd(
      grid, 0.35, [](double x, double y) { return std::cos(x) + y * y; },
      [](double x) { return 0.2 + 0.1 * x; });
  const std::size_t ny = even.y_nodes.size();
  for (std::size_t i = 0; i < even.x_nodes.size(); ++i)
    for (std::size_t j = 0; j < ny / 2; ++j)
      CHECK(std::abs(even.value_at(i, j) - even.value_at(i, ny - 1 - j)) <
            1e-12);

  // sampled view carries the degenerate weight
  const auto gf = even.as_grid_function(0.35);
  REQUIRE(gf.dim == 2);
  REQUIRE(gf.size() == even.values.size());
  const double hx = (grid.x_hi - grid.x_lo) / static_cast<double>(grid.nx);
  const double hy = 2.0 * grid.y_max / static_cast<double>(grid.ny);
  for (std::size_t i = 0; i < even.x_nodes.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t q = i * ny + j;
      CHECK(gf.values[q] == even.value_at(i, j));
      const double y = even.y_nodes[j];
      CHECK(rel_gap(gf.weights[q],
                    hx * band_mass(y - 0.5 * hy, y + 0.5 * hy, 0.35)) <
            1e-12);
    }

  const auto g1 = [](double, double) { return 1.0; };
  const auto v0 = [](double) { return 0.0; };
  DegenerateGrid odd = grid;
  odd.ny = 7;
  CHECK_THROWS_AS(solve_degenerate_fd(odd, 0.5, g1, v0),
                  std::invalid_argument);
  DegenerateGrid tiny = grid;
  tiny.nx = 1;
  CHECK_THROWS_AS(solve_degenerate_fd(tiny, 0.5, g1, v0),
                  std::invalid_argument);
  DegenerateGrid empty = grid;
  empty.x_hi = empty.x_lo;
  CHECK_THROWS_AS(solve_degenerate_fd(empty, 0.5, g1, v0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_degenerate_fd(grid, 0.5, nullptr, v0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      solve_degenerate_fd(grid, 0.5, g1, [](double) { return -1.0; }),
      std::invalid_argument);
  CHECK_THROWS_AS(solve_degenerate_fd(grid, 0.5, g1, v0,
                                      [](double) { return -2.0; }),
                  std::invalid_argument);
}
