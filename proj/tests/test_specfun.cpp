#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fracspec/quadrature.hpp"
#include "fracspec/rng.hpp"
#include "fracspec/specfun.hpp"

using namespace fracspec;
using namespace fracspec::specfun;

namespace {

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace

// Reference values below were frozen from a 40-digit arbitrary-precision
// evaluation; they are independent of the implementation under test.

TEST_CASE("gamma matches the frozen high-precision table") {
  struct Row {
    double x, g;
  };
  const Row rows[] = {
      {0.5, 1.7724538509055160},    {1.0, 1.0},
      {1.5, 0.88622692545275801},   {2.0, 1.0},
      {3.7, 4.1706517837966040},    {4.7, 15.431411600047436},
      {9.2, 62010.763895764685},    {21.0, 2.4329020081766400e+18},
      {0.1, 9.5135076986687313},    {0.001, 999.42377248459545},
      {-0.5, -3.5449077018110321},  {-1.5, 2.3632718012073547},
      {-2.5, -0.94530872048294188}, {-6.3, -0.0030542314729989005},
  };
  for (const auto& r : rows) {
    CAPTURE(r.x);
    CHECK(rel_gap(gamma_fn(r.x), r.g) < 1e-13);
  }
}

TEST_CASE("gamma satisfies the recurrence and rejects poles") {
  rng::Stream rs(11);
  for (int i = 0; i < 40; ++i) {
    const double x = rs.uniform(0.05, 20.0);
    CAPTURE(x);
    CHECK(rel_gap(gamma_fn(x + 1.0), x * gamma_fn(x)) < 1e-12);
  }
  // reflection against the negative axis
  for (double x : {-0.3, -1.7, -4.2}) {
    const double lhs = gamma_fn(x) * gamma_fn(1.0 - x);
    const double rhs = std::numbers::pi / std::sin(std::numbers::pi * x);
    CHECK(rel_gap(lhs, rhs) < 1e-12);
  }
  CHECK_THROWS_AS((void)gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS((void)gamma_fn(-1.0), std::domain_error);
  CHECK_THROWS_AS((void)gamma_fn(-7.0), std::domain_error);
}

TEST_CASE("log_gamma matches the frozen table and exp(log_gamma) = gamma") {
  struct Row {
    double x, lg;
  };
  const Row rows[] = {
      {0.5, 0.57236494292470009},  {1.0, 0.0},
      {3.7, 1.4280723266653881},   {12.0, 17.502307845873886},
      {101.5, 366.04569819527675}, {171.0, 706.57306224578735},
      {0.001, 6.9071788853838537},
  };
  for (const auto& r : rows) {
    CAPTURE(r.x);
    CHECK(std::abs(log_gamma(r.x) - r.lg) <
          1e-13 * std::max(1.0, std::abs(r.lg)));
  }
  for (double x : {0.2, 1.3, 7.9, 55.0})
    CHECK(rel_gap(std::exp(log_gamma(x)), gamma_fn(x)) < 1e-12);
}

TEST_CASE("bessel_j matches the frozen table") {
  struct Row {
    double nu, x, j;
  };
  const Row rows[] = {
      {0, 0.5, 0.93846980724081290},      {0, 1.0, 0.76519768655796655},
      {0, 10.0, -0.24593576445134834},    {0, 40.0, 0.0073668905842372896},
      {1, 1.0, 0.44005058574493352},      {1, 25.0, -0.12535024958028990},
      {0.5, 2.0, 0.51301613656182775},    {1.5, 3.0, 0.47771821508709177},
      {2.7, 0.3, 0.0014210186483721532},  {2.7, 7.0, -0.24636285151377013},
      {2.7, 30.0, 0.14583053226899095},   {0.25, 12.0, -0.041552439750366529},
      {5.5, 2.0, 0.0029734706705033304},  {5.5, 60.0, 0.087462097759320711},
      {-0.5, 4.0, -0.26076607667717882},
  };
  for (const auto& r : rows) {
    CAPTURE(r.nu);
    CAPTURE(r.x);
    // compare against the oscillation envelope so the roots do not
    // inflate the relative error
    const double envelope = std::max(std::abs(r.j), 0.05);
    CHECK(std::abs(bessel_j(r.nu, r.x) - r.j) < 1e-8 * envelope);
  }
}

TEST_CASE("bessel_j half-integer orders reduce to trigonometric forms") {
  for (double x : {0.3, 1.0, 2.7, 8.0, 21.0}) {
    const double pref = std::sqrt(2.0 / (std::numbers::pi * x));
    CHECK(std::abs(bessel_j(0.5, x) - pref * std::sin(x)) < 1e-10);
    CHECK(std::abs(bessel_j(-0.5, x) - pref * std::cos(x)) < 1e-10);
    const double j32 = pref * (std::sin(x) / x - std::cos(x));
    CHECK(std::abs(bessel_j(1.5, x) - j32) < 1e-10);
  }
}

TEST_CASE("bessel_k matches the frozen table and the s = 1/2 closed form") {
  struct Row {
    double s, z, k;
  };
  const Row rows[] = {
      {0.5, 0.1, 3.5861668387972600},      {0.5, 1.0, 0.46106850444789456},
      {0.5, 10.0, 1.7993478093705180e-5},  {0.25, 0.05, 3.5877375452640272},
      {0.25, 1.0, 0.43073977444858552},    {0.25, 8.0, 0.00014701212355227993},
      {0.75, 0.3, 2.1828038539659765},     {0.75, 2.0, 0.12790297862917903},
      {0.75, 25.0, 3.5025947316540655e-12},{0.1, 0.7, 0.66369455661086559},
      {0.9, 5.0, 0.0039750582201105408},   {1.0, 1.0, 0.60190723019723457},
      {1.0, 0.02, 49.954717815764417},
  };
  for (const auto& r : rows) {
    CAPTURE(r.s);
    CAPTURE(r.z);
    CHECK(rel_gap(bessel_k(r.s, r.z), r.k) < 1e-10);
  }
  for (double z : {0.05, 0.6, 3.0, 15.0}) {
    const double closed =
        std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
    CHECK(rel_gap(bessel_k(0.5, z), closed) < 1e-12);
  }
}

TEST_CASE("hermite functions match the frozen table") {
  struct Row {
    int k;
    double x, h;
  };
  const Row rows[] = {
      {0, 0.0, 0.75112554446494248},   {0, 1.3, 0.32265150456496376},
      {3, 0.7, -0.47995350309611403},  {10, 2.0, 0.33421386535869943},
      {40, 0.5, -0.056663471232673394},{40, 9.5, 0.079399159024035031},
      {120, 1.1, -0.043534279301213114},
  };
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CAPTURE(r.x);
    CHECK(rel_gap(hermite_function(r.k, r.x), r.h) < 1e-12);
  }
}

TEST_CASE("hermite helpers are mutually consistent") {
  std::vector<double> all(31);
  for (double x : {-2.2, 0.0, 0.9, 4.4}) {
    hermite_function_all(30, x, all);
    for (int k : {0, 1, 7, 30})
      CHECK(all[static_cast<std::size_t>(k)] ==
            doctest::Approx(hermite_function(k, x)).epsilon(1e-14));
  }
  // scaled variant d^{1/4} h_k(sqrt(d) x)
  const double d = 2.6;
  for (int k : {0, 2, 9}) {
    for (double x : {0.15, 1.1}) {
      const double want =
          std::pow(d, 0.25) * hermite_function(k, std::sqrt(d) * x);
      CHECK(rel_gap(hermite_function_scaled(k, d, x), want) < 1e-14);
    }
  }
  // raw physicists' polynomial at a closed-form point: H_3(x) = 8x^3-12x
  CHECK(rel_gap(hermite_poly_raw(3, 0.8), -5.504) < 1e-14);
  // h_k(x) = H_k(x) e^{-x^2/2} / sqrt(2^k k! sqrt(pi))
  for (int k : {0, 1, 4, 8}) {
    const double x = 1.37;
    const double norm =
        std::exp(-0.5 * (static_cast<double>(k) * std::numbers::ln2 +
                         log_gamma(k + 1.0) + 0.5 * std::log(std::numbers::pi)));
    const double want = hermite_poly_raw(k, x) * std::exp(-0.5 * x * x) * norm;
    CHECK(rel_gap(hermite_function(k, x), want) < 1e-12);
  }
  // derivative recurrence h_k' = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}
  for (int k : {1, 6, 19}) {
    const double x = 0.7, h = 1e-4;
    const double fd = (hermite_function(k, x - 2 * h) -
                       8 * hermite_function(k, x - h) +
                       8 * hermite_function(k, x + h) -
                       hermite_function(k, x + 2 * h)) /
                      (12 * h);
    const double want = std::sqrt(k / 2.0) * hermite_function(k - 1, x) -
                        std::sqrt((k + 1) / 2.0) * hermite_function(k + 1, x);
    CHECK(std::abs(fd - want) < 1e-8);
  }
}

TEST_CASE("hermite_poly_normalized matches the frozen table") {
  struct Row {
    int k;
    double u, p;
  };
  const Row rows[] = {
      {0, 0.4, 1.0},                  {1, 0.4, 0.56568542494923805},
      {2, -1.1, 1.0040916292848978},  {7, 0.9, 0.25528519736361646},
      {25, 1.7, -0.88007378495597001},
  };
  std::vector<double> all(26);
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CHECK(rel_gap(hermite_poly_normalized(r.k, r.u), r.p) < 1e-12);
    hermite_poly_normalized_all(25, r.u, all);
    CHECK(rel_gap(all[static_cast<std::size_t>(r.k)], r.p) < 1e-12);
  }
}

TEST_CASE("laguerre polynomials match the frozen table and closed forms") {
  struct Row {
    int k;
    double alpha, u, v;
  };
  const Row rows[] = {
      {0, 0.5, 0.3, 1.0622519320271969},  {1, 0.5, 0.3, 1.0407900847008930},
      {4, 0.5, 2.5, 0.38794369150766760}, {12, -0.3, 7.0, 4.4695259130023341},
      {30, 1.7, 19.0, 128.94177297049915},{60, 0.5, 4.0, -0.23912393340408030},
  };
  std::vector<double> all(61);
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CAPTURE(r.alpha);
    CHECK(rel_gap(laguerre_normalized(r.k, r.alpha, r.u), r.v) < 1e-12);
    laguerre_normalized_all(60, r.alpha, r.u, all);
    CHECK(rel_gap(all[static_cast<std::size_t>(r.k)], r.v) < 1e-12);
  }
  // raw closed forms: L_0 = 1, L_1 = alpha + 1 - u,
  // L_2 = (a+1)(a+2)/2 - (a+2) u + u^2/2
  for (double a : {-0.4, 0.5, 2.3}) {
    for (double u : {0.0, 0.9, 6.2}) {
      CHECK(laguerre_raw(0, a, u) == 1.0);
      CHECK(rel_gap(laguerre_raw(1, a, u), a + 1.0 - u) < 1e-14);
      const double l2 =
          0.5 * (a + 1) * (a + 2) - (a + 2) * u + 0.5 * u * u;
      CHECK(std::abs(laguerre_raw(2, a, u) - l2) < 1e-13 * (1 + std::abs(l2)));
    }
  }
  CHECK(rel_gap(laguerre_raw(2, 0.5, 1.7), -0.93) < 1e-13);
}

TEST_CASE("laguerre function families reduce to the normalized polynomials") {
  const double a = 0.5;
  for (int k : {0, 1, 5, 14}) {
    for (double x : {0.4, 1.1, 2.8}) {
      const double ltil_x2 = laguerre_normalized(k, a, x * x);
      const double ltil_x = laguerre_normalized(k, a, x);
      const double phi = std::pow(x, a) * std::sqrt(2.0 * x) *
                         std::exp(-0.5 * x * x) * ltil_x2;
      const double ell = std::exp(-0.5 * x) * ltil_x;
      CHECK(rel_gap(laguerre_phi(k, a, x), phi) < 1e-13);
      CHECK(rel_gap(laguerre_ell(k, a, x), ell) < 1e-13);
      CHECK(rel_gap(laguerre_psi(k, a, x),
                    std::sqrt(2.0) * laguerre_ell(k, a, x * x)) < 1e-13);
      CHECK(rel_gap(laguerre_lfun(k, a, x),
                    std::pow(x, 0.5 * a) * laguerre_ell(k, a, x)) < 1e-13);
    }
  }
}

TEST_CASE("laguerre phi and psi families are orthonormal under plain quadrature") {
  // independent check: composite Gauss-Legendre on (0, X), no weight tricks
  const double a = 0.5;
  const auto rule = quadrature::composite_legendre(1e-8, 14.0, 160, 10);
  for (int j : {0, 2, 5}) {
    for (int k : {0, 2, 5}) {
      double sphi = 0.0, spsi = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double x = rule.nodes[q], w = rule.weights[q];
        sphi += w * laguerre_phi(j, a, x) * laguerre_phi(k, a, x);
        spsi += w * std::pow(x, 2.0 * a + 1.0) * laguerre_psi(j, a, x) *
                laguerre_psi(k, a, x);
      }
      const double want = j == k ? 1.0 : 0.0;
      CHECK(std::abs(sphi - want) < 1e-8);
      CHECK(std::abs(spsi - want) < 1e-8);
    }
  }
}

TEST_CASE("gegenbauer values match the frozen table and closed forms") {
  struct Row {
    int k;
    double lam, t, v;
  };
  const Row rows[] = {
      {0, 1.5, 0.2, 0.86602540378443865}, {1, 1.5, 0.2, 0.38729833462074171},
      {5, 1.5, -0.6, 0.94377728898294630},{12, 0.8, 0.95, -1.8960950788302327},
      {30, 2.2, 0.31, 0.67606828117788978},
  };
  std::vector<double> all(31);
  for (const auto& r : rows) {
    CAPTURE(r.k);
    CAPTURE(r.lam);
    CHECK(rel_gap(gegenbauer_orthonormal(r.k, r.lam, r.t), r.v) < 1e-12);
    gegenbauer_orthonormal_all(30, r.lam, r.t, all);
    CHECK(rel_gap(all[static_cast<std::size_t>(r.k)], r.v) < 1e-12);
  }
  for (double lam : {0.7, 1.3, 2.0}) {
    for (double t : {-0.8, 0.1, 0.64}) {
      CHECK(rel_gap(gegenbauer_raw(1, lam, t), 2.0 * lam * t) < 1e-14);
      const double c2 = 2.0 * lam * (lam + 1.0) * t * t - lam;
      CHECK(std::abs(gegenbauer_raw(2, lam, t) - c2) < 1e-13 * (1 + std::abs(c2)));
    }
  }
  CHECK(rel_gap(gegenbauer_raw(2, 1.3, 0.4), -0.3432) < 1e-13);
}

TEST_CASE("ultraspherical_p is the sine-conjugated orthonormal polynomial") {
  const double lam = 1.5;
  for (int k : {0, 1, 4, 11}) {
    for (double th : {0.4, 1.3, 2.6}) {
      const double want = std::pow(std::sin(th), lam) *
                          gegenbauer_orthonormal(k, lam, std::cos(th));
      CHECK(rel_gap(ultraspherical_p(k, lam, th), want) < 1e-13);
    }
  }
  // orthonormal in plain L2((0,pi), dtheta)
  const auto rule = quadrature::composite_legendre(0.0, std::numbers::pi, 60, 10);
  for (int j : {0, 3}) {
    for (int k : {0, 3, 6}) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        s += rule.weights[q] * ultraspherical_p(j, lam, rule.nodes[q]) *
             ultraspherical_p(k, lam, rule.nodes[q]);
      CHECK(std::abs(s - (j == k ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("eval_basis dispatch agrees with the direct entry points") {
  using enum Family;
  CHECK(eval_basis(hermite_function, Normalization::orthonormal, 5, 1.7, 0.4) ==
        doctest::Approx(hermite_function_scaled(5, 1.7, 0.4)).epsilon(1e-15));
  CHECK(eval_basis(hermite, Normalization::raw, 3, 0.0, 0.8) ==
        doctest::Approx(hermite_poly_raw(3, 0.8)).epsilon(1e-15));
  CHECK(eval_basis(laguerre, Normalization::orthonormal, 4, 0.5, 2.5) ==
        doctest::Approx(laguerre_normalized(4, 0.5, 2.5)).epsilon(1e-15));
  CHECK(eval_basis(laguerre_phi, Normalization::orthonormal, 2, 0.5, 1.3) ==
        doctest::Approx(specfun::laguerre_phi(2, 0.5, 1.3)).epsilon(1e-15));
  CHECK(eval_basis(gegenbauer, Normalization::orthonormal, 5, 1.5, -0.6) ==
        doctest::Approx(gegenbauer_orthonormal(5, 1.5, -0.6)).epsilon(1e-15));
  CHECK(eval_basis(ultraspherical_p, Normalization::orthonormal, 4, 1.5, 1.3) ==
        doctest::Approx(specfun::ultraspherical_p(4, 1.5, 1.3)).epsilon(1e-15));
  CHECK(family_from_name("laguerre_psi") == laguerre_psi);
  CHECK_THROWS_AS((void)family_from_name("nope"), std::invalid_argument);
}

TEST_CASE("degrees beyond kMaxDegree are rejected") {
  CHECK_THROWS_AS((void)hermite_function(kMaxDegree + 1, 0.3), std::exception);
  CHECK_THROWS_AS((void)laguerre_normalized(kMaxDegree + 1, 0.5, 1.0),
                  std::exception);
  CHECK_THROWS_AS((void)gegenbauer_orthonormal(kMaxDegree + 1, 1.5, 0.2),
                  std::exception);
}
