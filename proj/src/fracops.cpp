#include "fracspec/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracspec/quadrature.hpp"
#include "fracspec/specfun.hpp"

namespace fracspec {

namespace {

void require_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("sigma must lie strictly in (0,1)");
}

}  // namespace

Coefficients heat_semigroup(const Coefficients& c, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
  Coefficients out = c;
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] *= std::exp(-t * c.system->eigenvalue(m));
  return out;
}

double heat_kernel(const SpectralSystem& sys, double t,
                   std::span<const double> x, std::span<const double> y) {
  const std::size_t modes = sys.mode_count();
  std::vector<double> bx(modes), by(modes);
  sys.eval_modes_at(x, bx);
  sys.eval_modes_at(y, by);
  double s = 0.0;
  for (std::size_t m = 0; m < modes; ++m)
    s += sys.mode_weight(m) * std::exp(-t * sys.eigenvalue(m)) * bx[m] * by[m];
  return s;
}

Coefficients frac_power_spectral(const Coefficients& c, double sigma) {
  require_sigma(sigma);
  Coefficients out = c;
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    const double lam = c.system->eigenvalue(m);
    out.values[m] *= lam > 0.0 ? std::pow(lam, sigma) : 0.0;
  }
  out.input_norm2 = -1.0;
  return out;
}

double balakrishnan_scalar(double lambda, double sigma,
                           const BalakrishnanOptions& opt) {
  require_sigma(sigma);
  if (lambda == 0.0) return 0.0;
  if (!(lambda > 0.0))
    throw std::invalid_argument("eigenvalues must be nonnegative");
  // substitute t = e^s: integrand (e^{-lambda e^s} - 1) e^{-sigma s}
  const double s_lo = opt.s_lo;
  const double s_hi = std::min(30.0, std::max(10.0, std::log(50.0 / lambda)));
  const double t0 = std::exp(s_lo), t1 = std::exp(s_hi);
  if (lambda * t0 > 1e-3)
    throw std::invalid_argument("lambda too large for the left-tail series");
  quadrature::Rule1D rule = quadrature::composite_legendre(
      s_lo, s_hi, opt.panels, opt.points_per_panel);
  double integral = rule.integrate([&](double s) {
    return std::expm1(-lambda * std::exp(s)) * std::exp(-sigma * s);
  });
  // left tail (0, t0]: expand e^{-lambda t} - 1 in powers of lambda t
  double term = 1.0;
  for (int m = 1; m <= 6; ++m) {
    term *= -lambda / m;
    integral += term * std::pow(t0, m - sigma) / (m - sigma);
  }
  // right tail [t1, inf): e^{-lambda t} is below e^{-50} there, leaving -1
  integral -= std::pow(t1, -sigma) / sigma;
  return integral / specfun::gamma_fn(-sigma);
}

Coefficients frac_power_balakrishnan(const Coefficients& c, double sigma,
                                     const BalakrishnanOptions& opt) {
  require_sigma(sigma);
  Coefficients out = c;
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] *= balakrishnan_scalar(c.system->eigenvalue(m), sigma, opt);
  out.input_norm2 = -1.0;
  return out;
}

Coefficients neg_frac_power(const Coefficients& c, double sigma,
                            ZeroModePolicy policy) {
  require_sigma(sigma);
  Coefficients out = c;
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    const double lam = c.system->eigenvalue(m);
    if (lam > 0.0) {
      out.values[m] *= std::pow(lam, -sigma);
    } else if (out.values[m] != 0.0) {
      if (policy == ZeroModePolicy::reject)
        throw std::invalid_argument(
            "zero eigenvalue carries a nonzero coefficient");
      out.values[m] = 0.0;
    }
  }
  out.input_norm2 = -1.0;
  return out;
}

}  // namespace fracspec
