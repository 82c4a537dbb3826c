#pragma once

#include "fracspec/spectral.hpp"

namespace fracspec {

// Heat semigroup: c_m -> exp(-t lambda_m) c_m.  Contraction for t >= 0.
Coefficients heat_semigroup(const Coefficients& c, double t);

// Heat kernel value sum_m w_m e^{-t lambda_m} phi_m(x) phi_m(y).
double heat_kernel(const SpectralSystem& sys, double t,
                   std::span<const double> x, std::span<const double> y);

// Fractional power through the spectral calculus: c_m -> lambda_m^sigma c_m.
Coefficients frac_power_spectral(const Coefficients& c, double sigma);

struct BalakrishnanOptions {
  // t = e^s; the window below is supplemented by analytic corrections for
  // both tails, so the quadrature never has to chase them.
  double s_lo = -30.0;
  int panels = 40;
  int points_per_panel = 10;
};

// Scalar kernel of the semigroup route: approximates lambda^sigma as
// (1/Gamma(-sigma)) * Int_0^inf (e^{-t lambda} - 1) t^{-1-sigma} dt.
double balakrishnan_scalar(double lambda, double sigma,
                           const BalakrishnanOptions& opt = {});

// Fractional power through the semigroup integral, applied mode-wise.
// Independent of frac_power_spectral; the two routes must agree.
Coefficients frac_power_balakrishnan(const Coefficients& c, double sigma,
                                     const BalakrishnanOptions& opt = {});

enum class ZeroModePolicy { reject, drop };

// Negative power: c_m -> lambda_m^{-sigma} c_m.  Modes with lambda = 0
// either abort the call or are annihilated, per policy.
Coefficients neg_frac_power(const Coefficients& c, double sigma,
                            ZeroModePolicy policy = ZeroModePolicy::reject);

}  // namespace fracspec
