#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracspec/spectral.hpp"

namespace fracspec {

/// Unitary change of setting (U f)(x) = M(x) f(h(x)) between the weighted
/// L2 spaces of two systems; h maps the target domain into the source
/// domain and shift records L_target U = U (L_source + shift).
struct TransferenceMap {
  std::string name;
  std::shared_ptr<const SpectralSystem> source, target;
  /// weight M on the target domain (never zero in the interior)
  std::function<double(std::span<const double>)> multiplier;
  /// h: target point -> source point
  std::function<void(std::span<const double>, std::span<double>)> forward;
  /// h^{-1}: source point -> target point
  std::function<void(std::span<const double>, std::span<double>)> inverse;
  double shift = 0.0;
  /// expected verification accuracy (looser for continuous-spectrum pairs)
  double tolerance = 1e-6;
};

/// (U f)(x) with f given by source-side coefficients
double apply_at(const TransferenceMap& map, const Coefficients& src,
                std::span<const double> x);

/// (U^{-1} g)(u) with g given by target-side coefficients
double apply_inverse_at(const TransferenceMap& map, const Coefficients& tgt,
                        std::span<const double> u);

/// samples of U f on the target quadrature grid
GridFunction apply(const TransferenceMap& map, const Coefficients& src);

/// target-side coefficients of U f
Coefficients push_forward(const TransferenceMap& map, const Coefficients& src);

/// target-side fractional multipliers max(lambda - shift, 0)^sigma
Coefficients shifted_frac_power(const TransferenceMap& map,
                                const Coefficients& tgt, double sigma);

/// max over j,k < k_max of |<U phi_j, U phi_k>_target - <phi_j, phi_k>_source|
/// with both Grams taken by the systems' own quadratures
double gram_transport_defect(const TransferenceMap& map, std::size_t k_max);

/// max relative pointwise defect of U^{-1}(U f) = f over the source scan
/// grid for a seeded random mode combination (pure function algebra)
double involution_defect(const TransferenceMap& map, std::uint64_t seed);

struct IntertwiningReport {
  /// worst relative L2 discrepancy of U L^sigma f vs (L-shift)^sigma U f
  double discrepancy = 0.0;
  std::size_t trials = 0;
};

/// runs n_trials seeded random source functions through both routes and
/// compares them in the target L2
IntertwiningReport verify_intertwining(const TransferenceMap& map,
                                       double sigma, int n_trials,
                                       std::uint64_t seed);

struct RatioTransport {
  double ratio_source = 0.0;   // sup/inf of f over the mapped region
  double ratio_target = 0.0;   // sup/inf of U f over the region
  double weight_ratio2 = 0.0;  // (sup M / inf M)^2 over the region
  bool consistent = false;     // each ratio bounds the other through M
};

/// two-sided comparison of sup/inf quotients on a compact target-side
/// region: the transported quotient is pinched by the direct one times
/// the squared oscillation of the weight
RatioTransport transported_ratio_bound(const TransferenceMap& map,
                                       const Coefficients& src,
                                       const GridFunction& target_region);

/// the built-in catalog; modes bounds the basis size per system
std::vector<TransferenceMap> builtin_maps(int modes = 64);

/// catalog lookup by name (throws when absent)
TransferenceMap find_map(std::string_view name, int modes = 64);

}  // namespace fracspec
