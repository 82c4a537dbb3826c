#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracspec/extension.hpp"
#include "fracspec/spectral.hpp"

namespace fracspec {

/// smooth compactly supported profile ((1-t^2)^4 on |t| < 1)
double bump(double x, double center, double half_width, double height);

/// product bump over the coordinates of a box
ScalarField bump_field(std::vector<double> center, std::vector<double> half_width,
                       double height);

struct Box {
  std::vector<double> lo, hi;
  [[nodiscard]] int dim() const { return static_cast<int>(lo.size()); }
  [[nodiscard]] bool contains(std::span<const double> x, double margin = 0.0) const;
};

/// uniform midpoint scan of a box; weights carry the cell volume
GridFunction box_grid(const Box& box, int per_axis);

struct SigmaHarmonic {
  Coefficients f;                 // candidate, = L^{-sigma} g
  double residual_sup = 0.0;      // sup over the O-grid of |L^sigma f|
  double generator_sup = 0.0;     // sup of g over its own support grid
  double min_over_domain = 0.0;   // min of f on the domain scan
  double sup_over_domain = 0.0;
  double parseval_defect = 0.0;   // of the generator analysis
  bool accepted = false;
  std::string note;               // reason when not accepted
};

/// f = L^{-sigma} g for a nonnegative generator supported away from O;
/// verifies the support/positivity preconditions on the scan grid and the
/// sigma-harmonicity residual over O
SigmaHarmonic make_sigma_harmonic(
    const std::shared_ptr<const SpectralSystem>& system, double sigma,
    const Box& region_o, const ScalarField& g, int scan_per_axis = 200,
    double residual_tol = 1e-4, double negativity_tol = 1e-8);

struct RatioResult {
  double sup = 0.0, inf = 0.0;
  double ratio = 0.0;
  bool bounded = false;  // false when inf is below the positivity guard
};

/// sup/inf of the synthesized f over the compact scan grid; errors when f
/// dips below -1e-12 * sup there, guards inf > 1e-14 * sup
RatioResult harnack_ratio(const Coefficients& f, const GridFunction& compact);

struct SurveyConfig {
  std::shared_ptr<const SpectralSystem> system;
  double sigma = 0.5;
  Box region_o;    // solve region (sigma-harmonicity verified here)
  Box compact_k;   // ratio region, strictly inside region_o
  Box generators;  // bump placement region, disjoint from region_o
  int trials = 200;
  std::uint64_t seed = 1;
  int scan_per_axis = 200;
  double residual_tol = 1e-4;
  /// cross-check every n-th accepted trial against the degenerate
  /// finite-volume extension (0 disables)
  int fd_every = 0;
  std::size_t fd_cells = 48;
};

struct TrialRecord {
  std::uint64_t index = 0;
  std::vector<double> center;
  std::vector<double> half_width;
  double height = 0.0;
  double ratio = 0.0, sup = 0.0, inf = 0.0;
  double residual = 0.0;
  double min_f = 0.0;
  double fd_ratio_gap = -1.0;  // relative gap of the FD-side ratio (<0: unchecked)
  bool accepted = false;
  std::string note;
};

struct SurveyReport {
  double sigma = 0.0;
  std::string system_name;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<TrialRecord> records;
  std::size_t accepted = 0;
  std::size_t excluded_support = 0;    // generator landed on region_o
  std::size_t excluded_negative = 0;   // f dipped below the tolerance
  std::size_t excluded_residual = 0;   // sigma-harmonicity failed
  std::size_t excluded_unbounded = 0;  // inf at the positivity guard
  double c_emp = 0.0;
  double quartile1 = 0.0, median = 0.0, quartile3 = 0.0;
  std::size_t fd_checked = 0;
  double fd_max_gap = 0.0;
};

SurveyReport run_survey(const SurveyConfig& config);

struct WindowStats {
  double mean = 0.0;
  double oscillation = 0.0;   // sup - inf over the window
  double residual_sup = 0.0;  // sup of |L^sigma f| over the window
};

WindowStats window_stats(const Coefficients& f, double sigma, double window_lo,
                         double window_hi, int points = 161);

struct LiouvilleReport {
  double sigma = 0.0;
  double window = 1.0;
  double admission_tol = 0.1;
  std::vector<double> radii;
  std::vector<double> osc_over_mean;
  std::vector<double> residual_rel;
  std::vector<bool> admitted;
  bool decreasing = false;  // osc/mean monotone down the admitted radii
};

/// widening-domain constancy analogue: heat-smoothed nonnegative data near
/// the ends of [-R, R] (reflecting boundary), R in {4, 8, 16}; reports
/// osc/mean over the fixed window |x| <= window
LiouvilleReport liouville_check(double sigma, std::uint64_t seed,
                                double window = 1.0);

struct TouchTrialReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // max over trials of L^sigma(f-g) at the touch point
};

/// comparison-principle trials: f >= g with equality at a touch point must
/// give L^sigma f <= L^sigma g there, up to tol
TouchTrialReport maximum_principle_trials(
    const std::shared_ptr<const SpectralSystem>& system, double sigma,
    int n_trials, std::uint64_t seed, double tol = 1e-6);

}  // namespace fracspec
