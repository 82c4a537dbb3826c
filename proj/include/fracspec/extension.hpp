#pragma once

#include <functional>
#include <vector>

#include "fracspec/spectral.hpp"

namespace fracspec {

// Decay profile in the extension variable: m(0+) = 1, m strictly
// decreasing to 0, and m(y, 0) = 1.  Closed Bessel-K form.
double extension_multiplier(double y, double lambda, double sigma);

// Independent route: direct quadrature of the subordination integral
// y^{2 sigma} / (4^sigma Gamma(sigma)) * Int_0^inf e^{-t lambda}
// e^{-y^2/(4t)} t^{-1-sigma} dt.  Validation oracle for the closed form.
double extension_multiplier_quadrature(double y, double lambda, double sigma);

// d m / d y of the closed form (lambda > 0, y > 0).
double extension_multiplier_dy(double y, double lambda, double sigma);

// 4^{sigma-1/2} Gamma(sigma) / Gamma(1-sigma).
double trace_constant(double sigma);

// Coefficients of u(., y): c_m -> m(y, lambda_m) c_m.
Coefficients extend_coefficients(const Coefficients& trace, double y,
                                 double sigma);

// u(x, y) and its even reflection u(x, |y|).
double extension_value(const Coefficients& trace, double sigma,
                       std::span<const double> x, double y);
double reflected_value(const Coefficients& trace, double sigma,
                       std::span<const double> x, double y);

// Sample the reflection on x_grid x y_levels (y levels arbitrary signs).
// Output dim = x dim + 1; weights are x-weight * y cell width * |y|^{1-2s}.
GridFunction reflect_even(const Coefficients& trace, double sigma,
                          const GridFunction& x_grid,
                          const std::vector<double>& y_levels);

struct TraceLadder {
  std::vector<double> y;     // geometric levels, descending
  std::vector<double> raw;   // -c_sigma y^{1-2 sigma} dm/dy at each level
  double extrapolated = 0.0; // fitted y -> 0 limit
};

// Scalar Neumann-trace reading of lambda^sigma across y = 2^{-j},
// j = j_lo..j_hi, extrapolated with the known error exponents
// {2-2sigma, 2, 4-2sigma, 4}.
TraceLadder trace_ladder(double lambda, double sigma, int j_lo = 3,
                         int j_hi = 12);

// Mode-wise Neumann trace of the extension; converges to
// frac_power_spectral(trace, sigma).  Throws when a mode's ladder spread
// between the last two levels exceeds spread_tol relatively.
Coefficients trace_derivative(const Coefficients& trace, double sigma,
                              int j_lo = 3, int j_hi = 12,
                              double spread_tol = 1e-3);

// Even-in-y separable test field chi_x(x) * chi_y(|y|), chi_y(Y) = 0.
struct SeparableTest {
  ScalarField chi_x;
  std::function<double(double)> chi_y;
  std::function<double(double)> chi_y_prime;
  double y_extent = 1.0;
};

struct WeakResidual {
  double value = 0.0;          // weak form outside the |y| < delta strip
  double strip_flux = 0.0;     // flux through |y| = delta (strip estimate)
  double boundary_term = 0.0;  // (2/c_sigma) <L^sigma f, chi_x> chi_y(0)
};

// Weak form of the degenerate equation against the reflected extension,
// integrated over |y| in [delta, Y] with v_const * u * test added; the
// x-integral runs through the eigenbasis, the y-integral over log-spaced
// panels.
WeakResidual weak_residual(const Coefficients& trace, double sigma,
                           const SeparableTest& test, double delta,
                           int y_panels, double v_const = 0.0);

// --- degenerate finite-volume solver --------------------------------------

struct DegenerateGrid {
  double x_lo = 0.0, x_hi = 1.0;
  double y_max = 1.0;            // band (-y_max, y_max)
  std::size_t nx = 32, ny = 32;  // cells; ny must be even so y=0 is a face
};

struct DegenerateSolution {
  DegenerateGrid grid;
  std::vector<double> x_nodes, y_nodes;  // cell centers
  std::vector<double> values;            // row-major, x slowest
  double residual = 0.0;                 // relative linear-system residual
  [[nodiscard]] double value_at(std::size_t i, std::size_t j) const {
    return values[i * y_nodes.size() + j];
  }
  [[nodiscard]] GridFunction as_grid_function(double sigma) const;
};

// Finite-volume solution of div(|y|^{1-2s} diag(a(x),1) grad v)
// = |y|^{1-2s} V(x) v on the box with Dirichlet data g(x,y); the face
// integrals of the weight and its reciprocal are exact, the system SPD.
DegenerateSolution solve_degenerate_fd(
    const DegenerateGrid& grid, double sigma,
    const std::function<double(double, double)>& boundary,
    const std::function<double(double)>& V,
    const std::function<double(double)>& a = {});

}  // namespace fracspec
