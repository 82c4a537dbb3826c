#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fracspec/grid.hpp"
#include "fracspec/quadrature.hpp"

// Spectral realizations of nonnegative second-order operators: an
// orthonormal eigenbasis (or a generalized continuum family) together
// with the quadrature of the underlying measure.  Everything downstream
// (heat semigroups, fractional powers, extension fields) acts on
// coefficients against one of these systems.

namespace fracspec {

enum class Flavor { discrete, continuous };

class SpectralSystem;

using ScalarField = std::function<double(std::span<const double>)>;

/// Expansion coefficients of a function in a SpectralSystem.  For
/// continuous systems the entries sample the transform on the spectral
/// quadrature grid; mode weights fold the spectral measure back in.
struct Coefficients {
  std::shared_ptr<const SpectralSystem> system;
  std::vector<double> values;
  double input_norm2 = -1.0;  // ||f||^2 seen by analyze; negative if unknown

  /// sum_m w_m c_m^2 (Parseval side of the coefficients)
  [[nodiscard]] double norm2() const;
  /// |input_norm2 - norm2()| / max(input_norm2, eps); 0 if input unknown
  [[nodiscard]] double parseval_defect() const;
};

class SpectralSystem : public std::enable_shared_from_this<SpectralSystem> {
 public:
  virtual ~SpectralSystem() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual Flavor flavor() const = 0;

  [[nodiscard]] virtual std::size_t mode_count() const = 0;
  [[nodiscard]] virtual double eigenvalue(std::size_t m) const = 0;
  /// spectral quadrature weight (1 for discrete modes)
  [[nodiscard]] virtual double mode_weight(std::size_t) const { return 1.0; }
  /// per-axis indices of a flattened mode (continuous axes report
  /// node*channels+channel)
  [[nodiscard]] virtual std::vector<int> mode_index(std::size_t m) const = 0;

  /// all mode values at one point
  virtual void eval_modes_at(std::span<const double> x,
                             std::span<double> out) const = 0;
  [[nodiscard]] double eval_mode(std::size_t m, std::span<const double> x) const;

  [[nodiscard]] virtual double measure_density(
      std::span<const double> x) const = 0;

  /// quadrature of the measure used for analysis integrals; the value
  /// column is unused
  [[nodiscard]] virtual const GridFunction& quadrature_grid() const = 0;

  /// uniform scan grid over the system's working window, weights
  /// carrying the measure (trapezoid-type)
  [[nodiscard]] virtual GridFunction scan_grid(int per_axis) const = 0;

  /// true when the heat semigroup is positivity preserving and the
  /// maximum-principle experiments may run against this system
  [[nodiscard]] virtual bool positivity_preserving() const = 0;

  /// declared growth lambda_k ~ |k|^c for the discrete flavor
  [[nodiscard]] virtual double eigenvalue_growth_exponent() const = 0;

  [[nodiscard]] virtual Coefficients analyze(const ScalarField& f) const;
  [[nodiscard]] Coefficients analyze(const GridFunction& samples) const;

  [[nodiscard]] std::vector<double> synthesize_values(
      const Coefficients& c, const GridFunction& points) const;
  [[nodiscard]] double synthesize_at(const Coefficients& c,
                                     std::span<const double> x) const;

  [[nodiscard]] Coefficients zero_coefficients() const;

  /// tabulate the first `count` modes at every point, row per point.
  /// Reuses the cached quadrature-grid table when the points are exactly
  /// the system's own quadrature nodes.
  void eval_modes_on(const GridFunction& points, std::size_t count,
                     std::vector<double>& out) const;

 protected:
  /// analyze from explicit samples: c_m = sum_p w_p f_p phi_m(x_p)
  [[nodiscard]] Coefficients analyze_samples(const GridFunction& samples) const;

 private:
  /// mode values tabulated on the quadrature grid (row per point); null
  /// when the table would be too large to pay for itself
  [[nodiscard]] const std::vector<double>* quadrature_mode_table() const;
  [[nodiscard]] bool is_quadrature_grid(const GridFunction& g) const;

  mutable std::once_flag mode_table_once_;
  mutable std::vector<double> mode_table_;
  mutable bool mode_table_built_ = false;
};

// --- catalog ----------------------------------------------------------

std::shared_ptr<const SpectralSystem> make_dirichlet_interval(double a,
                                                              double b,
                                                              int modes);

/// H_D = -Laplace + |Dx|^2 with D = diag(d); shifted variant subtracts
/// sum_i d_i from every eigenvalue (same eigenfunctions).
std::shared_ptr<const SpectralSystem> make_harmonic_oscillator(
    std::vector<double> d, int modes_per_axis, bool shifted = false);

std::shared_ptr<const SpectralSystem> make_laguerre_phi(
    std::vector<double> alpha, int modes_per_axis);

/// l_lambda = -d^2/dtheta^2 + lambda(lambda-1)/sin^2 theta on
/// L2((0,pi),dtheta), eigenvalues (k+lambda)^2.
std::shared_ptr<const SpectralSystem> make_ultraspherical_l(double lambda,
                                                            int modes);

/// S_lambda = -d^2/dx^2 + (lambda^2-lambda)/x^2 on L2((0,inf),dx);
/// continuous spectrum xi^2 with Hankel-type eigenfunctions.
std::shared_ptr<const SpectralSystem> make_bessel_s(double lambda,
                                                    double xi_max = 40.0,
                                                    double x_max = 15.0);

/// -Laplace on L2(R^n,dx) through cosine/sine channels per axis,
/// numerically windowed to [-box_half, box_half]^n.
std::shared_ptr<const SpectralSystem> make_fourier_laplacian(
    int n, double box_half = 12.0, double xi_max = 40.0);

// transference sources

/// Ornstein-Uhlenbeck-type operator: orthonormalized Hermite
/// polynomials against the unit-mass Gaussian prod_i sqrt(d_i/pi)
/// exp(-d_i x_i^2); eigenvalues 2 k.d.
std::shared_ptr<const SpectralSystem> make_hermite_poly_gauss(
    std::vector<double> d, int modes_per_axis);

/// Oscillator basis precomposed with the rotation x -> A x (n = 2);
/// angle in radians.
std::shared_ptr<const SpectralSystem> make_hermite_rotated(
    std::vector<double> d, double angle, int modes_per_axis);

std::shared_ptr<const SpectralSystem> make_laguerre_ell(double alpha,
                                                        int modes);
std::shared_ptr<const SpectralSystem> make_laguerre_psi(double alpha,
                                                        int modes);
std::shared_ptr<const SpectralSystem> make_laguerre_lfun(double alpha,
                                                         int modes);
/// Laguerre polynomials against x^alpha e^{-x} dx; eigenvalues |k|.
std::shared_ptr<const SpectralSystem> make_laguerre_poly(double alpha,
                                                         int modes);

/// L_lambda on L2((0,pi), sin^{2 lambda} dtheta) with orthonormalized
/// Gegenbauer polynomials of cos(theta); eigenvalues (k+lambda)^2.
std::shared_ptr<const SpectralSystem> make_ultraspherical_poly(double lambda,
                                                               int modes);

/// Bessel operator on L2((0,inf), x^{2 lambda} dx) with eigenfunctions
/// x^{-lambda} psi_xi; continuous spectrum xi^2.
std::shared_ptr<const SpectralSystem> make_bessel_delta(double lambda,
                                                        double xi_max = 40.0,
                                                        double x_max = 15.0);

// --- divergence-form finite differences --------------------------------

struct FdGridSpec {
  int dim = 1;
  std::vector<double> lo, hi;
  std::vector<int> cells;  // interior nodes (dirichlet) / cells (neumann)
};

enum class FdBoundary { dirichlet, neumann };

class FdSystem;

/// -div(a grad) + V with a scalar in [1/mu, mu] and V >= 0, second-order
/// finite differences; eigen-decomposition is dense, so grids are capped
/// at a few thousand unknowns.
std::shared_ptr<const FdSystem> make_divergence_form_fd(
    ScalarField a, ScalarField V, FdGridSpec grid, double mu,
    FdBoundary bc = FdBoundary::dirichlet);

class FdSystem : public SpectralSystem {
 public:
  /// assembled operator matrix (symmetric, M-matrix)
  [[nodiscard]] virtual const std::vector<double>& matrix_dense() const = 0;
  [[nodiscard]] virtual std::size_t matrix_order() const = 0;
  [[nodiscard]] virtual const FdGridSpec& grid_spec() const = 0;
  /// cell volume of the grid quadrature
  [[nodiscard]] virtual double cell_volume() const = 0;
};

}  // namespace fracspec
