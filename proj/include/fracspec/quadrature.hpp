#pragma once

#include <functional>
#include <vector>

// Gaussian quadrature rules (Golub-Welsch on the Jacobi matrix of the
// weight) and composite Gauss-Legendre helpers.

namespace fracspec::quadrature {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// n-point Gauss-Legendre on [-1,1].
Rule1D gauss_legendre(int n);

/// Gauss-Legendre mapped to [a,b].
Rule1D gauss_legendre(int n, double a, double b);

/// n-point Gauss-Hermite, weight exp(-x^2) on R.
Rule1D gauss_hermite(int n);

/// Gauss-Hermite with the weight folded out: integrates
/// int f(x) exp(-x^2) dx as sum w_i f(x_i) -> this rule returns
/// w_i* = w_i exp(x_i^2) so that sum w_i* g(x_i) ~ int g(x) dx for g
/// with Gaussian-type decay.  Weights are computed in log space.
Rule1D gauss_hermite_unweighted(int n);

/// n-point generalized Gauss-Laguerre, weight x^alpha exp(-x) on (0,inf).
Rule1D gauss_laguerre(int n, double alpha);

/// Gauss-Laguerre with the exponential factor folded out: returns
/// w_i* = w_i exp(x_i) so that sum w_i* g(x_i) ~ int_0^inf g(x) x^alpha dx
/// for g with e^{-x}-type decay.  Weights are computed in log space.
Rule1D gauss_laguerre_flat(int n, double alpha);

/// Symmetric Gauss-Jacobi (Gegenbauer) rule, weight (1-t^2)^a on (-1,1).
Rule1D gauss_gegenbauer(int n, double a);

/// Composite Gauss-Legendre: `panels` panels of `pts` points on [a,b].
Rule1D composite_legendre(double a, double b, int panels, int pts);

/// Composite rule on [0,b] with panel widths shrinking geometrically
/// toward 0 (factor `ratio` per step, `graded` graded panels) and
/// uniform panels of width `b/uniform_panels`-ish beyond; resolves
/// integrable endpoint behavior x^p, p > -1.
Rule1D composite_graded_left(double b, int graded, double ratio, int uniform_panels,
                             int pts);

/// Adaptive Simpson; used as an independent cross-check oracle.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 48);

}  // namespace fracspec::quadrature
