#pragma once

#include <span>
#include <string>
#include <vector>

// Self-contained special functions: Gamma, Bessel J and K, and the
// orthogonal families (Hermite, Laguerre, ultraspherical) used as
// eigenfunction raw material.  All polynomial families are evaluated by
// three-term recurrences on the normalized functions; degrees above
// kMaxDegree are rejected.

namespace fracspec::specfun {

inline constexpr int kMaxDegree = 500;

/// Gamma function on the real line.  Throws std::domain_error at the
/// poles x = 0, -1, -2, ...
double gamma_fn(double x);

/// log Gamma for x > 0.
double log_gamma(double x);

/// Bessel J_nu(x) for nu >= -1/2, x > 0.  Series for small x, an
/// integral representation in the intermediate band and large-argument
/// asymptotics beyond it.
double bessel_j(double nu, double x);

/// Modified Bessel K_s(z) for s in (0,1], z > 0, via the representation
/// K_s(z) = int_0^inf exp(-z cosh t) cosh(s t) dt truncated at t = 40
/// and integrated with composite Gauss panels.
double bessel_k(double s, double z);

// --- Hermite ---------------------------------------------------------

/// L2(R,dx)-orthonormal Hermite function h_k, ground state
/// h_0(x) = pi^{-1/4} exp(-x^2/2).
double hermite_function(int k, double x);

/// h_0..h_kmax at one point (recurrence shared across degrees).
void hermite_function_all(int kmax, double x, std::span<double> out);

/// Scaled Hermite function d^{1/4} h_k(sqrt(d) x); L2(R,dx)-orthonormal
/// for every d > 0.
double hermite_function_scaled(int k, double d, double x);

/// Hermite polynomial orthonormal w.r.t. the unit Gaussian measure
/// pi^{-1/2} exp(-u^2) du.
double hermite_poly_normalized(int k, double u);
void hermite_poly_normalized_all(int kmax, double u, std::span<double> out);

/// Physicists' Hermite polynomial H_k (raw normalization).
double hermite_poly_raw(int k, double u);

// --- Laguerre --------------------------------------------------------

/// Laguerre polynomial orthonormal w.r.t. u^alpha e^{-u} du on (0,inf).
double laguerre_normalized(int k, double alpha, double u);
void laguerre_normalized_all(int kmax, double alpha, double u,
                             std::span<double> out);

/// Raw Laguerre polynomial L_k^alpha.
double laguerre_raw(int k, double alpha, double u);

/// phi_k^alpha(x) = x^alpha (2x)^{1/2} e^{-x^2/2} Ltil_k^alpha(x^2),
/// orthonormal in L2((0,inf),dx).
double laguerre_phi(int k, double alpha, double x);

/// ell_k^alpha(x) = e^{-x/2} Ltil_k^alpha(x), orthonormal in
/// L2((0,inf), x^alpha dx).
double laguerre_ell(int k, double alpha, double x);

/// psi_k^alpha(x) = sqrt(2) ell_k^alpha(x^2), orthonormal in
/// L2((0,inf), x^{2 alpha + 1} dx).
double laguerre_psi(int k, double alpha, double x);

/// Lfun_k^alpha(x) = x^{alpha/2} ell_k^alpha(x), orthonormal in
/// L2((0,inf), dx).
double laguerre_lfun(int k, double alpha, double x);

// --- Ultraspherical --------------------------------------------------

/// Raw Gegenbauer polynomial C_k^lambda(t).
double gegenbauer_raw(int k, double lambda, double t);

/// Gegenbauer polynomial orthonormal w.r.t. (1-t^2)^{lambda-1/2} dt on
/// (-1,1); equivalently int_0^pi Ptil_j Ptil_k sin^{2 lambda} = delta_jk.
double gegenbauer_orthonormal(int k, double lambda, double t);
void gegenbauer_orthonormal_all(int kmax, double lambda, double t,
                                std::span<double> out);

/// p_k^lambda(theta) = sin^lambda(theta) Ptil_k^lambda(cos theta),
/// orthonormal in L2((0,pi), dtheta).
double ultraspherical_p(int k, double lambda, double theta);

// --- Generic dispatch -------------------------------------------------

enum class Family {
  hermite,
  hermite_function,
  laguerre,
  laguerre_phi,
  laguerre_ell,
  laguerre_psi,
  laguerre_lfun,
  gegenbauer,
  ultraspherical_p,
};

enum class Normalization { raw, orthonormal };

/// One-point evaluation with a family tag; param is alpha (Laguerre),
/// lambda (ultraspherical) or the scale d (Hermite function).
double eval_basis(Family family, Normalization norm, int k, double param,
                  double x);

Family family_from_name(const std::string& name);

}  // namespace fracspec::specfun
