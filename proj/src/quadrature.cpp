#include "fracspec/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracspec/specfun.hpp"

namespace fracspec::quadrature {

namespace {

// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix.
// Weights come from the Christoffel function, w_i = mu0 / sum_k p_k(x_i)^2
// with p_k the orthonormal polynomials of the recurrence: eigenvector
// first components lose all accuracy once the true weight drops below
// roughly eps^2, while the polynomial sum only ever grows.  The sum is
// accumulated with power-of-two rescaling so it stays representable, and
// the weight is assembled in log form; extra_exponent lets callers fold a
// measure factor exp(g(x_i)) into the weight without materializing the
// exponentially small bare weight first.
Rule1D golub_welsch(const std::vector<double>& diag,
                    const std::vector<double>& offdiag, double log_mu0,
                    double (*extra_exponent)(double) = nullptr) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Jacobi matrix eigensolve failed");
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    rule.nodes[i] = x;
    double pm = 0.0, pc = 1.0;  // p_{-1}, p_0
    double sum = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < n - 1; ++k) {
      const double pn =
          ((x - diag[k]) * pc - (k > 0 ? offdiag[k - 1] * pm : 0.0)) /
          offdiag[k];
      pm = pc;
      pc = pn;
      sum += pc * pc;
      if (sum > 1e250) {
        constexpr double f = 0x1p-512;
        pm *= f;
        pc *= f;
        sum *= f * f;
        log_scale += 1024.0 * std::numbers::ln2;
      }
    }
    double logw = log_mu0 - (std::log(sum) + log_scale);
    if (extra_exponent) logw += extra_exponent(x);
    rule.weights[i] = std::exp(logw);
  }
  return rule;
}

}  // namespace

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre requires n >= 1");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int j = 1; j < n; ++j) off[j - 1] = j / std::sqrt(4.0 * j * j - 1.0);
  return golub_welsch(diag, off, std::log(2.0));
}

Rule1D gauss_legendre(int n, double a, double b) {
  Rule1D base = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    base.nodes[i] = mid + half * base.nodes[i];
    base.weights[i] *= half;
  }
  return base;
}

Rule1D gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite requires n >= 1");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int j = 1; j < n; ++j) off[j - 1] = std::sqrt(0.5 * j);
  return golub_welsch(diag, off, 0.5 * std::log(std::numbers::pi));
}

Rule1D gauss_hermite_unweighted(int n) {
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int j = 1; j < n; ++j) off[j - 1] = std::sqrt(0.5 * j);
  return golub_welsch(diag, off, 0.5 * std::log(std::numbers::pi),
                      [](double x) { return x * x; });
}

Rule1D gauss_laguerre(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre requires n >= 1");
  if (!(alpha > -1.0))
    throw std::invalid_argument("gauss_laguerre requires alpha > -1");
  std::vector<double> diag(n), off(n - 1);
  for (int j = 0; j < n; ++j) diag[j] = 2.0 * j + alpha + 1.0;
  for (int j = 1; j < n; ++j) off[j - 1] = std::sqrt(j * (j + alpha));
  return golub_welsch(diag, off, specfun::log_gamma(alpha + 1.0));
}

Rule1D gauss_laguerre_flat(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre_flat requires n >= 1");
  if (!(alpha > -1.0))
    throw std::invalid_argument("gauss_laguerre_flat requires alpha > -1");
  std::vector<double> diag(n), off(n - 1);
  for (int j = 0; j < n; ++j) diag[j] = 2.0 * j + alpha + 1.0;
  for (int j = 1; j < n; ++j) off[j - 1] = std::sqrt(j * (j + alpha));
  return golub_welsch(diag, off, specfun::log_gamma(alpha + 1.0),
                      [](double x) { return x; });
}

Rule1D gauss_gegenbauer(int n, double a) {
  if (n < 1) throw std::invalid_argument("gauss_gegenbauer requires n >= 1");
  if (!(a > -1.0)) throw std::invalid_argument("gauss_gegenbauer requires a > -1");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int j = 1; j < n; ++j)
    off[j - 1] = std::sqrt(j * (j + 2.0 * a) /
                           ((2.0 * j + 2.0 * a + 1.0) * (2.0 * j + 2.0 * a - 1.0)));
  const double log_mu0 = 0.5 * std::log(std::numbers::pi) +
                         specfun::log_gamma(a + 1.0) -
                         specfun::log_gamma(a + 1.5);
  return golub_welsch(diag, off, log_mu0);
}

Rule1D composite_legendre(double a, double b, int panels, int pts) {
  if (panels < 1 || pts < 1)
    throw std::invalid_argument("composite_legendre requires panels, pts >= 1");
  Rule1D base = gauss_legendre(pts);
  Rule1D rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * pts);
  rule.weights.reserve(static_cast<std::size_t>(panels) * pts);
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * w;
    for (int i = 0; i < pts; ++i) {
      rule.nodes.push_back(lo + 0.5 * w * (1.0 + base.nodes[i]));
      rule.weights.push_back(0.5 * w * base.weights[i]);
    }
  }
  return rule;
}

Rule1D composite_graded_left(double b, int graded, double ratio,
                             int uniform_panels, int pts) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("grading ratio must lie in (0,1)");
  uniform_panels = std::max(2, uniform_panels);
  // geometrically graded panels on [0, b/uniform_panels], uniform beyond
  const double bu = b / uniform_panels;
  std::vector<double> edges;
  edges.push_back(0.0);
  double e = bu * std::pow(ratio, graded);
  for (int g = graded; g >= 1; --g) {
    edges.push_back(e);
    e /= ratio;
  }
  Rule1D base = gauss_legendre(pts);
  Rule1D rule;
  auto add_panel = [&](double lo, double hi) {
    const double w = hi - lo;
    for (int i = 0; i < pts; ++i) {
      rule.nodes.push_back(lo + 0.5 * w * (1.0 + base.nodes[i]));
      rule.weights.push_back(0.5 * w * base.weights[i]);
    }
  };
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    add_panel(edges[i], edges[i + 1]);
  add_panel(edges.back(), bu);
  const double w = (b - bu) / std::max(1, uniform_panels - 1);
  for (int p = 0; p + 1 < uniform_panels; ++p)
    add_panel(bu + p * w, bu + (p + 1) * w);
  return rule;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace fracspec::quadrature
