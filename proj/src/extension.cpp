#include "fracspec/extension.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracspec/quadrature.hpp"
#include "fracspec/specfun.hpp"

namespace fracspec {
namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("fractional order must lie in (0, 1)");
}

// 2^{1-sigma} / Gamma(sigma)
double k_prefactor(double sigma) {
  return std::exp((1.0 - sigma) * std::numbers::ln2 -
                  specfun::log_gamma(sigma));
}

// antiderivative of |y|^{1-2s}: odd, increasing
double weight_primitive(double y, double sigma) {
  const double p = 2.0 - 2.0 * sigma;
  return std::copysign(std::pow(std::abs(y), p) / p, y);
}

// antiderivative of |y|^{2s-1} (reciprocal weight): odd, increasing
double resistivity_primitive(double y, double sigma) {
  const double p = 2.0 * sigma;
  return std::copysign(std::pow(std::abs(y), p) / p, y);
}

// least-squares y->0 limit of readings with error exponents
// {2-2s, 2, 4-2s, 4}
double fit_limit(const std::vector<double>& ys, const std::vector<double>& rs,
                 double sigma) {
  const auto n = static_cast<Eigen::Index>(ys.size());
  const double exps[5] = {0.0, 2.0 - 2.0 * sigma, 2.0, 4.0 - 2.0 * sigma, 4.0};
  const Eigen::Index cols = std::min<Eigen::Index>(5, n);
  Eigen::MatrixXd a(n, cols);
  Eigen::VectorXd b(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    b(r) = rs[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c)
      a(r, c) = std::pow(ys[static_cast<std::size_t>(r)], exps[c]);
  }
  Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
  return x(0);
}

}  // namespace

double extension_multiplier(double y, double lambda, double sigma) {
  check_sigma(sigma);
  if (y < 0.0)
    throw std::invalid_argument("extension variable must be nonnegative");
  if (lambda < 0.0)
    throw std::invalid_argument("eigenvalue must be nonnegative");
  if (y == 0.0 || lambda == 0.0) return 1.0;
  const double z = y * std::sqrt(lambda);
  if (z > 600.0) return 0.0;
  return k_prefactor(sigma) * std::pow(z, sigma) * specfun::bessel_k(sigma, z);
}

double extension_multiplier_quadrature(double y, double lambda, double sigma) {
  check_sigma(sigma);
  if (!(y > 0.0))
    throw std::invalid_argument("extension variable must be positive");
  if (lambda < 0.0)
    throw std::invalid_argument("eigenvalue must be nonnegative");
  if (lambda == 0.0) return 1.0;
  // t = e^s; integrand e^{-lambda e^s - (y^2/4) e^{-s}} e^{-s sigma}
  const double q = 0.25 * y * y;
  const double s_lo = std::log(q / 40.0) - 2.0;
  const double s_hi = std::log(40.0 / lambda) + 2.0;
  if (s_lo >= s_hi) return 0.0;  // y^2 lambda >> 1: value below underflow
  const int panels = std::max(40, static_cast<int>(std::ceil(s_hi - s_lo)));
  auto rule = quadrature::composite_legendre(s_lo, s_hi, panels, 12);
  const double integral = rule.integrate([&](double s) {
    return std::exp(-lambda * std::exp(s) - q * std::exp(-s) - sigma * s);
  });
  const double pref = std::exp(2.0 * sigma * std::log(y) -
                               sigma * std::log(4.0) -
                               specfun::log_gamma(sigma));
  return pref * integral;
}

double extension_multiplier_dy(double y, double lambda, double sigma) {
  check_sigma(sigma);
  if (lambda < 0.0)
    throw std::invalid_argument("eigenvalue must be nonnegative");
  if (lambda == 0.0) return 0.0;
  if (!(y > 0.0))
    throw std::invalid_argument("extension variable must be positive");
  const double rt = std::sqrt(lambda);
  const double z = y * rt;
  if (z > 600.0) return 0.0;
  return -rt * k_prefactor(sigma) * std::pow(z, sigma) *
         specfun::bessel_k(1.0 - sigma, z);
}

double trace_constant(double sigma) {
  check_sigma(sigma);
  return std::exp((2.0 * sigma - 1.0) * std::numbers::ln2 +
                  specfun::log_gamma(sigma) - specfun::log_gamma(1.0 - sigma));
}

Coefficients extend_coefficients(const Coefficients& trace, double y,
                                 double sigma) {
  check_sigma(sigma);
  if (!trace.system) throw std::invalid_argument("coefficients lack a system");
  Coefficients out = trace;
  out.input_norm2 = -1.0;
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] *= extension_multiplier(std::abs(y), trace.system->eigenvalue(m), sigma);
  return out;
}

double extension_value(const Coefficients& trace, double sigma,
                       std::span<const double> x, double y) {
  const Coefficients ext = extend_coefficients(trace, y, sigma);
  return trace.system->synthesize_at(ext, x);
}

double reflected_value(const Coefficients& trace, double sigma,
                       std::span<const double> x, double y) {
  return extension_value(trace, sigma, x, std::abs(y));
}

GridFunction reflect_even(const Coefficients& trace, double sigma,
                          const GridFunction& x_grid,
                          const std::vector<double>& y_levels) {
  check_sigma(sigma);
  if (!trace.system) throw std::invalid_argument("coefficients lack a system");
  if (y_levels.empty()) throw std::invalid_argument("no extension levels");
  if (!std::is_sorted(y_levels.begin(), y_levels.end()))
    throw std::invalid_argument("extension levels must be ascending");
  const auto& sys = *trace.system;
  const std::size_t nx = x_grid.size();
  const std::size_t ny = y_levels.size();
  GridFunction out;
  out.dim = x_grid.dim + 1;
  out.coords.reserve(nx * ny * static_cast<std::size_t>(out.dim));
  out.values.reserve(nx * ny);
  out.weights.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = y_levels[j];
    // midpoint y-cell around the level, weight = exact integral of the
    // band measure over it
    const double lo = (j == 0) ? y - 0.5 * (y_levels[1] - y_levels[0])
                               : 0.5 * (y_levels[j - 1] + y);
    const double hi = (j + 1 == ny) ? y + 0.5 * (y - y_levels[ny - 2])
                                    : 0.5 * (y + y_levels[j + 1]);
    const double wy =
        weight_primitive(hi, sigma) - weight_primitive(lo, sigma);
    const Coefficients ext = extend_coefficients(trace, std::abs(y), sigma);
    const std::vector<double> vals = sys.synthesize_values(ext, x_grid);
    for (std::size_t p = 0; p < nx; ++p) {
      const auto xp = x_grid.point(p);
      out.coords.insert(out.coords.end(), xp.begin(), xp.end());
      out.coords.push_back(y);
      out.values.push_back(vals[p]);
      out.weights.push_back(x_grid.weights[p] * wy);
    }
  }
  return out;
}

TraceLadder trace_ladder(double lambda, double sigma, int j_lo, int j_hi) {
  check_sigma(sigma);
  if (lambda < 0.0)
    throw std::invalid_argument("eigenvalue must be nonnegative");
  if (j_hi < j_lo) throw std::invalid_argument("empty ladder range");
  TraceLadder out;
  const double c = trace_constant(sigma);
  for (int j = j_lo; j <= j_hi; ++j) {
    const double y = std::ldexp(1.0, -j);
    const double raw =
        (lambda == 0.0)
            ? 0.0
            : -c * std::pow(y, 1.0 - 2.0 * sigma) *
                  extension_multiplier_dy(y, lambda, sigma);
    out.y.push_back(y);
    out.raw.push_back(raw);
  }
  out.extrapolated =
      (lambda == 0.0) ? 0.0 : fit_limit(out.y, out.raw, sigma);
  return out;
}

Coefficients trace_derivative(const Coefficients& trace, double sigma,
                              int j_lo, int j_hi, double spread_tol) {
  check_sigma(sigma);
  if (!trace.system) throw std::invalid_argument("coefficients lack a system");
  const int span = j_hi - j_lo;
  if (span < 4)
    throw std::invalid_argument("ladder needs at least five levels");
  Coefficients out = trace;
  out.input_norm2 = -1.0;
  const auto& sys = *trace.system;
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    const double lam = sys.eigenvalue(m);
    if (lam == 0.0) {
      out.values[m] = 0.0;
      continue;
    }
    // keep y sqrt(lambda) small so the correction exponents apply
    int lo = j_lo;
    const double rt = std::sqrt(lam);
    if (rt > 1.0)
      lo = std::max(lo, static_cast<int>(std::ceil(std::log2(rt))) + 2);
    const TraceLadder full = trace_ladder(lam, sigma, lo, lo + span);
    const TraceLadder tail = trace_ladder(lam, sigma, lo + 1, lo + span);
    const double spread = std::abs(full.extrapolated - tail.extrapolated) /
                          std::max(std::abs(full.extrapolated), 1e-300);
    if (spread > spread_tol)
      throw std::runtime_error("extension trace ladder did not settle");
    out.values[m] *= full.extrapolated;
  }
  return out;
}

WeakResidual weak_residual(const Coefficients& trace, double sigma,
                           const SeparableTest& test, double delta,
                           int y_panels, double v_const) {
  check_sigma(sigma);
  if (!trace.system) throw std::invalid_argument("coefficients lack a system");
  if (!(delta > 0.0) || !(delta < test.y_extent))
    throw std::invalid_argument("strip width must lie in (0, y_extent)");
  if (y_panels < 1) throw std::invalid_argument("need at least one y panel");
  const auto& sys = *trace.system;
  const Coefficients chat = sys.analyze(test.chi_x);
  const auto rule = quadrature::composite_legendre(
      0.0, std::log(test.y_extent / delta), y_panels, 8);
  const double csig = trace_constant(sigma);
  const double a_exp = 1.0 - 2.0 * sigma;
  WeakResidual out;
  for (std::size_t m = 0; m < trace.values.size(); ++m) {
    const double cm =
        trace.values[m] * sys.mode_weight(m) * chat.values[m];
    if (cm == 0.0) continue;
    const double lam = sys.eigenvalue(m);
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double y = delta * std::exp(rule.nodes[q]);
      const double w = rule.weights[q] * y;  // dy = y dtau on the log grid
      const double mv = extension_multiplier(y, lam, sigma);
      const double md =
          (lam == 0.0) ? 0.0 : extension_multiplier_dy(y, lam, sigma);
      integral += w * std::pow(y, a_exp) *
                  ((lam + v_const) * mv * test.chi_y(y) +
                   md * test.chi_y_prime(y));
    }
    out.value += 2.0 * cm * integral;
    if (lam > 0.0)
      out.strip_flux -= 2.0 * cm * std::pow(delta, a_exp) *
                        extension_multiplier_dy(delta, lam, sigma) *
                        test.chi_y(delta);
    out.boundary_term +=
        (2.0 / csig) * cm * std::pow(lam, sigma) * test.chi_y(0.0);
  }
  return out;
}

GridFunction DegenerateSolution::as_grid_function(double sigma) const {
  check_sigma(sigma);
  GridFunction out;
  out.dim = 2;
  const double hx = (grid.x_hi - grid.x_lo) / static_cast<double>(grid.nx);
  const double hy = 2.0 * grid.y_max / static_cast<double>(grid.ny);
  out.coords.reserve(values.size() * 2);
  out.values = values;
  out.weights.reserve(values.size());
  for (double x : x_nodes)
    for (double y : y_nodes) {
      out.coords.push_back(x);
      out.coords.push_back(y);
      out.weights.push_back(hx * (weight_primitive(y + 0.5 * hy, sigma) -
                                  weight_primitive(y - 0.5 * hy, sigma)));
    }
  return out;
}

DegenerateSolution solve_degenerate_fd(
    const DegenerateGrid& grid, double sigma,
    const std::function<double(double, double)>& boundary,
    const std::function<double(double)>& V,
    const std::function<double(double)>& a) {
  check_sigma(sigma);
  if (!boundary) throw std::invalid_argument("boundary data required");
  if (grid.nx < 2 || grid.ny < 2)
    throw std::invalid_argument("grid needs at least two cells per direction");
  if (grid.ny % 2 != 0)
    throw std::invalid_argument("band cell count must be even");
  if (!(grid.x_hi > grid.x_lo) || !(grid.y_max > 0.0))
    throw std::invalid_argument("degenerate box is empty");

  const std::size_t nx = grid.nx, ny = grid.ny;
  const double hx = (grid.x_hi - grid.x_lo) / static_cast<double>(nx);
  const double hy = 2.0 * grid.y_max / static_cast<double>(ny);

  DegenerateSolution sol;
  sol.grid = grid;
  sol.x_nodes.resize(nx);
  sol.y_nodes.resize(ny);
  for (std::size_t i = 0; i < nx; ++i)
    sol.x_nodes[i] = grid.x_lo + (static_cast<double>(i) + 0.5) * hx;
  for (std::size_t j = 0; j < ny; ++j)
    sol.y_nodes[j] = -grid.y_max + (static_cast<double>(j) + 0.5) * hy;

  auto coeff_a = [&](double x) {
    if (!a) return 1.0;
    const double v = a(x);
    if (!(v > 0.0))
      throw std::invalid_argument("diffusion coefficient must be positive");
    return v;
  };

  // exact band-measure integral over each y cell
  std::vector<double> wy(ny);
  for (std::size_t j = 0; j < ny; ++j)
    wy[j] = weight_primitive(sol.y_nodes[j] + 0.5 * hy, sigma) -
            weight_primitive(sol.y_nodes[j] - 0.5 * hy, sigma);

  // exact resistances between vertically adjacent centers (and halves
  // toward the top/bottom boundary); conductance = hx / resistance
  std::vector<double> res(ny + 1);
  res[0] = resistivity_primitive(sol.y_nodes[0], sigma) -
           resistivity_primitive(-grid.y_max, sigma);
  for (std::size_t j = 1; j < ny; ++j)
    res[j] = resistivity_primitive(sol.y_nodes[j], sigma) -
             resistivity_primitive(sol.y_nodes[j - 1], sigma);
  res[ny] = resistivity_primitive(grid.y_max, sigma) -
            resistivity_primitive(sol.y_nodes[ny - 1], sigma);

  const auto order = static_cast<Eigen::Index>(nx * ny);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(order) * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(order);
  auto idx = [&](std::size_t i, std::size_t j) {
    return static_cast<Eigen::Index>(i * ny + j);
  };

  for (std::size_t i = 0; i < nx; ++i) {
    const double x = sol.x_nodes[i];
    const double a_left = coeff_a(x - 0.5 * hx);
    const double a_right = coeff_a(x + 0.5 * hx);
    const double v_cell = V ? V(x) : 0.0;
    if (v_cell < -1e-12)
      throw std::invalid_argument("potential must be nonnegative");
    for (std::size_t j = 0; j < ny; ++j) {
      const Eigen::Index p = idx(i, j);
      double diag = std::max(v_cell, 0.0) * wy[j] * hx;
      // x fluxes
      if (i > 0) {
        const double g = a_left * wy[j] / hx;
        diag += g;
        trips.emplace_back(p, idx(i - 1, j), -g);
      } else {
        const double g = a_left * wy[j] / (0.5 * hx);
        diag += g;
        rhs(p) += g * boundary(grid.x_lo, sol.y_nodes[j]);
      }
      if (i + 1 < nx) {
        const double g = a_right * wy[j] / hx;
        diag += g;
        trips.emplace_back(p, idx(i + 1, j), -g);
      } else {
        const double g = a_right * wy[j] / (0.5 * hx);
        diag += g;
        rhs(p) += g * boundary(grid.x_hi, sol.y_nodes[j]);
      }
      // y fluxes
      {
        const double g = hx / res[j];
        diag += g;
        if (j > 0)
          trips.emplace_back(p, idx(i, j - 1), -g);
        else
          rhs(p) += g * boundary(x, -grid.y_max);
      }
      {
        const double g = hx / res[j + 1];
        diag += g;
        if (j + 1 < ny)
          trips.emplace_back(p, idx(i, j + 1), -g);
        else
          rhs(p) += g * boundary(x, grid.y_max);
      }
      trips.emplace_back(p, p, diag);
    }
  }

  Eigen::SparseMatrix<double> mat(order, order);
  mat.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(mat);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("degenerate system factorization failed");
  Eigen::VectorXd v = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("degenerate system solve failed");
  const double bnorm = rhs.norm();
  sol.residual = (mat * v - rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
  if (sol.residual > 1e-10) {
    // one step of iterative refinement, then insist
    v += solver.solve(rhs - mat * v);
    sol.residual = (mat * v - rhs).norm() / (bnorm > 0.0 ? bnorm : 1.0);
    if (sol.residual > 1e-10)
      throw std::runtime_error("degenerate solve residual above tolerance");
  }
  sol.values.assign(v.data(), v.data() + order);
  return sol;
}

}  // namespace fracspec
