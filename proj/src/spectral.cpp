#include "fracspec/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "fracspec/parallel.hpp"
#include "fracspec/specfun.hpp"

namespace fracspec {

namespace {
constexpr double kPi = std::numbers::pi;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}  // namespace

// --- Coefficients ------------------------------------------------------

double Coefficients::norm2() const {
  double s = 0.0;
  for (std::size_t m = 0; m < values.size(); ++m)
    s += system->mode_weight(m) * values[m] * values[m];
  return s;
}

double Coefficients::parseval_defect() const {
  if (input_norm2 < 0.0) return 0.0;
  return std::abs(input_norm2 - norm2()) / std::max(input_norm2, 1e-300);
}

// --- SpectralSystem base ------------------------------------------------

double SpectralSystem::eval_mode(std::size_t m,
                                 std::span<const double> x) const {
  std::vector<double> buf(mode_count());
  eval_modes_at(x, buf);
  return buf[m];
}

Coefficients SpectralSystem::analyze(const ScalarField& f) const {
  const GridFunction& q = quadrature_grid();
  GridFunction samples = q;
  parallel_for(samples.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      samples.values[p] = f(samples.point(p));
  });
  return analyze_samples(samples);
}

Coefficients SpectralSystem::analyze(const GridFunction& samples) const {
  samples.check_consistent();
  if (samples.dim != dim())
    throw std::invalid_argument("sample dimension disagrees with system");
  return analyze_samples(samples);
}

const std::vector<double>* SpectralSystem::quadrature_mode_table() const {
  std::call_once(mode_table_once_, [this] {
    const GridFunction& q = quadrature_grid();
    const std::size_t n = q.size(), m = mode_count();
    if (n * m > (std::size_t{1} << 23)) return;  // cap the cache at 64 MB
    mode_table_.resize(n * m);
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t p = lo; p < hi; ++p)
        eval_modes_at(q.point(p),
                      std::span<double>(mode_table_.data() + p * m, m));
    });
    mode_table_built_ = true;
  });
  return mode_table_built_ ? &mode_table_ : nullptr;
}

bool SpectralSystem::is_quadrature_grid(const GridFunction& g) const {
  const GridFunction& q = quadrature_grid();
  if (&g == &q) return true;
  if (g.dim != q.dim || g.size() != q.size()) return false;
  return std::equal(g.coords.begin(), g.coords.end(), q.coords.begin());
}

void SpectralSystem::eval_modes_on(const GridFunction& points,
                                   std::size_t count,
                                   std::vector<double>& out) const {
  const std::size_t modes = mode_count();
  if (count > modes) throw std::invalid_argument("mode count out of range");
  out.resize(points.size() * count);
  if (is_quadrature_grid(points)) {
    if (const auto* table = quadrature_mode_table()) {
      for (std::size_t p = 0; p < points.size(); ++p)
        std::copy_n(table->data() + p * modes, count,
                    out.data() + p * count);
      return;
    }
  }
  parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> buf(modes);
    for (std::size_t p = lo; p < hi; ++p) {
      eval_modes_at(points.point(p), buf);
      std::copy_n(buf.data(), count, out.data() + p * count);
    }
  });
}

Coefficients SpectralSystem::analyze_samples(
    const GridFunction& samples) const {
  const std::size_t modes = mode_count();
  Coefficients c;
  c.system = shared_from_this();
  c.values.assign(modes, 0.0);
  if (is_quadrature_grid(samples)) {
    if (const auto* table = quadrature_mode_table()) {
      Eigen::Map<const RowMat> phi(table->data(),
                                        static_cast<Eigen::Index>(samples.size()),
                                        static_cast<Eigen::Index>(modes));
      Eigen::VectorXd wf(static_cast<Eigen::Index>(samples.size()));
      double norm2 = 0.0;
      for (std::size_t p = 0; p < samples.size(); ++p) {
        wf(static_cast<Eigen::Index>(p)) =
            samples.weights[p] * samples.values[p];
        norm2 += samples.weights[p] * samples.values[p] * samples.values[p];
      }
      Eigen::Map<Eigen::VectorXd> cv(c.values.data(),
                                     static_cast<Eigen::Index>(modes));
      cv.noalias() = phi.transpose() * wf;
      c.input_norm2 = norm2;
      return c;
    }
  }
  // fixed-size point blocks reduced in index order, so the result does
  // not depend on the worker count
  constexpr std::size_t kBlock = 512;
  const std::size_t blocks = (samples.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> partial(blocks);
  std::vector<double> partial_norm2(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t blo, std::size_t bhi) {
    std::vector<double> buf(modes);
    for (std::size_t b = blo; b < bhi; ++b) {
      auto& acc = partial[b];
      acc.assign(modes, 0.0);
      const std::size_t lo = b * kBlock;
      const std::size_t hi = std::min(samples.size(), lo + kBlock);
      for (std::size_t p = lo; p < hi; ++p) {
        const double wf = samples.weights[p] * samples.values[p];
        partial_norm2[b] +=
            samples.weights[p] * samples.values[p] * samples.values[p];
        if (wf == 0.0) continue;
        eval_modes_at(samples.point(p), buf);
        for (std::size_t m = 0; m < modes; ++m) acc[m] += wf * buf[m];
      }
    }
  });
  double norm2 = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    norm2 += partial_norm2[b];
    for (std::size_t m = 0; m < modes; ++m) c.values[m] += partial[b][m];
  }
  c.input_norm2 = norm2;
  return c;
}

std::vector<double> SpectralSystem::synthesize_values(
    const Coefficients& c, const GridFunction& points) const {
  if (c.system.get() != this)
    throw std::invalid_argument("coefficients belong to another system");
  if (points.dim != dim())
    throw std::invalid_argument("point dimension disagrees with system");
  const std::size_t modes = mode_count();
  std::vector<double> out(points.size(), 0.0);
  if (is_quadrature_grid(points)) {
    if (const auto* table = quadrature_mode_table()) {
      Eigen::Map<const RowMat> phi(table->data(),
                                        static_cast<Eigen::Index>(points.size()),
                                        static_cast<Eigen::Index>(modes));
      Eigen::VectorXd cm(static_cast<Eigen::Index>(modes));
      for (std::size_t m = 0; m < modes; ++m)
        cm(static_cast<Eigen::Index>(m)) = mode_weight(m) * c.values[m];
      Eigen::Map<Eigen::VectorXd> ov(out.data(),
                                     static_cast<Eigen::Index>(out.size()));
      ov.noalias() = phi * cm;
      return out;
    }
  }
  parallel_for(points.size(), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> buf(modes);
    for (std::size_t p = lo; p < hi; ++p) {
      eval_modes_at(points.point(p), buf);
      double s = 0.0;
      for (std::size_t m = 0; m < modes; ++m)
        s += mode_weight(m) * c.values[m] * buf[m];
      out[p] = s;
    }
  });
  return out;
}

double SpectralSystem::synthesize_at(const Coefficients& c,
                                     std::span<const double> x) const {
  if (c.system.get() != this)
    throw std::invalid_argument("coefficients belong to another system");
  const std::size_t modes = mode_count();
  std::vector<double> buf(modes);
  eval_modes_at(x, buf);
  double s = 0.0;
  for (std::size_t m = 0; m < modes; ++m)
    s += mode_weight(m) * c.values[m] * buf[m];
  return s;
}

Coefficients SpectralSystem::zero_coefficients() const {
  Coefficients c;
  c.system = shared_from_this();
  c.values.assign(mode_count(), 0.0);
  return c;
}

// --- axis bases ---------------------------------------------------------

namespace {

// One coordinate direction of a tensor-product system.
class AxisBasis {
 public:
  virtual ~AxisBasis() = default;
  [[nodiscard]] virtual std::size_t count() const = 0;
  [[nodiscard]] virtual double eigenvalue(std::size_t j) const = 0;
  [[nodiscard]] virtual double mode_weight(std::size_t) const { return 1.0; }
  virtual void eval_all(double x, std::span<double> out) const = 0;
  [[nodiscard]] virtual const quadrature::Rule1D& rule() const = 0;
  [[nodiscard]] virtual double measure_density(double x) const = 0;
  [[nodiscard]] virtual std::pair<double, double> window() const = 0;
  [[nodiscard]] virtual bool positivity() const = 0;
  [[nodiscard]] virtual double growth_exponent() const = 0;
};

class DirichletSineAxis final : public AxisBasis {
 public:
  DirichletSineAxis(double a, double b, int modes)
      : a_(a), len_(b - a), k_(modes) {
    if (!(len_ > 0.0)) throw std::invalid_argument("interval must have b > a");
    if (modes < 1) throw std::invalid_argument("modes must be >= 1");
    const int panels = std::max(32, static_cast<int>(std::ceil(1.5 * modes)));
    rule_ = quadrature::composite_legendre(a, b, panels, 12);
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    const double kappa = (j + 1) * kPi / len_;
    return kappa * kappa;
  }
  void eval_all(double x, std::span<double> out) const override {
    if (x <= a_ || x >= a_ + len_) {
      std::fill(out.begin(), out.begin() + k_, 0.0);
      return;
    }
    const double s = std::sqrt(2.0 / len_);
    const double t = kPi * (x - a_) / len_;
    for (int j = 0; j < k_; ++j) out[j] = s * std::sin((j + 1) * t);
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override { return {a_, a_ + len_}; }
  bool positivity() const override { return true; }
  double growth_exponent() const override { return 2.0; }

 private:
  double a_, len_;
  int k_;
  quadrature::Rule1D rule_;
};

class HermiteFunctionAxis final : public AxisBasis {
 public:
  HermiteFunctionAxis(double d, int modes, bool shifted)
      : d_(d), k_(modes), shifted_(shifted) {
    if (!(d > 0.0)) throw std::invalid_argument("oscillator scale d must be > 0");
    const double span_u = std::sqrt(2.0 * modes + 1.0) + 8.0;
    const double freq = 2.0 * std::sqrt(2.0 * modes + 1.0);
    const double width_u = std::min(0.8, 6.0 / freq);
    const int panels = static_cast<int>(std::ceil(2.0 * span_u / width_u));
    x_max_ = span_u / std::sqrt(d);
    rule_ = quadrature::composite_legendre(-x_max_, x_max_, panels, 12);
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return 2.0 * static_cast<double>(j) * d_ + (shifted_ ? 0.0 : d_);
  }
  void eval_all(double x, std::span<double> out) const override {
    specfun::hermite_function_all(k_ - 1, std::sqrt(d_) * x, out);
    const double s = std::pow(d_, 0.25);
    for (int j = 0; j < k_; ++j) out[j] *= s;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override {
    return {-x_max_, x_max_};
  }
  bool positivity() const override { return true; }
  double growth_exponent() const override { return 1.0; }

 private:
  double d_, x_max_;
  int k_;
  bool shifted_;
  quadrature::Rule1D rule_;
};

class HermitePolyAxis final : public AxisBasis {
 public:
  HermitePolyAxis(double d, int modes) : d_(d), k_(modes) {
    if (!(d > 0.0)) throw std::invalid_argument("scale d must be > 0");
    const int n = std::max(200, modes + 40);
    quadrature::Rule1D gh = quadrature::gauss_hermite(n);
    rule_.nodes.resize(gh.size());
    rule_.weights.resize(gh.size());
    const double rs = 1.0 / std::sqrt(kPi);
    for (std::size_t i = 0; i < gh.size(); ++i) {
      rule_.nodes[i] = gh.nodes[i] / std::sqrt(d);
      rule_.weights[i] = gh.weights[i] * rs;
    }
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override { return 2.0 * j * d_; }
  void eval_all(double x, std::span<double> out) const override {
    specfun::hermite_poly_normalized_all(k_ - 1, std::sqrt(d_) * x, out);
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double x) const override {
    return std::sqrt(d_ / kPi) * std::exp(-d_ * x * x);
  }
  std::pair<double, double> window() const override {
    const double w = 4.0 / std::sqrt(d_);
    return {-w, w};
  }
  bool positivity() const override { return true; }
  double growth_exponent() const override { return 1.0; }

 private:
  double d_;
  int k_;
  quadrature::Rule1D rule_;
};

class LaguerrePhiAxis final : public AxisBasis {
 public:
  LaguerrePhiAxis(double alpha, int modes) : alpha_(alpha), k_(modes) {
    if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be > -1");
    const int n = std::max(96, modes + 16);
    quadrature::Rule1D gl = quadrature::gauss_laguerre_flat(n, alpha);
    rule_.nodes.resize(gl.size());
    rule_.weights.resize(gl.size());
    for (std::size_t i = 0; i < gl.size(); ++i) {
      const double u = gl.nodes[i];
      rule_.nodes[i] = std::sqrt(u);
      rule_.weights[i] =
          gl.weights[i] * std::pow(u, -alpha) / (2.0 * std::sqrt(u));
    }
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return static_cast<double>(j) + 0.5 * (alpha_ + 1.0);
  }
  void eval_all(double x, std::span<double> out) const override {
    if (!(x > 0.0)) {
      std::fill(out.begin(), out.begin() + k_, 0.0);
      return;
    }
    specfun::laguerre_normalized_all(k_ - 1, alpha_, x * x, out);
    const double pre =
        std::pow(x, alpha_) * std::sqrt(2.0 * x) * std::exp(-0.5 * x * x);
    for (int j = 0; j < k_; ++j) out[j] *= pre;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override {
    return {0.0, std::sqrt(2.0 * k_) + 7.0};
  }
  bool positivity() const override { return alpha_ >= 0.5; }
  double growth_exponent() const override { return 1.0; }

 private:
  double alpha_;
  int k_;
  quadrature::Rule1D rule_;
};

class LaguerreEllAxis final : public AxisBasis {
 public:
  LaguerreEllAxis(double alpha, int modes) : alpha_(alpha), k_(modes) {
    if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be > -1");
    const int n = std::max(128, modes + 32);
    rule_ = quadrature::gauss_laguerre_flat(n, alpha);
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return static_cast<double>(j) + 0.5 * (alpha_ + 1.0);
  }
  void eval_all(double x, std::span<double> out) const override {
    specfun::laguerre_normalized_all(k_ - 1, alpha_, x, out);
    const double pre = std::exp(-0.5 * x);
    for (int j = 0; j < k_; ++j) out[j] *= pre;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double x) const override {
    return std::pow(std::max(x, 0.0), alpha_);
  }
  std::pair<double, double> window() const override {
    return {0.0, 4.0 * k_ + 20.0};
  }
  bool positivity() const override { return false; }
  double growth_exponent() const override { return 1.0; }

 private:
  double alpha_;
  int k_;
  quadrature::Rule1D rule_;
};

class LaguerrePsiAxis final : public AxisBasis {
 public:
  LaguerrePsiAxis(double alpha, int modes) : alpha_(alpha), k_(modes) {
    if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be > -1");
    const int n = std::max(128, modes + 32);
    quadrature::Rule1D gl = quadrature::gauss_laguerre_flat(n, alpha);
    rule_.nodes.resize(gl.size());
    rule_.weights.resize(gl.size());
    for (std::size_t i = 0; i < gl.size(); ++i) {
      rule_.nodes[i] = std::sqrt(gl.nodes[i]);
      rule_.weights[i] = 0.5 * gl.weights[i];
    }
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return static_cast<double>(j) + 0.5 * (alpha_ + 1.0);
  }
  void eval_all(double x, std::span<double> out) const override {
    specfun::laguerre_normalized_all(k_ - 1, alpha_, x * x, out);
    const double pre = std::sqrt(2.0) * std::exp(-0.5 * x * x);
    for (int j = 0; j < k_; ++j) out[j] *= pre;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double x) const override {
    return std::pow(std::max(x, 0.0), 2.0 * alpha_ + 1.0);
  }
  std::pair<double, double> window() const override {
    return {0.0, std::sqrt(4.0 * k_ + 20.0)};
  }
  bool positivity() const override { return false; }
  double growth_exponent() const override { return 1.0; }

 private:
  double alpha_;
  int k_;
  quadrature::Rule1D rule_;
};

class LaguerreLfunAxis final : public AxisBasis {
 public:
  LaguerreLfunAxis(double alpha, int modes) : alpha_(alpha), k_(modes) {
    if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be > -1");
    const int n = std::max(128, modes + 32);
    quadrature::Rule1D gl = quadrature::gauss_laguerre_flat(n, alpha);
    rule_.nodes = gl.nodes;
    rule_.weights.resize(gl.size());
    for (std::size_t i = 0; i < gl.size(); ++i)
      rule_.weights[i] = gl.weights[i] * std::pow(gl.nodes[i], -alpha_);
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return static_cast<double>(j) + 0.5 * (alpha_ + 1.0);
  }
  void eval_all(double x, std::span<double> out) const override {
    if (!(x > 0.0)) {
      std::fill(out.begin(), out.begin() + k_, 0.0);
      return;
    }
    specfun::laguerre_normalized_all(k_ - 1, alpha_, x, out);
    const double pre = std::pow(x, 0.5 * alpha_) * std::exp(-0.5 * x);
    for (int j = 0; j < k_; ++j) out[j] *= pre;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override {
    return {0.0, 4.0 * k_ + 20.0};
  }
  bool positivity() const override { return false; }
  double growth_exponent() const override { return 1.0; }

 private:
  double alpha_;
  int k_;
  quadrature::Rule1D rule_;
};

class LaguerrePolyAxis final : public AxisBasis {
 public:
  LaguerrePolyAxis(double alpha, int modes) : alpha_(alpha), k_(modes) {
    if (!(alpha > -1.0)) throw std::invalid_argument("alpha must be > -1");
    const int n = std::max(128, modes + 32);
    rule_ = quadrature::gauss_laguerre(n, alpha);
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return static_cast<double>(j);
  }
  void eval_all(double x, std::span<double> out) const override {
    specfun::laguerre_normalized_all(k_ - 1, alpha_, x, out);
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double x) const override {
    return std::pow(std::max(x, 0.0), alpha_) * std::exp(-x);
  }
  std::pair<double, double> window() const override {
    return {0.0, 4.0 * k_ + 20.0};
  }
  bool positivity() const override { return false; }
  double growth_exponent() const override { return 1.0; }

 private:
  double alpha_;
  int k_;
  quadrature::Rule1D rule_;
};

class UltrasphericalPAxis final : public AxisBasis {
 public:
  UltrasphericalPAxis(double lambda, int modes) : lambda_(lambda), k_(modes) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    const int n = std::max(96, modes + 16);
    quadrature::Rule1D geg = quadrature::gauss_gegenbauer(n, lambda - 0.5);
    rule_.nodes.resize(geg.size());
    rule_.weights.resize(geg.size());
    // arccos reverses node order; refill ascending in theta
    for (std::size_t i = 0; i < geg.size(); ++i) {
      const std::size_t r = geg.size() - 1 - i;
      const double t = geg.nodes[r];
      rule_.nodes[i] = std::acos(t);
      rule_.weights[i] = geg.weights[r] * std::pow(1.0 - t * t, -lambda);
    }
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return (j + lambda_) * (j + lambda_);
  }
  void eval_all(double theta, std::span<double> out) const override {
    if (!(theta > 0.0 && theta < kPi)) {
      std::fill(out.begin(), out.begin() + k_, 0.0);
      return;
    }
    specfun::gegenbauer_orthonormal_all(k_ - 1, lambda_, std::cos(theta), out);
    const double pre = std::pow(std::sin(theta), lambda_);
    for (int j = 0; j < k_; ++j) out[j] *= pre;
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override { return {0.0, kPi}; }
  bool positivity() const override { return lambda_ >= 1.0; }
  double growth_exponent() const override { return 2.0; }

 private:
  double lambda_;
  int k_;
  quadrature::Rule1D rule_;
};

class UltrasphericalPolyAxis final : public AxisBasis {
 public:
  UltrasphericalPolyAxis(double lambda, int modes)
      : lambda_(lambda), k_(modes) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    const int n = std::max(96, modes + 16);
    quadrature::Rule1D geg = quadrature::gauss_gegenbauer(n, lambda - 0.5);
    rule_.nodes.resize(geg.size());
    rule_.weights.resize(geg.size());
    for (std::size_t i = 0; i < geg.size(); ++i) {
      const std::size_t r = geg.size() - 1 - i;
      rule_.nodes[i] = std::acos(geg.nodes[r]);
      rule_.weights[i] = geg.weights[r];
    }
  }
  std::size_t count() const override { return k_; }
  double eigenvalue(std::size_t j) const override {
    return (j + lambda_) * (j + lambda_);
  }
  void eval_all(double theta, std::span<double> out) const override {
    specfun::gegenbauer_orthonormal_all(k_ - 1, lambda_, std::cos(theta), out);
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double theta) const override {
    const double s = std::sin(theta);
    return std::pow(std::max(s, 0.0), 2.0 * lambda_);
  }
  std::pair<double, double> window() const override { return {0.0, kPi}; }
  bool positivity() const override { return false; }
  double growth_exponent() const override { return 2.0; }

 private:
  double lambda_;
  int k_;
  quadrature::Rule1D rule_;
};

// Continuous axes: a mode is a (spectral node, channel) pair and the
// spectral quadrature weight rides along as the mode weight.

class ContinuousAxis : public AxisBasis {
 public:
  ContinuousAxis(double xi_max, int channels) : channels_(channels) {
    if (!(xi_max > 0.0)) throw std::invalid_argument("xi_max must be > 0");
    const int panels = std::max(24, static_cast<int>(std::ceil(xi_max / 0.4)));
    xi_rule_ = quadrature::composite_legendre(0.0, xi_max, panels, 10);
  }
  std::size_t count() const override { return xi_rule_.size() * channels_; }
  double eigenvalue(std::size_t j) const override {
    const double xi = xi_rule_.nodes[j / channels_];
    return xi * xi;
  }
  double mode_weight(std::size_t j) const override {
    return xi_rule_.weights[j / channels_];
  }
  double growth_exponent() const override { return 2.0; }

 protected:
  int channels_;
  quadrature::Rule1D xi_rule_;
};

class FourierAxis final : public ContinuousAxis {
 public:
  FourierAxis(double xi_max, double x_max)
      : ContinuousAxis(xi_max, 2), x_max_(x_max) {
    const double width = 6.0 / xi_max;
    const int panels =
        std::max(32, static_cast<int>(std::ceil(2.0 * x_max / width)));
    rule_ = quadrature::composite_legendre(-x_max, x_max, panels, 12);
  }
  void eval_all(double x, std::span<double> out) const override {
    const double s = 1.0 / std::sqrt(kPi);
    const std::size_t n = xi_rule_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = xi_rule_.nodes[i] * x;
      out[2 * i] = s * std::cos(t);
      out[2 * i + 1] = s * std::sin(t);
    }
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double) const override { return 1.0; }
  std::pair<double, double> window() const override {
    return {-x_max_, x_max_};
  }
  bool positivity() const override { return true; }

 private:
  double x_max_;
  quadrature::Rule1D rule_;
};

class BesselAxis final : public ContinuousAxis {
 public:
  // weight_exponent 0: (xi x)^{1/2} J_{lambda-1/2}(xi x) against dx.
  // weight_exponent lambda: x^{-lambda} times that, against x^{2 lambda} dx.
  BesselAxis(double lambda, double xi_max, double x_max,
             double weight_exponent)
      : ContinuousAxis(xi_max, 1),
        lambda_(lambda),
        wexp_(weight_exponent),
        x_max_(x_max) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    const double width = 6.0 / xi_max;
    const int uniform = std::max(24, static_cast<int>(std::ceil(x_max / width)));
    rule_ = quadrature::composite_graded_left(x_max, 40, 0.65, uniform, 10);
    if (wexp_ != 0.0)
      for (std::size_t i = 0; i < rule_.size(); ++i)
        rule_.weights[i] *= std::pow(rule_.nodes[i], 2.0 * wexp_);
  }
  void eval_all(double x, std::span<double> out) const override {
    const std::size_t n = xi_rule_.size();
    if (!(x > 0.0)) {
      std::fill(out.begin(), out.begin() + n, 0.0);
      return;
    }
    const double nu = lambda_ - 0.5;
    const double xw = wexp_ == 0.0 ? 1.0 : std::pow(x, -wexp_);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = xi_rule_.nodes[i] * x;
      out[i] = xw * std::sqrt(z) * specfun::bessel_j(nu, z);
    }
  }
  const quadrature::Rule1D& rule() const override { return rule_; }
  double measure_density(double x) const override {
    return wexp_ == 0.0 ? 1.0 : std::pow(std::max(x, 0.0), 2.0 * wexp_);
  }
  std::pair<double, double> window() const override { return {0.0, x_max_}; }
  bool positivity() const override { return false; }

 private:
  double lambda_, wexp_, x_max_;
  quadrature::Rule1D rule_;
};

// --- tensor product system ----------------------------------------------

class TensorSystem : public SpectralSystem {
 public:
  TensorSystem(std::string name, Flavor flavor,
               std::vector<std::shared_ptr<const AxisBasis>> axes)
      : name_(std::move(name)), flavor_(flavor), axes_(std::move(axes)) {
    counts_.resize(axes_.size());
    std::size_t total = 1;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
      counts_[a] = axes_[a]->count();
      total *= counts_[a];
    }
    total_ = total;
  }

  std::string name() const override { return name_; }
  int dim() const override { return static_cast<int>(axes_.size()); }
  Flavor flavor() const override { return flavor_; }
  std::size_t mode_count() const override { return total_; }

  double eigenvalue(std::size_t m) const override {
    double s = 0.0;
    for (std::size_t a = axes_.size(); a-- > 0;) {
      s += axes_[a]->eigenvalue(m % counts_[a]);
      m /= counts_[a];
    }
    return s;
  }

  double mode_weight(std::size_t m) const override {
    double w = 1.0;
    for (std::size_t a = axes_.size(); a-- > 0;) {
      w *= axes_[a]->mode_weight(m % counts_[a]);
      m /= counts_[a];
    }
    return w;
  }

  std::vector<int> mode_index(std::size_t m) const override {
    std::vector<int> idx(axes_.size());
    for (std::size_t a = axes_.size(); a-- > 0;) {
      idx[a] = static_cast<int>(m % counts_[a]);
      m /= counts_[a];
    }
    return idx;
  }

  void eval_modes_at(std::span<const double> x,
                     std::span<double> out) const override {
    const std::size_t n = axes_.size();
    thread_local std::vector<std::vector<double>> bufs;
    if (bufs.size() < n) bufs.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (bufs[a].size() < counts_[a]) bufs[a].resize(counts_[a]);
      axes_[a]->eval_all(x[a], std::span<double>(bufs[a].data(), counts_[a]));
    }
    // in-place descending outer product, axis 0 slowest
    out[0] = 1.0;
    std::size_t filled = 1;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t c = counts_[a];
      for (std::size_t r = filled; r-- > 0;) {
        const double base = out[r];
        for (std::size_t j = c; j-- > 0;) out[r * c + j] = base * bufs[a][j];
      }
      filled *= c;
    }
  }

  double measure_density(std::span<const double> x) const override {
    double s = 1.0;
    for (std::size_t a = 0; a < axes_.size(); ++a)
      s *= axes_[a]->measure_density(x[a]);
    return s;
  }

  const GridFunction& quadrature_grid() const override {
    std::call_once(quad_once_, [&] {
      std::vector<std::vector<double>> nodes(axes_.size()),
          weights(axes_.size());
      for (std::size_t a = 0; a < axes_.size(); ++a) {
        nodes[a] = axes_[a]->rule().nodes;
        weights[a] = axes_[a]->rule().weights;
      }
      quad_ = std::make_unique<GridFunction>(tensor_grid(nodes, weights));
    });
    return *quad_;
  }

  GridFunction scan_grid(int per_axis) const override {
    const std::size_t n = axes_.size();
    std::vector<std::vector<double>> nodes(n), weights(n);
    for (std::size_t a = 0; a < n; ++a) {
      auto [lo, hi] = axes_[a]->window();
      const double h = (hi - lo) / per_axis;
      for (int i = 0; i < per_axis; ++i) {
        const double x = lo + (i + 0.5) * h;
        nodes[a].push_back(x);
        weights[a].push_back(h * axes_[a]->measure_density(x));
      }
    }
    return tensor_grid(nodes, weights);
  }

  bool positivity_preserving() const override {
    for (const auto& ax : axes_)
      if (!ax->positivity()) return false;
    return true;
  }

  double eigenvalue_growth_exponent() const override {
    return axes_[0]->growth_exponent();
  }

  // Separable analysis: sample once on the tensor quadrature grid, then
  // repeatedly contract the fastest axis, writing the result transposed so
  // the contracted mode index becomes slowest.  After all axes the layout
  // is row-major with axis 0 slowest, matching the mode flattening.
  Coefficients analyze(const ScalarField& f) const override {
    const std::size_t n = axes_.size();
    std::vector<const quadrature::Rule1D*> rules(n);
    std::vector<std::size_t> pts(n);
    std::size_t npts = 1;
    for (std::size_t a = 0; a < n; ++a) {
      rules[a] = &axes_[a]->rule();
      pts[a] = rules[a]->size();
      npts *= pts[a];
    }
    std::vector<double> data(npts);
    std::vector<double> x(n);
    double norm2 = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
      std::size_t r = p;
      double w = 1.0;
      for (std::size_t a = n; a-- > 0;) {
        const std::size_t i = r % pts[a];
        r /= pts[a];
        x[a] = rules[a]->nodes[i];
        w *= rules[a]->weights[i];
      }
      const double v = f(std::span<const double>(x.data(), n));
      norm2 += w * v * v;
      data[p] = v;
    }
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t a = n - 1 - step;  // axis currently fastest
      const std::size_t cols = pts[a];
      const std::size_t rows = data.size() / cols;
      Eigen::Map<const RowMat> d(data.data(), rows, cols);
      const Eigen::MatrixXd& phi = axis_matrix(a);  // count x pts
      Eigen::MatrixXd wphi(cols, counts_[a]);
      for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < counts_[a]; ++j)
          wphi(i, j) = rules[a]->weights[i] * phi(j, i);
      RowMat prod = d * wphi;  // rows x count_a
      std::vector<double> next(rows * counts_[a]);
      Eigen::Map<RowMat>(next.data(), counts_[a], rows) = prod.transpose();
      data.swap(next);
    }
    Coefficients c;
    c.system = shared_from_this();
    c.values = std::move(data);
    c.input_norm2 = norm2;
    return c;
  }

 protected:
  [[nodiscard]] GridFunction tensor_grid(
      const std::vector<std::vector<double>>& nodes,
      const std::vector<std::vector<double>>& weights) const {
    const std::size_t n = nodes.size();
    std::size_t npts = 1;
    for (std::size_t a = 0; a < n; ++a) npts *= nodes[a].size();
    GridFunction g;
    g.dim = static_cast<int>(n);
    g.coords.resize(npts * n);
    g.values.assign(npts, 0.0);
    g.weights.resize(npts);
    for (std::size_t p = 0; p < npts; ++p) {
      std::size_t r = p;
      double w = 1.0;
      for (std::size_t a = n; a-- > 0;) {
        const std::size_t i = r % nodes[a].size();
        r /= nodes[a].size();
        g.coords[p * n + a] = nodes[a][i];
        w *= weights[a][i];
      }
      g.weights[p] = w;
    }
    return g;
  }

  [[nodiscard]] const Eigen::MatrixXd& axis_matrix(std::size_t a) const {
    std::call_once(mat_once_, [&] {
      mats_.resize(axes_.size());
      for (std::size_t b = 0; b < axes_.size(); ++b) {
        const auto& rule = axes_[b]->rule();
        mats_[b].resize(counts_[b], rule.size());
        std::vector<double> buf(counts_[b]);
        for (std::size_t i = 0; i < rule.size(); ++i) {
          axes_[b]->eval_all(rule.nodes[i],
                             std::span<double>(buf.data(), counts_[b]));
          for (std::size_t j = 0; j < counts_[b]; ++j) mats_[b](j, i) = buf[j];
        }
      }
    });
    return mats_[a];
  }

  std::string name_;
  Flavor flavor_;
  std::vector<std::shared_ptr<const AxisBasis>> axes_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
  mutable std::unique_ptr<GridFunction> quad_;
  mutable std::once_flag quad_once_;
  mutable std::vector<Eigen::MatrixXd> mats_;
  mutable std::once_flag mat_once_;
};

// --- rotated wrapper ------------------------------------------------------

// Same spectrum as the inner planar system; eigenfunctions are composed
// with a rotation.  Only meaningful when the inner measure is Lebesgue.
class RotatedSystem final : public SpectralSystem {
 public:
  RotatedSystem(std::shared_ptr<const TensorSystem> inner, double angle)
      : inner_(std::move(inner)), angle_(angle) {
    c_ = std::cos(angle);
    s_ = std::sin(angle);
  }

  std::string name() const override {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_rot%.6g", inner_->name().c_str(),
                  angle_);
    return buf;
  }
  int dim() const override { return 2; }
  Flavor flavor() const override { return inner_->flavor(); }
  std::size_t mode_count() const override { return inner_->mode_count(); }
  double eigenvalue(std::size_t m) const override {
    return inner_->eigenvalue(m);
  }
  double mode_weight(std::size_t m) const override {
    return inner_->mode_weight(m);
  }
  std::vector<int> mode_index(std::size_t m) const override {
    return inner_->mode_index(m);
  }
  void eval_modes_at(std::span<const double> x,
                     std::span<double> out) const override {
    const double u[2] = {c_ * x[0] + s_ * x[1], -s_ * x[0] + c_ * x[1]};
    inner_->eval_modes_at(std::span<const double>(u, 2), out);
  }
  double measure_density(std::span<const double> x) const override {
    const double u[2] = {c_ * x[0] + s_ * x[1], -s_ * x[0] + c_ * x[1]};
    return inner_->measure_density(std::span<const double>(u, 2));
  }
  const GridFunction& quadrature_grid() const override {
    std::call_once(once_, [&] {
      auto g = std::make_unique<GridFunction>(inner_->quadrature_grid());
      rotate_back(*g);
      quad_ = std::move(g);
    });
    return *quad_;
  }
  GridFunction scan_grid(int per_axis) const override {
    GridFunction g = inner_->scan_grid(per_axis);
    rotate_back(g);
    return g;
  }
  bool positivity_preserving() const override {
    return inner_->positivity_preserving();
  }
  double eigenvalue_growth_exponent() const override {
    return inner_->eigenvalue_growth_exponent();
  }
  Coefficients analyze(const ScalarField& f) const override {
    const double c = c_, s = s_;
    Coefficients inner_c = inner_->analyze([&](std::span<const double> u) {
      // x = A^T u for u in the inner frame
      const double x[2] = {c * u[0] - s * u[1], s * u[0] + c * u[1]};
      return f(std::span<const double>(x, 2));
    });
    Coefficients out;
    out.system = shared_from_this();
    out.values = std::move(inner_c.values);
    out.input_norm2 = inner_c.input_norm2;
    return out;
  }

 private:
  void rotate_back(GridFunction& g) const {
    for (std::size_t p = 0; p < g.size(); ++p) {
      const double u0 = g.coords[2 * p], u1 = g.coords[2 * p + 1];
      g.coords[2 * p] = c_ * u0 - s_ * u1;
      g.coords[2 * p + 1] = s_ * u0 + c_ * u1;
    }
  }

  std::shared_ptr<const TensorSystem> inner_;
  double angle_, c_ = 1.0, s_ = 0.0;
  mutable std::unique_ptr<GridFunction> quad_;
  mutable std::once_flag once_;
};

// --- finite-difference realizations ---------------------------------------

class FdSystemImpl final : public FdSystem {
 public:
  FdSystemImpl(ScalarField a, ScalarField V, FdGridSpec spec, double mu,
               FdBoundary bc)
      : spec_(std::move(spec)), bc_(bc) {
    const int n = spec_.dim;
    if (n < 1 || n > 2) throw std::invalid_argument("fd grids are 1d or 2d");
    if (!(mu >= 1.0)) throw std::invalid_argument("ellipticity mu must be >= 1");
    ncells_.assign(spec_.cells.begin(), spec_.cells.end());
    h_.resize(n);
    std::size_t total = 1;
    for (int ax = 0; ax < n; ++ax) {
      if (ncells_[ax] < 2)
        throw std::invalid_argument("need >= 2 unknowns per axis");
      const double len = spec_.hi[ax] - spec_.lo[ax];
      if (!(len > 0.0)) throw std::invalid_argument("need hi > lo");
      // Dirichlet: unknowns at interior nodes; Neumann: at cell centers.
      h_[ax] = bc_ == FdBoundary::dirichlet ? len / (ncells_[ax] + 1)
                                            : len / ncells_[ax];
      total *= ncells_[ax];
    }
    order_ = total;
    if (order_ > 3600)
      throw std::invalid_argument("fd system too large for dense eigensolve");
    cellvol_ = 1.0;
    for (int ax = 0; ax < n; ++ax) cellvol_ *= h_[ax];

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(order_, order_);
    const double inv_mu = 1.0 / mu, tol = 1e-12;
    std::vector<double> xc(n), xf(n);
    auto checked = [&](double av) {
      if (!(av >= inv_mu - tol && av <= mu + tol))
        throw std::invalid_argument(
            "coefficient violates the ellipticity window");
      return av;
    };
    for (std::size_t p = 0; p < order_; ++p) {
      node_coords(p, xc);
      const double vp = V(std::span<const double>(xc.data(), n));
      if (!(vp >= -1e-12))
        throw std::invalid_argument("potential must be nonnegative");
      A(p, p) += std::max(vp, 0.0);
      for (int ax = 0; ax < n; ++ax) {
        const double invh2 = 1.0 / (h_[ax] * h_[ax]);
        for (int dir : {+1, -1}) {
          xf = xc;
          xf[ax] += 0.5 * dir * h_[ax];
          const bool boundary = on_boundary(p, ax, dir);
          // Neumann walls carry no flux; Dirichlet walls pin zero outside.
          if (boundary && bc_ == FdBoundary::neumann) continue;
          const double af =
              checked(a(std::span<const double>(xf.data(), n))) * invh2;
          A(p, p) += af;
          if (!boundary) A(p, neighbor(p, ax, dir)) -= af;
        }
      }
    }
    matrix_.assign(A.data(), A.data() + order_ * order_);  // column-major
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("dense eigensolve failed");
    evals_.resize(order_);
    // the eigensolver leaves exact null vectors (pure Neumann constants)
    // at noise level ~eps*|A|; snap those to zero so downstream
    // zero-mode policies can see them
    const double top = std::abs(es.eigenvalues()(order_ - 1));
    const double snap = 1e-12 * std::max(top, 1.0);
    for (std::size_t m = 0; m < order_; ++m) {
      const double ev = es.eigenvalues()(m);
      evals_[m] = ev <= snap ? 0.0 : ev;
    }
    // orthonormal against the cell-volume inner product
    evecs_ = es.eigenvectors() / std::sqrt(cellvol_);
    name_ = bc_ == FdBoundary::dirichlet ? "fd_dirichlet" : "fd_neumann";
  }

  std::string name() const override { return name_; }
  int dim() const override { return spec_.dim; }
  Flavor flavor() const override { return Flavor::discrete; }
  std::size_t mode_count() const override { return order_; }
  double eigenvalue(std::size_t m) const override { return evals_[m]; }
  std::vector<int> mode_index(std::size_t m) const override {
    return {static_cast<int>(m)};
  }

  void eval_modes_at(std::span<const double> x,
                     std::span<double> out) const override {
    // multilinear interpolation of each eigenvector
    const int n = spec_.dim;
    double wlo[2], whi[2];
    std::size_t ilo[2];
    bool outside = false;
    for (int ax = 0; ax < n; ++ax) {
      const double t = (x[ax] - first_node(ax)) / h_[ax];
      if (bc_ == FdBoundary::dirichlet &&
          (t < -1.0 || t > static_cast<double>(ncells_[ax])))
        outside = true;
      double tc = std::clamp(t, 0.0, static_cast<double>(ncells_[ax] - 1));
      std::size_t i0 = static_cast<std::size_t>(tc);
      if (i0 >= ncells_[ax] - 1) i0 = ncells_[ax] - 2;
      ilo[ax] = i0;
      whi[ax] = std::clamp(tc - static_cast<double>(i0), 0.0, 1.0);
      wlo[ax] = 1.0 - whi[ax];
    }
    if (outside) {
      std::fill(out.begin(), out.begin() + order_, 0.0);
      return;
    }
    for (std::size_t m = 0; m < order_; ++m) {
      double v;
      if (n == 1) {
        v = wlo[0] * evecs_(ilo[0], m) + whi[0] * evecs_(ilo[0] + 1, m);
      } else {
        const std::size_t ny = ncells_[1];
        v = wlo[0] * wlo[1] * evecs_(ilo[0] * ny + ilo[1], m) +
            wlo[0] * whi[1] * evecs_(ilo[0] * ny + ilo[1] + 1, m) +
            whi[0] * wlo[1] * evecs_((ilo[0] + 1) * ny + ilo[1], m) +
            whi[0] * whi[1] * evecs_((ilo[0] + 1) * ny + ilo[1] + 1, m);
      }
      out[m] = v;
    }
  }

  double measure_density(std::span<const double>) const override {
    return 1.0;
  }

  const GridFunction& quadrature_grid() const override {
    std::call_once(once_, [&] {
      auto g = std::make_unique<GridFunction>();
      g->dim = spec_.dim;
      g->coords.resize(order_ * spec_.dim);
      g->values.assign(order_, 0.0);
      g->weights.assign(order_, cellvol_);
      std::vector<double> x(spec_.dim);
      for (std::size_t p = 0; p < order_; ++p) {
        node_coords(p, x);
        for (int ax = 0; ax < spec_.dim; ++ax)
          g->coords[p * spec_.dim + ax] = x[ax];
      }
      quad_ = std::move(g);
    });
    return *quad_;
  }

  GridFunction scan_grid(int) const override { return quadrature_grid(); }
  bool positivity_preserving() const override { return true; }
  double eigenvalue_growth_exponent() const override { return 2.0; }

  const std::vector<double>& matrix_dense() const override { return matrix_; }
  std::size_t matrix_order() const override { return order_; }
  const FdGridSpec& grid_spec() const override { return spec_; }
  double cell_volume() const override { return cellvol_; }

 private:
  [[nodiscard]] double first_node(int ax) const {
    return bc_ == FdBoundary::dirichlet ? spec_.lo[ax] + h_[ax]
                                        : spec_.lo[ax] + 0.5 * h_[ax];
  }
  void node_coords(std::size_t p, std::vector<double>& x) const {
    if (spec_.dim == 1) {
      x[0] = first_node(0) + p * h_[0];
    } else {
      const std::size_t ny = ncells_[1];
      x[0] = first_node(0) + (p / ny) * h_[0];
      x[1] = first_node(1) + (p % ny) * h_[1];
    }
  }
  [[nodiscard]] bool on_boundary(std::size_t p, int ax, int dir) const {
    std::size_t idx;
    if (spec_.dim == 1) {
      idx = p;
    } else {
      idx = ax == 0 ? p / ncells_[1] : p % ncells_[1];
    }
    return dir > 0 ? idx + 1 == ncells_[ax] : idx == 0;
  }
  [[nodiscard]] std::size_t neighbor(std::size_t p, int ax, int dir) const {
    if (spec_.dim == 1) return dir > 0 ? p + 1 : p - 1;
    const std::size_t ny = ncells_[1];
    if (ax == 0) return dir > 0 ? p + ny : p - ny;
    return dir > 0 ? p + 1 : p - 1;
  }

  FdGridSpec spec_;
  FdBoundary bc_;
  std::vector<std::size_t> ncells_;
  std::vector<double> h_;
  std::size_t order_ = 0;
  double cellvol_ = 1.0;
  std::vector<double> matrix_;
  std::vector<double> evals_;
  Eigen::MatrixXd evecs_;
  std::string name_;
  mutable std::unique_ptr<GridFunction> quad_;
  mutable std::once_flag once_;
};

std::shared_ptr<const TensorSystem> tensor1(std::string name, Flavor flavor,
                                            std::shared_ptr<AxisBasis> ax) {
  std::vector<std::shared_ptr<const AxisBasis>> axes{std::move(ax)};
  return std::make_shared<TensorSystem>(std::move(name), flavor,
                                        std::move(axes));
}

}  // namespace

// --- factories -------------------------------------------------------------

std::shared_ptr<const SpectralSystem> make_dirichlet_interval(double a,
                                                              double b,
                                                              int modes) {
  return tensor1("dirichlet_interval", Flavor::discrete,
                 std::make_shared<DirichletSineAxis>(a, b, modes));
}

std::shared_ptr<const SpectralSystem> make_harmonic_oscillator(
    std::vector<double> d, int modes_per_axis, bool shifted) {
  if (d.empty()) throw std::invalid_argument("need at least one axis");
  std::vector<std::shared_ptr<const AxisBasis>> axes;
  axes.reserve(d.size());
  for (double di : d)
    axes.push_back(
        std::make_shared<HermiteFunctionAxis>(di, modes_per_axis, shifted));
  return std::make_shared<TensorSystem>(
      shifted ? "harmonic_oscillator_shifted" : "harmonic_oscillator",
      Flavor::discrete, std::move(axes));
}

std::shared_ptr<const SpectralSystem> make_hermite_rotated(
    std::vector<double> d, double angle, int modes_per_axis) {
  if (d.size() != 2)
    throw std::invalid_argument("rotated oscillator is planar");
  std::vector<std::shared_ptr<const AxisBasis>> axes;
  for (double di : d)
    axes.push_back(
        std::make_shared<HermiteFunctionAxis>(di, modes_per_axis, false));
  auto inner = std::make_shared<TensorSystem>(
      "harmonic_oscillator", Flavor::discrete, std::move(axes));
  return std::make_shared<RotatedSystem>(inner, angle);
}

std::shared_ptr<const SpectralSystem> make_laguerre_phi(
    std::vector<double> alpha, int modes_per_axis) {
  if (alpha.empty()) throw std::invalid_argument("need at least one axis");
  std::vector<std::shared_ptr<const AxisBasis>> axes;
  for (double al : alpha)
    axes.push_back(std::make_shared<LaguerrePhiAxis>(al, modes_per_axis));
  return std::make_shared<TensorSystem>("laguerre_phi", Flavor::discrete,
                                        std::move(axes));
}

std::shared_ptr<const SpectralSystem> make_laguerre_ell(double alpha,
                                                        int modes) {
  return tensor1("laguerre_ell", Flavor::discrete,
                 std::make_shared<LaguerreEllAxis>(alpha, modes));
}

std::shared_ptr<const SpectralSystem> make_laguerre_psi(double alpha,
                                                        int modes) {
  return tensor1("laguerre_psi", Flavor::discrete,
                 std::make_shared<LaguerrePsiAxis>(alpha, modes));
}

std::shared_ptr<const SpectralSystem> make_laguerre_lfun(double alpha,
                                                         int modes) {
  return tensor1("laguerre_lfun", Flavor::discrete,
                 std::make_shared<LaguerreLfunAxis>(alpha, modes));
}

std::shared_ptr<const SpectralSystem> make_laguerre_poly(double alpha,
                                                         int modes) {
  return tensor1("laguerre_poly", Flavor::discrete,
                 std::make_shared<LaguerrePolyAxis>(alpha, modes));
}

std::shared_ptr<const SpectralSystem> make_hermite_poly_gauss(
    std::vector<double> d, int modes_per_axis) {
  if (d.empty()) throw std::invalid_argument("need at least one axis");
  std::vector<std::shared_ptr<const AxisBasis>> axes;
  for (double di : d)
    axes.push_back(std::make_shared<HermitePolyAxis>(di, modes_per_axis));
  return std::make_shared<TensorSystem>("hermite_poly_gauss",
                                        Flavor::discrete, std::move(axes));
}

std::shared_ptr<const SpectralSystem> make_ultraspherical_l(double lambda,
                                                            int modes) {
  return tensor1("ultraspherical_l", Flavor::discrete,
                 std::make_shared<UltrasphericalPAxis>(lambda, modes));
}

std::shared_ptr<const SpectralSystem> make_ultraspherical_poly(double lambda,
                                                               int modes) {
  return tensor1("ultraspherical_poly", Flavor::discrete,
                 std::make_shared<UltrasphericalPolyAxis>(lambda, modes));
}

std::shared_ptr<const SpectralSystem> make_bessel_s(double lambda,
                                                    double xi_max,
                                                    double x_max) {
  return tensor1("bessel_s", Flavor::continuous,
                 std::make_shared<BesselAxis>(lambda, xi_max, x_max, 0.0));
}

std::shared_ptr<const SpectralSystem> make_bessel_delta(double lambda,
                                                        double xi_max,
                                                        double x_max) {
  return tensor1("bessel_delta", Flavor::continuous,
                 std::make_shared<BesselAxis>(lambda, xi_max, x_max, lambda));
}

std::shared_ptr<const SpectralSystem> make_fourier_laplacian(int n,
                                                             double box_half,
                                                             double xi_max) {
  if (n < 1 || n > 2)
    throw std::invalid_argument("fourier systems are 1d or 2d");
  std::vector<std::shared_ptr<const AxisBasis>> axes;
  for (int a = 0; a < n; ++a)
    axes.push_back(std::make_shared<FourierAxis>(xi_max, box_half));
  return std::make_shared<TensorSystem>("fourier_laplacian",
                                        Flavor::continuous, std::move(axes));
}

std::shared_ptr<const FdSystem> make_divergence_form_fd(ScalarField a,
                                                        ScalarField V,
                                                        FdGridSpec grid,
                                                        double mu,
                                                        FdBoundary bc) {
  return std::make_shared<FdSystemImpl>(std::move(a), std::move(V),
                                        std::move(grid), mu, bc);
}

}  // namespace fracspec
