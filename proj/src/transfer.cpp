#include "fracspec/transfer.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracspec/fracops.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/rng.hpp"

namespace fracspec {
namespace {

void require_systems(const TransferenceMap& map) {
  if (!map.source || !map.target || !map.multiplier || !map.forward ||
      !map.inverse)
    throw std::invalid_argument("transference map is incomplete");
}

void require_target(const TransferenceMap& map, const Coefficients& c) {
  if (c.system.get() != map.target.get())
    throw std::invalid_argument("coefficients are not target-side");
}

void require_source(const TransferenceMap& map, const Coefficients& c) {
  if (c.system.get() != map.source.get())
    throw std::invalid_argument("coefficients are not source-side");
}

/// seeded combination of the leading source modes
Coefficients random_mode_combo(const SpectralSystem& sys, rng::Stream& rs,
                               std::size_t span = 16) {
  Coefficients c{sys.shared_from_this(), {}, -1.0};
  c.values.assign(sys.mode_count(), 0.0);
  const std::size_t n = std::min(span, c.values.size());
  for (std::size_t i = 0; i < n; ++i) c.values[i] = rs.uniform(-1.0, 1.0);
  return c;
}

/// seeded decaying profile for continuous-spectrum sources: sums of
/// gaussians, entire and even around zero
ScalarField random_profile(rng::Stream& rs) {
  struct Term {
    double a, s;
  };
  std::vector<Term> terms(3);
  for (auto& t : terms) {
    t.a = rs.uniform(-1.0, 1.0);
    t.s = rs.uniform(0.7, 1.5);
  }
  return [terms](std::span<const double> x) {
    double v = 0.0;
    for (const auto& t : terms)
      v += t.a * std::exp(-0.5 * x[0] * x[0] / (t.s * t.s));
    return v;
  };
}

/// grid points mapped through the forward change of variables, as a
/// source-side point set.  Identity forwards reproduce the coordinates
/// bit for bit, which lets the source system recognize its own
/// quadrature grid and use its cached mode table.
GridFunction forward_image(const TransferenceMap& map,
                           const GridFunction& tgrid) {
  GridFunction img;
  img.dim = map.source->dim();
  const std::size_t n = tgrid.size();
  const auto d = static_cast<std::size_t>(img.dim);
  img.coords.resize(n * d);
  img.values.assign(n, 0.0);
  img.weights.assign(n, 0.0);
  std::vector<double> u(d);
  for (std::size_t p = 0; p < n; ++p) {
    map.forward(tgrid.point(p), u);
    std::copy(u.begin(), u.end(), img.coords.begin() + p * d);
  }
  return img;
}

}  // namespace

double apply_at(const TransferenceMap& map, const Coefficients& src,
                std::span<const double> x) {
  require_systems(map);
  require_source(map, src);
  std::vector<double> u(static_cast<std::size_t>(map.source->dim()));
  map.forward(x, u);
  return map.multiplier(x) * map.source->synthesize_at(src, u);
}

double apply_inverse_at(const TransferenceMap& map, const Coefficients& tgt,
                        std::span<const double> u) {
  require_systems(map);
  require_target(map, tgt);
  std::vector<double> x(static_cast<std::size_t>(map.target->dim()));
  map.inverse(u, x);
  const double m = map.multiplier(x);
  if (m == 0.0) throw std::domain_error("transference weight vanishes here");
  return map.target->synthesize_at(tgt, x) / m;
}

GridFunction apply(const TransferenceMap& map, const Coefficients& src) {
  require_systems(map);
  require_source(map, src);
  GridFunction out = map.target->quadrature_grid();
  const GridFunction img = forward_image(map, out);
  out.values = map.source->synthesize_values(src, img);
  parallel_for(out.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p)
      out.values[p] *= map.multiplier(out.point(p));
  });
  return out;
}

Coefficients push_forward(const TransferenceMap& map, const Coefficients& src) {
  return map.target->analyze(apply(map, src));
}

Coefficients shifted_frac_power(const TransferenceMap& map,
                                const Coefficients& tgt, double sigma) {
  require_systems(map);
  require_target(map, tgt);
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("fractional order must lie in (0, 1)");
  Coefficients out = tgt;
  out.input_norm2 = -1.0;
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    const double lam =
        std::max(map.target->eigenvalue(m) - map.shift, 0.0);
    out.values[m] *= (lam > 0.0) ? std::pow(lam, sigma) : 0.0;
  }
  return out;
}

double gram_transport_defect(const TransferenceMap& map, std::size_t k_max) {
  require_systems(map);
  k_max = std::min({k_max, map.source->mode_count(), map.target->mode_count()});
  if (k_max == 0) return 0.0;

  const auto gram = [&](const GridFunction& grid, bool transported) {
    std::vector<double> g(k_max * k_max, 0.0);
    std::vector<double> tab;
    std::vector<double> scale(grid.size(), 1.0);
    if (transported) {
      const GridFunction img = forward_image(map, grid);
      map.source->eval_modes_on(img, k_max, tab);
      for (std::size_t p = 0; p < grid.size(); ++p)
        scale[p] = map.multiplier(grid.point(p));
    } else {
      map.source->eval_modes_on(grid, k_max, tab);
    }
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double w = grid.weights[p] * scale[p] * scale[p];
      const double* modes = tab.data() + p * k_max;
      for (std::size_t j = 0; j < k_max; ++j) {
        const double wj = w * modes[j];
        for (std::size_t k = j; k < k_max; ++k) g[j * k_max + k] += wj * modes[k];
      }
    }
    return g;
  };

  const auto gs = gram(map.source->quadrature_grid(), false);
  const auto gt = gram(map.target->quadrature_grid(), true);
  double defect = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i)
    defect = std::max(defect, std::abs(gt[i] - gs[i]));
  return defect;
}

double involution_defect(const TransferenceMap& map, std::uint64_t seed) {
  require_systems(map);
  rng::Stream rs(seed);
  const Coefficients c = random_mode_combo(*map.source, rs);
  const GridFunction scan =
      map.source->scan_grid(map.source->dim() == 1 ? 200 : 24);
  std::vector<double> tx(static_cast<std::size_t>(map.target->dim()));
  std::vector<double> su(static_cast<std::size_t>(map.source->dim()));
  double fmax = 0.0, dmax = 0.0;
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const auto u = scan.point(p);
    map.inverse(u, tx);
    const double m = map.multiplier(tx);
    if (std::abs(m) < 1e-13) continue;
    const double fu = map.source->synthesize_at(c, u);
    map.forward(tx, su);
    const double round = map.multiplier(tx) *
                         map.source->synthesize_at(c, su) / m;
    fmax = std::max(fmax, std::abs(fu));
    dmax = std::max(dmax, std::abs(round - fu));
  }
  return dmax / std::max(fmax, 1e-300);
}

IntertwiningReport verify_intertwining(const TransferenceMap& map,
                                       double sigma, int n_trials,
                                       std::uint64_t seed) {
  require_systems(map);
  if (n_trials < 1) throw std::invalid_argument("need at least one trial");
  const GridFunction& tgrid = map.target->quadrature_grid();
  const std::size_t npts = tgrid.size();
  const GridFunction img = forward_image(map, tgrid);
  std::vector<double> mult(npts);
  for (std::size_t p = 0; p < npts; ++p) mult[p] = map.multiplier(tgrid.point(p));
  IntertwiningReport report;
  report.trials = static_cast<std::size_t>(n_trials);

  for (int trial = 0; trial < n_trials; ++trial) {
    rng::Stream rs(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(trial));
    Coefficients c =
        (map.source->flavor() == Flavor::continuous)
            ? map.source->analyze(random_profile(rs))
            : random_mode_combo(*map.source, rs);

    // route one: fractional power on the source, then transport
    const Coefficients d = frac_power_spectral(c, sigma);
    std::vector<double> left = map.source->synthesize_values(d, img);
    for (std::size_t p = 0; p < npts; ++p) left[p] *= mult[p];

    // route two: transport, then the shifted fractional power
    const Coefficients e =
        shifted_frac_power(map, push_forward(map, c), sigma);
    const std::vector<double> right = map.target->synthesize_values(e, tgrid);

    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < npts; ++p) {
      const double diff = left[p] - right[p];
      num += tgrid.weights[p] * diff * diff;
      den += tgrid.weights[p] * left[p] * left[p];
    }
    report.discrepancy = std::max(
        report.discrepancy, std::sqrt(num / std::max(den, 1e-300)));
  }
  return report;
}

RatioTransport transported_ratio_bound(const TransferenceMap& map,
                                       const Coefficients& src,
                                       const GridFunction& target_region) {
  require_systems(map);
  require_source(map, src);
  if (target_region.size() == 0)
    throw std::invalid_argument("empty comparison region");
  RatioTransport out;
  double fs = -1e300, fi = 1e300;   // f over the mapped region
  double ts = -1e300, ti = 1e300;   // U f over the region
  double ms = 0.0, mi = 1e300;      // |M| over the region
  std::vector<double> u(static_cast<std::size_t>(map.source->dim()));
  for (std::size_t p = 0; p < target_region.size(); ++p) {
    const auto x = target_region.point(p);
    map.forward(x, u);
    const double fv = map.source->synthesize_at(src, u);
    const double m = map.multiplier(x);
    const double tv = m * fv;
    fs = std::max(fs, fv);
    fi = std::min(fi, fv);
    ts = std::max(ts, tv);
    ti = std::min(ti, tv);
    ms = std::max(ms, std::abs(m));
    mi = std::min(mi, std::abs(m));
  }
  if (!(fi > 0.0) || !(ti > 0.0) || !(mi > 0.0))
    throw std::domain_error("quotients need positive values on the region");
  out.ratio_source = fs / fi;
  out.ratio_target = ts / ti;
  out.weight_ratio2 = (ms / mi) * (ms / mi);
  out.consistent =
      out.ratio_target <= out.weight_ratio2 * out.ratio_source * (1.0 + 1e-12) &&
      out.ratio_source <= out.weight_ratio2 * out.ratio_target * (1.0 + 1e-12);
  return out;
}

std::vector<TransferenceMap> builtin_maps(int modes) {
  if (modes < 4) throw std::invalid_argument("catalog needs modes >= 4");
  const double alpha = 0.5;
  const double ulam = 1.5;
  const double blam = 1.5;
  const int per_axis = std::max(2, static_cast<int>(std::llround(
                                       std::sqrt(static_cast<double>(modes)))));
  std::vector<TransferenceMap> maps;

  const auto copy_point = [](std::span<const double> in,
                             std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i];
  };

  {
    TransferenceMap m;
    m.name = "gauss_to_oscillator";
    m.source = make_hermite_poly_gauss({1.0}, modes);
    m.target = make_harmonic_oscillator({1.0}, modes, false);
    m.multiplier = [](std::span<const double> x) {
      return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x[0] * x[0]);
    };
    m.forward = copy_point;
    m.inverse = copy_point;
    m.shift = 1.0;
    maps.push_back(std::move(m));
  }
  {
    const double theta = 0.6;
    const double cs = std::cos(theta), sn = std::sin(theta);
    TransferenceMap m;
    m.name = "oscillator_rotation";
    m.source = make_hermite_rotated({1.0, 2.0}, theta, per_axis);
    m.target = make_harmonic_oscillator({1.0, 2.0}, per_axis, false);
    m.multiplier = [](std::span<const double>) { return 1.0; };
    m.forward = [cs, sn](std::span<const double> x, std::span<double> u) {
      u[0] = cs * x[0] - sn * x[1];
      u[1] = sn * x[0] + cs * x[1];
    };
    m.inverse = [cs, sn](std::span<const double> u, std::span<double> x) {
      x[0] = cs * u[0] + sn * u[1];
      x[1] = -sn * u[0] + cs * u[1];
    };
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "laguerre_ell_to_phi";
    m.source = make_laguerre_ell(alpha, modes);
    m.target = make_laguerre_phi({alpha}, modes);
    m.multiplier = [alpha](std::span<const double> x) {
      return std::numbers::sqrt2 * std::pow(x[0], alpha + 0.5);
    };
    m.forward = [](std::span<const double> x, std::span<double> u) {
      u[0] = x[0] * x[0];
    };
    m.inverse = [](std::span<const double> u, std::span<double> x) {
      x[0] = std::sqrt(u[0]);
    };
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "laguerre_psi_to_phi";
    m.source = make_laguerre_psi(alpha, modes);
    m.target = make_laguerre_phi({alpha}, modes);
    m.multiplier = [alpha](std::span<const double> x) {
      return std::pow(x[0], alpha + 0.5);
    };
    m.forward = copy_point;
    m.inverse = copy_point;
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "laguerre_lfun_to_phi";
    m.source = make_laguerre_lfun(alpha, modes);
    m.target = make_laguerre_phi({alpha}, modes);
    m.multiplier = [](std::span<const double> x) {
      return std::sqrt(2.0 * x[0]);
    };
    m.forward = [](std::span<const double> x, std::span<double> u) {
      u[0] = x[0] * x[0];
    };
    m.inverse = [](std::span<const double> u, std::span<double> x) {
      x[0] = std::sqrt(u[0]);
    };
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "laguerre_poly_to_phi";
    m.source = make_laguerre_poly(alpha, modes);
    m.target = make_laguerre_phi({alpha}, modes);
    m.multiplier = [alpha](std::span<const double> x) {
      return std::pow(x[0], alpha) * std::sqrt(2.0 * x[0]) *
             std::exp(-0.5 * x[0] * x[0]);
    };
    m.forward = [](std::span<const double> x, std::span<double> u) {
      u[0] = x[0] * x[0];
    };
    m.inverse = [](std::span<const double> u, std::span<double> x) {
      x[0] = std::sqrt(u[0]);
    };
    m.shift = 0.5 * (alpha + 1.0);
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "ultraspherical_poly_to_l";
    m.source = make_ultraspherical_poly(ulam, modes);
    m.target = make_ultraspherical_l(ulam, modes);
    m.multiplier = [ulam](std::span<const double> x) {
      return std::pow(std::sin(x[0]), ulam);
    };
    m.forward = copy_point;
    m.inverse = copy_point;
    maps.push_back(std::move(m));
  }
  {
    TransferenceMap m;
    m.name = "bessel_delta_to_s";
    m.source = make_bessel_delta(blam);
    m.target = make_bessel_s(blam);
    m.multiplier = [blam](std::span<const double> x) {
      return std::pow(x[0], blam);
    };
    m.forward = copy_point;
    m.inverse = copy_point;
    m.tolerance = 1e-4;
    maps.push_back(std::move(m));
  }
  return maps;
}

TransferenceMap find_map(std::string_view name, int modes) {
  auto maps = builtin_maps(modes);
  for (auto& m : maps)
    if (m.name == name) return std::move(m);
  throw std::invalid_argument("unknown transference map: " +
                              std::string(name));
}

}  // namespace fracspec
