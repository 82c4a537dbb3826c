#include "fracspec/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracspec/fracops.hpp"
#include "fracspec/parallel.hpp"
#include "fracspec/rng.hpp"

namespace fracspec {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr int kHaltonPrimes[6] = {2, 3, 5, 7, 11, 13};

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("fractional order must lie in (0, 1)");
}

double quartile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + (sorted[i + 1] - sorted[i]) * frac;
}

/// per-axis bounds of a system's working window, from its scan grid
Box working_window(const SpectralSystem& sys) {
  const GridFunction scan = sys.scan_grid(17);
  const auto d = static_cast<std::size_t>(sys.dim());
  Box box;
  box.lo.assign(d, std::numeric_limits<double>::infinity());
  box.hi.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const auto x = scan.point(p);
    for (std::size_t a = 0; a < d; ++a) {
      box.lo[a] = std::min(box.lo[a], x[a]);
      box.hi[a] = std::max(box.hi[a], x[a]);
    }
  }
  return box;
}

/// compactly supported C-infinity profile; all derivatives vanish at the
/// support edge, so basis tails of products with it decay fast
double smooth_bump(double x, double center, double half_width) {
  const double t = (x - center) / half_width;
  const double s = 1.0 - t * t;
  if (!(s > 1e-12)) return 0.0;
  return std::exp(-t * t / s);
}

}  // namespace

double bump(double x, double center, double half_width, double height) {
  if (!(half_width > 0.0))
    throw std::invalid_argument("bump width must be positive");
  const double t = (x - center) / half_width;
  if (t <= -1.0 || t >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  const double s2 = s * s;
  return height * s2 * s2;
}

ScalarField bump_field(std::vector<double> center,
                       std::vector<double> half_width, double height) {
  if (center.size() != half_width.size() || center.empty())
    throw std::invalid_argument("bump center/width sizes disagree");
  return [center = std::move(center), half_width = std::move(half_width),
          height](std::span<const double> x) {
    double v = height;
    for (std::size_t a = 0; a < center.size(); ++a) {
      v *= bump(x[a], center[a], half_width[a], 1.0);
      if (v == 0.0) return 0.0;
    }
    return v;
  };
}

bool Box::contains(std::span<const double> x, double margin) const {
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (x[a] < lo[a] + margin || x[a] > hi[a] - margin) return false;
  return true;
}

GridFunction box_grid(const Box& box, int per_axis) {
  const auto d = static_cast<std::size_t>(box.dim());
  if (d == 0 || box.hi.size() != d)
    throw std::invalid_argument("box is malformed");
  if (per_axis < 1) throw std::invalid_argument("per_axis must be positive");
  std::vector<double> h(d);
  double cell = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(box.hi[a] > box.lo[a]))
      throw std::invalid_argument("box is empty");
    h[a] = (box.hi[a] - box.lo[a]) / per_axis;
    cell *= h[a];
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a)
    total *= static_cast<std::size_t>(per_axis);
  GridFunction g;
  g.dim = static_cast<int>(d);
  g.coords.resize(total * d);
  g.values.assign(total, 0.0);
  g.weights.assign(total, cell);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t a = 0; a < d; ++a)
      g.coords[p * d + a] =
          box.lo[a] + (static_cast<double>(digit[a]) + 0.5) * h[a];
    for (std::size_t a = d; a-- > 0;) {
      if (++digit[a] < static_cast<std::size_t>(per_axis)) break;
      digit[a] = 0;
    }
  }
  return g;
}

SigmaHarmonic make_sigma_harmonic(
    const std::shared_ptr<const SpectralSystem>& system, double sigma,
    const Box& region_o, const ScalarField& g, int scan_per_axis,
    double residual_tol, double negativity_tol) {
  check_sigma(sigma);
  if (!system) throw std::invalid_argument("system required");
  if (!system->positivity_preserving())
    throw std::invalid_argument(
        "system is not flagged positivity preserving");
  if (region_o.dim() != system->dim())
    throw std::invalid_argument("solve region dimension disagrees");

  SigmaHarmonic out;

  const GridFunction scan = system->scan_grid(scan_per_axis);
  double gsup = 0.0;
  for (std::size_t p = 0; p < scan.size(); ++p) {
    const double gv = g(scan.point(p));
    if (gv < -1e-12)
      throw std::invalid_argument("generator must be nonnegative");
    gsup = std::max(gsup, gv);
  }
  out.generator_sup = gsup;

  const GridFunction ogrid = box_grid(region_o, std::max(32, scan_per_axis));
  for (std::size_t p = 0; p < ogrid.size(); ++p)
    if (std::abs(g(ogrid.point(p))) > 1e-12 * std::max(gsup, 1.0))
      throw std::invalid_argument("generator support meets the solve region");

  const Coefficients ghat = system->analyze(g);
  out.parseval_defect = ghat.parseval_defect();
  out.f = neg_frac_power(ghat, sigma);

  // residual of L^sigma f against the generator, over the solve region
  // (the generator vanishes there, so this is |L^sigma f|)
  const Coefficients back = frac_power_spectral(out.f, sigma);
  const std::vector<double> rvals = system->synthesize_values(back, ogrid);
  for (std::size_t p = 0; p < rvals.size(); ++p)
    out.residual_sup = std::max(
        out.residual_sup, std::abs(rvals[p] - g(ogrid.point(p))));

  const std::vector<double> fvals = system->synthesize_values(out.f, scan);
  out.min_over_domain = *std::min_element(fvals.begin(), fvals.end());
  for (double v : fvals) out.sup_over_domain = std::max(out.sup_over_domain, std::abs(v));

  if (out.residual_sup > residual_tol * std::max(gsup, 1e-300)) {
    out.note = "residual";
  } else if (out.min_over_domain <
             -negativity_tol * std::max(out.sup_over_domain, 1e-300)) {
    out.note = "negative";
  } else {
    out.accepted = true;
  }
  return out;
}

RatioResult harnack_ratio(const Coefficients& f, const GridFunction& compact) {
  if (!f.system) throw std::invalid_argument("coefficients lack a system");
  const std::vector<double> vals = f.system->synthesize_values(f, compact);
  if (vals.empty()) throw std::invalid_argument("empty compact grid");
  RatioResult r;
  r.sup = *std::max_element(vals.begin(), vals.end());
  r.inf = *std::min_element(vals.begin(), vals.end());
  if (r.inf < -1e-12 * std::max(std::abs(r.sup), 1e-300))
    throw std::domain_error("function is negative on the compact region");
  if (r.sup > 0.0 && r.inf > 1e-14 * r.sup) {
    r.bounded = true;
    r.ratio = r.sup / r.inf;
  }
  return r;
}

SurveyReport run_survey(const SurveyConfig& config) {
  check_sigma(config.sigma);
  if (!config.system) throw std::invalid_argument("system required");
  const int d = config.system->dim();
  if (config.region_o.dim() != d || config.compact_k.dim() != d ||
      config.generators.dim() != d)
    throw std::invalid_argument("region dimensions disagree with the system");
  for (int a = 0; a < d; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (!(config.compact_k.lo[ua] > config.region_o.lo[ua] &&
          config.compact_k.hi[ua] < config.region_o.hi[ua]))
      throw std::invalid_argument("compact region must sit inside the solve region");
  }
  {
    // generator box disjoint from the solve region on some axis
    bool disjoint = false;
    for (int a = 0; a < d && !disjoint; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      disjoint = config.generators.hi[ua] <= config.region_o.lo[ua] ||
                 config.generators.lo[ua] >= config.region_o.hi[ua];
    }
    if (!disjoint)
      throw std::invalid_argument("generator region overlaps the solve region");
  }
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");

  SurveyReport rep;
  rep.sigma = config.sigma;
  rep.system_name = config.system->name();
  rep.seed = config.seed;
  rep.trials = config.trials;
  rep.records.resize(static_cast<std::size_t>(config.trials));

  const GridFunction kgrid =
      box_grid(config.compact_k, std::max(32, config.scan_per_axis));
  const auto du = static_cast<std::size_t>(d);

  parallel_for(rep.records.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      TrialRecord& rec = rep.records[t];
      rec.index = t;
      rng::Stream rs(config.seed + kGolden * (t + 1));
      rec.center.resize(du);
      rec.half_width.resize(du);
      for (std::size_t a = 0; a < du; ++a) {
        const double span =
            config.generators.hi[a] - config.generators.lo[a];
        const double margin = 0.05 * span;
        const double wmix = 0.85 * rng::halton(t, kHaltonPrimes[(a + du) % 6]) +
                            0.15 * rs.uniform();
        rec.half_width[a] = (0.10 + 0.30 * wmix) * span;
        const double cmix = 0.85 * rng::halton(t, kHaltonPrimes[a % 6]) +
                            0.15 * rs.uniform();
        const double clo = config.generators.lo[a] + margin + rec.half_width[a];
        const double chi = config.generators.hi[a] - margin - rec.half_width[a];
        rec.center[a] = clo + (chi - clo) * cmix;
      }
      rec.height = 0.5 + 1.5 * rs.uniform();

      SigmaHarmonic sh;
      try {
        sh = make_sigma_harmonic(config.system, config.sigma, config.region_o,
                                 bump_field(rec.center, rec.half_width, rec.height),
                                 config.scan_per_axis, config.residual_tol);
      } catch (const std::invalid_argument&) {
        rec.note = "support";
        continue;
      }
      rec.residual = sh.residual_sup;
      rec.min_f = sh.min_over_domain;
      if (!sh.accepted) {
        rec.note = sh.note;
        continue;
      }
      const RatioResult rr = harnack_ratio(sh.f, kgrid);
      rec.sup = rr.sup;
      rec.inf = rr.inf;
      if (!rr.bounded) {
        rec.note = "unbounded";
        continue;
      }
      rec.ratio = rr.ratio;
      rec.accepted = true;

      if (config.fd_every > 0 && d == 1 &&
          t % static_cast<std::size_t>(config.fd_every) == 0) {
        DegenerateGrid dg;
        dg.x_lo = config.region_o.lo[0];
        dg.x_hi = config.region_o.hi[0];
        dg.y_max = 0.5 * (dg.x_hi - dg.x_lo);
        dg.nx = config.fd_cells;
        dg.ny = config.fd_cells + (config.fd_cells % 2);
        const Coefficients& f = sh.f;
        const double sg = config.sigma;
        const auto sol = solve_degenerate_fd(
            dg, sg,
            [&](double x, double y) {
              return reflected_value(f, sg, std::span<const double>(&x, 1), y);
            },
            {});
        double fsup = 0.0, finf = std::numeric_limits<double>::infinity();
        const std::size_t jmid = sol.y_nodes.size() / 2;
        for (std::size_t i = 0; i < sol.x_nodes.size(); ++i) {
          if (sol.x_nodes[i] < config.compact_k.lo[0] ||
              sol.x_nodes[i] > config.compact_k.hi[0])
            continue;
          for (std::size_t j = jmid - 1; j <= jmid; ++j) {
            const double v = sol.value_at(i, j);
            fsup = std::max(fsup, v);
            finf = std::min(finf, v);
          }
        }
        if (finf > 0.0 && fsup > 0.0)
          rec.fd_ratio_gap = std::abs(fsup / finf - rec.ratio) / rec.ratio;
      }
    }
  });

  std::vector<double> accepted_ratios;
  for (const auto& rec : rep.records) {
    if (rec.accepted) {
      ++rep.accepted;
      accepted_ratios.push_back(rec.ratio);
      rep.c_emp = std::max(rep.c_emp, rec.ratio);
      if (rec.fd_ratio_gap >= 0.0) {
        ++rep.fd_checked;
        rep.fd_max_gap = std::max(rep.fd_max_gap, rec.fd_ratio_gap);
      }
    } else if (rec.note == "support") {
      ++rep.excluded_support;
    } else if (rec.note == "negative") {
      ++rep.excluded_negative;
    } else if (rec.note == "residual") {
      ++rep.excluded_residual;
    } else if (rec.note == "unbounded") {
      ++rep.excluded_unbounded;
    }
  }
  std::sort(accepted_ratios.begin(), accepted_ratios.end());
  rep.quartile1 = quartile(accepted_ratios, 0.25);
  rep.median = quartile(accepted_ratios, 0.50);
  rep.quartile3 = quartile(accepted_ratios, 0.75);
  return rep;
}

WindowStats window_stats(const Coefficients& f, double sigma, double window_lo,
                         double window_hi, int points) {
  check_sigma(sigma);
  if (!f.system) throw std::invalid_argument("coefficients lack a system");
  if (f.system->dim() != 1)
    throw std::invalid_argument("window statistics are one-dimensional");
  if (points < 2 || !(window_hi > window_lo))
    throw std::invalid_argument("window is malformed");
  GridFunction grid;
  grid.dim = 1;
  grid.coords.resize(static_cast<std::size_t>(points));
  grid.values.assign(static_cast<std::size_t>(points), 0.0);
  grid.weights.assign(static_cast<std::size_t>(points), 1.0);
  for (int i = 0; i < points; ++i)
    grid.coords[static_cast<std::size_t>(i)] =
        window_lo + (window_hi - window_lo) * i / (points - 1);
  const std::vector<double> fv = f.system->synthesize_values(f, grid);
  const std::vector<double> rv =
      f.system->synthesize_values(frac_power_spectral(f, sigma), grid);
  WindowStats s;
  double sum = 0.0, lo = fv[0], hi = fv[0];
  for (double v : fv) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.mean = sum / static_cast<double>(fv.size());
  s.oscillation = hi - lo;
  for (double v : rv) s.residual_sup = std::max(s.residual_sup, std::abs(v));
  return s;
}

LiouvilleReport liouville_check(double sigma, std::uint64_t seed,
                                double window) {
  check_sigma(sigma);
  if (!(window > 0.0)) throw std::invalid_argument("window must be positive");
  LiouvilleReport rep;
  rep.sigma = sigma;
  rep.window = window;
  const double radii[3] = {4.0, 8.0, 16.0};
  const ScalarField one = [](std::span<const double>) { return 1.0; };
  const ScalarField zero = [](std::span<const double>) { return 0.0; };
  for (int ri = 0; ri < 3; ++ri) {
    const double r = radii[ri];
    if (!(window < r - 2.0))
      throw std::invalid_argument("window too wide for the smallest domain");
    FdGridSpec gs;
    gs.dim = 1;
    gs.lo = {-r};
    gs.hi = {r};
    gs.cells = {static_cast<int>(16.0 * r)};
    const auto sys =
        make_divergence_form_fd(one, zero, gs, 1.0, FdBoundary::neumann);
    rng::Stream rs(seed + kGolden * static_cast<std::uint64_t>(ri + 1));
    const double h1 = 0.5 + 1.5 * rs.uniform();
    const double h2 = 0.5 + 1.5 * rs.uniform();
    const double c = r - 1.2;
    const ScalarField w = [c, h1, h2](std::span<const double> x) {
      return bump(x[0], -c, 0.8, h1) + bump(x[0], c, 0.8, h2);
    };
    const double t0 = r * r * r / 16.0;
    const Coefficients f = heat_semigroup(sys->analyze(w), t0);
    const WindowStats stats = window_stats(f, sigma, -window, window);
    rep.radii.push_back(r);
    const double mean = std::max(stats.mean, 1e-300);
    rep.osc_over_mean.push_back(stats.oscillation / mean);
    rep.residual_rel.push_back(stats.residual_sup / mean);
    rep.admitted.push_back(stats.residual_sup <= rep.admission_tol * mean);
  }
  rep.decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.radii.size(); ++i) {
    if (!rep.admitted[i]) continue;
    if (rep.osc_over_mean[i] >= prev) rep.decreasing = false;
    prev = rep.osc_over_mean[i];
  }
  return rep;
}

TouchTrialReport maximum_principle_trials(
    const std::shared_ptr<const SpectralSystem>& system, double sigma,
    int n_trials, std::uint64_t seed, double tol) {
  check_sigma(sigma);
  if (!system) throw std::invalid_argument("system required");
  if (!system->positivity_preserving())
    throw std::invalid_argument(
        "system is not flagged positivity preserving");
  if (n_trials < 1) throw std::invalid_argument("need at least one trial");

  const auto du = static_cast<std::size_t>(system->dim());
  const Box window = working_window(*system);
  const bool on_nodes = dynamic_cast<const FdSystem*>(system.get()) != nullptr;
  const GridFunction& nodes = system->quadrature_grid();

  TouchTrialReport rep;
  rep.trials = static_cast<std::size_t>(n_trials);
  std::vector<double> worst(static_cast<std::size_t>(n_trials), 0.0);

  parallel_for(worst.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      rng::Stream rs(seed + kGolden * (t + 1));
      // touch point: an interior spot (a grid node for difference systems)
      std::vector<double> x0(du);
      if (on_nodes) {
        // resample until the node sits well inside the window; a node at
        // the rim leaves no room for the separation profile and the trial
        // would compare identical fields
        std::vector<double> margin(du);
        for (std::size_t a = 0; a < du; ++a)
          margin[a] = 0.3 * (window.hi[a] - window.lo[a]);
        std::size_t pick = 0;
        for (int attempt = 0; attempt < 64; ++attempt) {
          const auto p = static_cast<std::size_t>(
              rs.uniform() * static_cast<double>(nodes.size()));
          pick = std::min(p, nodes.size() - 1);
          bool central = true;
          const auto xp = nodes.point(pick);
          for (std::size_t a = 0; a < du && central; ++a)
            central = xp[a] >= window.lo[a] + margin[a] &&
                      xp[a] <= window.hi[a] - margin[a];
          if (central) break;
        }
        const auto xp = nodes.point(pick);
        for (std::size_t a = 0; a < du; ++a) x0[a] = xp[a];
      } else {
        // stay in the central part of the window, where the truncated
        // basis resolves smooth compactly supported data well below the
        // trial tolerance
        for (std::size_t a = 0; a < du; ++a) {
          const double span = window.hi[a] - window.lo[a];
          x0[a] = window.lo[a] + span * (0.38 + 0.24 * rs.uniform());
        }
      }
      // separation above the obstacle: smooth_bump(x) * |x - x0|^2,
      // nonnegative with an exact zero at the touch point
      std::vector<double> bw(du);
      for (std::size_t a = 0; a < du; ++a) {
        const double room = std::min(x0[a] - window.lo[a],
                                     window.hi[a] - x0[a]);
        const double span = window.hi[a] - window.lo[a];
        bw[a] = std::min(0.9 * room, (0.09 + 0.05 * rs.uniform()) * span);
      }
      const ScalarField sep = [&x0, &bw, du](std::span<const double> x) {
        double b = 1.0;
        for (std::size_t a = 0; a < du; ++a) {
          b *= smooth_bump(x[a], x0[a], bw[a]);
          if (b == 0.0) return 0.0;
        }
        double r2 = 0.0;
        for (std::size_t a = 0; a < du; ++a) {
          const double dx = x[a] - x0[a];
          r2 += dx * dx;
        }
        return b * r2;
      };
      // obstacle: a free smooth field (signed bumps)
      struct GBump {
        std::vector<double> c, w;
        double h;
      };
      std::vector<GBump> gbumps(3);
      for (auto& gb : gbumps) {
        gb.c.resize(du);
        gb.w.resize(du);
        for (std::size_t a = 0; a < du; ++a) {
          const double span = window.hi[a] - window.lo[a];
          gb.c[a] = window.lo[a] + span * (0.15 + 0.7 * rs.uniform());
          gb.w[a] = span * (0.08 + 0.2 * rs.uniform());
        }
        gb.h = rs.uniform(-1.5, 1.5);
      }
      const ScalarField gfield = [&gbumps, du](std::span<const double> x) {
        double v = 0.0;
        for (const auto& gb : gbumps) {
          double b = gb.h;
          for (std::size_t a = 0; a < du; ++a) {
            b *= bump(x[a], gb.c[a], gb.w[a], 1.0);
            if (b == 0.0) break;
          }
          v += b;
        }
        return v;
      };
      const ScalarField ffield = [&gfield, &sep](std::span<const double> x) {
        return gfield(x) + sep(x);
      };
      const Coefficients lf =
          frac_power_spectral(system->analyze(ffield), sigma);
      const Coefficients lg =
          frac_power_spectral(system->analyze(gfield), sigma);
      worst[t] = system->synthesize_at(lf, x0) - system->synthesize_at(lg, x0);
    }
  });

  rep.worst = -std::numeric_limits<double>::infinity();
  for (double w : worst) {
    rep.worst = std::max(rep.worst, w);
    if (w > tol) ++rep.violations;
  }
  return rep;
}

}  // namespace fracspec
