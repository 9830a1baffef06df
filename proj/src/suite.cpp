#include "helgason/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "helgason/bargmann.hpp"
#include "helgason/parallel.hpp"
#include "helgason/radon.hpp"
#include "helgason/sphere.hpp"

namespace helgason {

namespace {

using std::numbers::pi;
using ojson = nlohmann::ordered_json;

// splitmix64 stream, as in the stability sweeps.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ^ 0x5851f42d4c957f2dULL) {}
  double operator()() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + (b - a) * (*this)(); }
  Vec in_ball(int dim, double r) {
    for (;;) {
      Vec v{uniform(-1, 1), uniform(-1, 1), dim == 3 ? uniform(-1, 1) : 0.0};
      if (dot(v, v) <= 1.0) return r * v;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PhantomSpec ball_spec(int dim, Vec c, double r) {
  PhantomSpec s;
  s.kind = PhantomKind::ball_indicator;
  s.dim = dim;
  s.center = c;
  s.radius = r;
  return s;
}

PhantomSpec bump_spec(int dim, Vec c, double r) {
  PhantomSpec s = ball_spec(dim, c, r);
  s.kind = PhantomKind::smooth_bump;
  return s;
}

PhantomSpec gaussian_spec(int dim, Vec c, double sigma, double trunc) {
  PhantomSpec s = ball_spec(dim, c, sigma);
  s.kind = PhantomKind::gaussian_truncated;
  s.truncation_radius = trunc;
  return s;
}

PhantomSpec cut_ball_spec(int dim, double amplitude) {
  PhantomSpec s = ball_spec(dim, {-0.5, 0, 0}, 1.0);
  s.kind = PhantomKind::halfspace_cut_ball;
  s.amplitude = amplitude;
  s.cut = std::make_pair(Vec{0, 0, 0}, Vec{1, 0, 0});
  return s;
}

// The smooth suite of the transform identity.
std::vector<PhantomSpec> smooth_suite(int dim) {
  return {gaussian_spec(dim, {0.2, -0.1, dim == 3 ? 0.1 : 0.0}, 0.6, 3.6),
          bump_spec(dim, {0.1, 0.2, dim == 3 ? -0.1 : 0.0}, 1.0)};
}

Constants unit_constants() {
  Constants c;
  for (PerDim* p : {&c.kernel_b, &c.helgason_c, &c.refined_c, &c.deconv_c, &c.theorem_c, &c.sobolev_k}) {
    p->n2 = 1.0;
    p->n3 = 1.0;
  }
  c.sobolev_k.n2 = sobolev_gaussian_ratio(2, 1.0);
  c.sobolev_k.n3 = sobolev_gaussian_ratio(3, 1.0);
  return c;
}

CriterionResult criterion(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

void metric(CriterionResult& r, const std::string& name, double v) { r.metrics.emplace_back(name, v); }

// Criterion 5 geometry: a bump inside the cone on the far side of y0.
struct DecaySetup {
  PhantomSpec phantom = bump_spec(2, {3, 0, 0}, 0.5);
  RestrictedWindow window{{0, 0, 0}, {1, 0, 0}, 0.5, 0.5};
  double gamma = 2.0;
  ComplexPoint z0{2, {0, 0, 0}, {2, 0, 0}};
  std::vector<double> h_grid = geometric_h_grid(0.5, 0.05, 8);
};

struct DecayMeasurement {
  double I = 0.0;
  double X = 0.0;
  SmallnessFit fit;
  std::vector<double> shape;  // Helgason bound with C = 1 at each h
};

DecayMeasurement measure_decay(const DecaySetup& d) {
  const SampledField f = make_phantom(d.phantom);
  const Sinogram g = radon(f, d.window.y0, 129, uniform_circle(256));
  DecayMeasurement m;
  m.I = restricted_integral(g, d.window);
  m.X = x_norm(g);
  m.fit = fit_exponential_smallness(f, d.z0, d.h_grid);
  for (double h : d.h_grid) m.shape.push_back(helgason_rhs(m.I, m.X, d.z0, h, d.window, d.gamma, 1.0).bound);
  return m;
}

// Criterion 8 setup: smooth and indicator phantoms with a fixed open set G.
struct DeconvCase {
  PhantomSpec phantom;
  bool smooth = false;
};

const Ball kDeconvG{{0.2, 0.1, 0.0}, 0.5};
const std::vector<double> kDeconvH{1.0, 0.5, 0.25, 0.125};

struct DeconvMeasurement {
  double measured = 0.0;
  double L_q = 0.0;
  std::vector<double> transform;  // ||T_h q||_{L^2(G)} per h
  double convergence_error = 0.0;
};

DeconvMeasurement measure_deconv(const DeconvCase& c, SuiteKind kind) {
  const SampledField q = make_phantom(c.phantom);
  DeconvMeasurement m;
  m.measured = lp_norm(q, kDeconvG, 2.0);
  BesovOptions bo;
  if (kind == SuiteKind::smoke) bo = {6, 6, 8, 1e-4};
  m.L_q = besov_seminorm(q, 0.4, 2.0, bo);
  const BallRule rule = polar_ball_rule(2, kDeconvG, kind == SuiteKind::full ? 8 : 5, kind == SuiteKind::full ? 16 : 10);
  for (double h : kDeconvH) m.transform.push_back(transform_lp(q, kDeconvG, h, 2.0, rule));
  if (c.smooth) {
    const double h = 0.01;
    const BallRule fine = polar_ball_rule(2, kDeconvG, 8, 16);
    const double t = transform_lp(q, kDeconvG, h, 2.0, fine) / (2.0 * pi * h);
    double direct = 0.0;
    for (std::size_t k = 0; k < fine.nodes.size(); ++k) direct += fine.weights[k] * std::pow(q(fine.nodes[k]), 2);
    m.convergence_error = std::abs(t - std::sqrt(direct)) / std::sqrt(direct);
  }
  return m;
}

std::vector<DeconvCase> deconv_cases() {
  return {{bump_spec(2, {0.1, 0.05, 0}, 1.5), true}, {ball_spec(2, {0, 0, 0}, 1.0), false}};
}

// --- criteria ----------------------------------------------------------------

CriterionResult sinogram_accuracy(SuiteKind kind) {
  CriterionResult r = criterion(1, "analytic sinograms of unit balls");
  r.budget_seconds = 30.0;
  const int ns = kind == SuiteKind::full ? 201 : 101;
  bool ok = true;
  for (int n : {2, 3}) {
    const SampledField f = make_phantom(ball_spec(n, {}, 1.0));
    const Sinogram g = radon(f, {}, ns, default_directions(n, kind == SuiteKind::full ? 64 : 32));
    std::size_t cells = 0, good = 0;
    double worst = 0.0;
    for (std::size_t j = 0; j < g.ndir(); ++j)
      for (std::size_t i = 0; i < g.ns(); ++i) {
        const double s = g.s[i];
        if (std::abs(s) > 0.95) continue;
        const double want = n == 2 ? 2.0 * std::sqrt(1.0 - s * s) : pi * (1.0 - s * s);
        const double err = std::abs(g.at(j, i) - want) / want;
        worst = std::max(worst, err);
        ++cells;
        if (err <= 1e-3) ++good;
      }
    const double frac = static_cast<double>(good) / static_cast<double>(cells);
    metric(r, "n" + std::to_string(n) + "_fraction_within_1e-3", frac);
    metric(r, "n" + std::to_string(n) + "_max_rel_error", worst);
    ok = ok && frac >= 0.95;
  }
  r.pass = ok;
  return r;
}

CriterionResult transform_identity(SuiteKind kind, std::uint64_t seed) {
  CriterionResult r = criterion(2, "transform from Radon data matches direct quadrature");
  r.budget_seconds = 300.0;
  const std::vector<double> hs = kind == SuiteKind::full ? std::vector<double>{0.1, 0.25, 0.5, 1.0}
                                                         : std::vector<double>{0.25, 1.0};
  const int per_case = kind == SuiteKind::full ? 50 : 8;
  const std::vector<int> dims = kind == SuiteKind::full ? std::vector<int>{2, 3} : std::vector<int>{2};
  Rng rng(seed + 2);
  double worst = 0.0;
  std::size_t evaluations = 0;
  for (int n : dims) {
    for (const PhantomSpec& spec : smooth_suite(n)) {
      const SampledField f = make_phantom(spec);
      const Sinogram g = n == 2 ? radon(f, {}, 129, uniform_circle(256)) : radon(f, {}, 65, gauss_product_sphere(288));
      for (double h : hs) {
        std::vector<ComplexPoint> pts(static_cast<std::size_t>(per_case));
        for (ComplexPoint& z : pts) {
          z.dim = n;
          z.re = spec.center + rng.in_ball(n, 1.0);
          z.im = rng.in_ball(n, std::sqrt(2.0 * h));
        }
        std::vector<double> err(pts.size());
        parallel_for(pts.size(), [&](std::size_t k) {
          const cplx a = sb_from_radon(g, pts[k], h);
          const cplx b = sb_direct(f, pts[k], h, 1e-7);
          err[k] = std::abs(a - b) / std::abs(b);
        });
        for (double e : err) worst = std::max(worst, e);
        evaluations += err.size();
      }
    }
  }
  metric(r, "evaluations", static_cast<double>(evaluations));
  metric(r, "max_rel_error", worst);
  r.pass = worst <= 1e-4;
  return r;
}

CriterionResult kernel_suite(SuiteKind kind, const Constants& k, std::uint64_t seed) {
  CriterionResult r = criterion(3, "kernel bound, kernel relations and odd-even agreement");
  const int per_axis = kind == SuiteKind::full ? 10 : 6;
  bool ok = true;
  for (int n : {2, 3}) {
    // Offset from the calibration lattice so no node is reused.
    const double ratio = kernel_ratio_max(n, per_axis, 9.7, 4.8, 0.07, 0.97);
    metric(r, "n" + std::to_string(n) + "_bound_ratio_over_B", ratio / k.kernel_b.at(n));
    ok = ok && ratio <= k.kernel_b.at(n);
  }
  Rng rng(seed + 3);
  double rel = 0.0, odd = 0.0;
  const int count = kind == SuiteKind::full ? 200 : 40;
  for (int i = 0; i < count; ++i) {
    const double s = rng.uniform(-4, 4), h = rng.uniform(0.1, 1.0);
    const cplx w{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    for (int n : {2, 3}) {
      const cplx g = kernel_g(n, s, w, h);
      const double scale = kernel_bound_shape(n, s, w, h);
      rel = std::max(rel, std::abs(g - kernel_g(n, s - w.real(), cplx(0.0, w.imag()), h)) / scale);
      rel = std::max(rel, std::abs(std::conj(g) - kernel_g(n, s, std::conj(w), h)) / scale);
      rel = std::max(rel, std::abs(std::conj(g) - kernel_g(n, -s, -std::conj(w), h)) / scale);
    }
    odd = std::max(odd, std::abs(kernel_g(3, s, w, h) - kernel_g_integral(3, s, w, h)) / kernel_bound_shape(3, s, w, h));
  }
  metric(r, "relation_max_error", rel);
  metric(r, "odd_even_max_error", odd);
  r.pass = ok && rel <= 1e-9 && odd <= 1e-8;
  return r;
}

CriterionResult exact_bounds(SuiteKind kind, std::uint64_t seed) {
  CriterionResult r = criterion(4, "growth and support-side bounds with explicit constants");
  Rng rng(seed + 4);
  std::size_t checks = 0, failures = 0;
  double worst = 0.0;
  const std::vector<int> dims = kind == SuiteKind::full ? std::vector<int>{2, 3} : std::vector<int>{2};
  for (int n : dims) {
    const int count = n == 2 ? (kind == SuiteKind::full ? 40 : 12) : 6;
    std::vector<PhantomSpec> specs = smooth_suite(n);
    specs.push_back(cut_ball_spec(n, 1.0));
    for (const PhantomSpec& spec : specs) {
      const SampledField f = make_phantom(spec);
      std::vector<std::pair<ComplexPoint, double>> pts(static_cast<std::size_t>(count));
      for (auto& [z, h] : pts) {
        z.dim = n;
        z.re = spec.center + rng.in_ball(n, 2.5);
        z.im = rng.in_ball(n, 1.5);
        h = rng.uniform(0.05, 1.0);
      }
      std::vector<BoundCheck> growth(pts.size()), side(pts.size());
      parallel_for(pts.size(), [&](std::size_t i) {
        growth[i] = growth_bound_check(f, pts[i].first, pts[i].second);
        if (f.halfspace()) side[i] = support_side_bound_check(f, pts[i].first, pts[i].second);
      });
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (const BoundCheck* c : {&growth[i], f.halfspace() ? &side[i] : nullptr}) {
          if (!c) continue;
          ++checks;
          if (!c->holds) ++failures;
          if (c->rhs > 0.0) worst = std::max(worst, c->lhs / c->rhs);
        }
      }
    }
  }
  metric(r, "checks", static_cast<double>(checks));
  metric(r, "failures", static_cast<double>(failures));
  metric(r, "max_lhs_over_rhs", worst);
  r.pass = failures == 0;
  return r;
}

CriterionResult decay_experiment(const Constants& k) {
  CriterionResult r = criterion(5, "exponential decay when the window misses the support");
  r.budget_seconds = 120.0;
  const DecaySetup d;
  const DecayMeasurement m = measure_decay(d);
  const double rate = helgason_decay_rate(d.window, d.gamma);
  double lo = INFINITY, hi = -INFINITY;
  bool bound_ok = true;
  for (std::size_t i = 0; i < d.h_grid.size(); ++i) {
    const double v = std::log(std::max(m.fit.weighted[i], 1e-300));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    bound_ok = bound_ok && m.fit.weighted[i] <= k.helgason_c.at(2) * m.shape[i];
  }
  const double rel_residual = m.fit.residual / std::max(hi - lo, 1e-300);
  metric(r, "I", m.I);
  metric(r, "fitted_rate", m.fit.c);
  metric(r, "bound_rate", rate);
  metric(r, "relative_fit_residual", rel_residual);
  metric(r, "bound_holds_at_every_h", bound_ok ? 1.0 : 0.0);
  r.pass = m.I == 0.0 && !m.fit.vacuous && m.fit.c >= 0.9 * rate && rel_residual <= 0.1 && bound_ok;
  return r;
}

CriterionResult certificate_criterion(const std::vector<ExperimentConfig>& configs,
                                      const std::vector<StabilityReport>& reports, const Constants& k) {
  CriterionResult r = criterion(6, "subharmonic certificate");
  std::size_t evaluated = 0, passed = 0, samples = 0;
  for (const StabilityReport& rep : reports) {
    if (!rep.lemma26_holds) continue;
    ++evaluated;
    if (*rep.lemma26_holds) ++passed;
    samples += rep.certificate_samples;
  }
  metric(r, "certified_runs", static_cast<double>(evaluated));
  metric(r, "passing_runs", static_cast<double>(passed));
  metric(r, "samples", static_cast<double>(samples));

  // One corrupted sample must be rejected.
  bool rejected = false;
  for (std::size_t i = 0; i < reports.size() && !rejected; ++i) {
    if (!reports[i].h_star) continue;
    const ExperimentConfig& c = configs[i];
    const SampledField q = make_phantom(c.phantom);
    const RectangleDomain rect = refined_rectangle(c.window.alpha, c.window.beta);
    GridFunction phi = build_phi(q, c.window, default_w_slices(c.phantom.dim, c.window).front(), *reports[i].h_star,
                                 reports[i].M, k.helgason_c.at(c.phantom.dim), rectangle_grid(rect, 5, 7));
    const bool clean = subharmonic_certificate(phi, rect).holds;
    phi.at(phi.x.size() / 2, 0) = 0.0;
    rejected = clean && !subharmonic_certificate(phi, rect).holds;
  }
  metric(r, "corrupted_rejected", rejected ? 1.0 : 0.0);

  // delta against an independent evaluation with std::cosh.
  double delta_err = 0.0;
  for (double a : {0.25, 1.0, 2.0})
    for (double b : {0.5, 1.0, 3.0})
      for (double lam : {0.125, 1.0, 4.0}) {
        RectangleDomain d;
        d.a = a;
        d.b = b;
        d.lambda = lam;
        const double want = std::min(lam / (2.0 * a * std::cosh(pi * b / a)), a / 3.0);
        delta_err = std::max(delta_err, std::abs(d.delta() - want) / want);
      }
  metric(r, "delta_max_rel_error", delta_err);
  r.pass = evaluated > 0 && passed == evaluated && rejected && delta_err <= 1e-12;
  return r;
}

CriterionResult log_stability(const std::vector<ExperimentConfig>& configs,
                              const std::vector<StabilityReport>& reports) {
  CriterionResult r = criterion(7, "log stability along the amplitude sweep");
  r.budget_seconds = 600.0;
  const auto eps = amplitude_sweep();
  double I1 = 0.0, lin = 0.0;
  bool ok = true;
  std::size_t found = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    if (c.phantom.dim != 2 || c.window.beta != 1.0) continue;
    const StabilityReport& rep = reports[i];
    const double e = c.phantom.amplitude;
    if (e == 1.0) I1 = rep.I;
    ++found;
    ok = ok && rep.applicable && rep.thm25_holds.value_or(false);
    std::ostringstream name;
    name << "eps_" << e;
    metric(r, name.str() + "_abs_log_I", std::abs(std::log(rep.I)));
    metric(r, name.str() + "_measured", rep.measured_lp_G);
    metric(r, name.str() + "_bound", rep.bound_thm25);
  }
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    if (c.phantom.dim != 2 || c.window.beta != 1.0 || I1 == 0.0) continue;
    lin = std::max(lin, std::abs(reports[i].I / c.phantom.amplitude - I1) / I1);
  }
  metric(r, "I_linearity_max_rel_error", lin);
  r.pass = ok && found == eps.size() && I1 > 0.0 && lin <= 1e-3;
  return r;
}

CriterionResult deconvolution(SuiteKind kind, const Constants& k) {
  CriterionResult r = criterion(8, "Gaussian deconvolution bound");
  bool ok = true;
  double conv = 0.0;
  for (const DeconvCase& c : deconv_cases()) {
    const DeconvMeasurement m = measure_deconv(c, kind);
    for (std::size_t i = 0; i < kDeconvH.size(); ++i) {
      const double b = gaussian_deconv_bound(m.transform[i], m.L_q, kDeconvH[i], 0.4, 2, k.deconv_c.at(2));
      ok = ok && m.measured <= b;
    }
    if (c.smooth) conv = std::max(conv, m.convergence_error);
    metric(r, std::string(c.smooth ? "smooth" : "indicator") + "_measured", m.measured);
    metric(r, std::string(c.smooth ? "smooth" : "indicator") + "_L_q", m.L_q);
  }
  metric(r, "bound_holds_at_every_h", ok ? 1.0 : 0.0);
  metric(r, "convergence_rel_error_h0.01", conv);
  r.pass = ok && conv <= 0.02;
  return r;
}

CriterionResult sobolev(SuiteKind kind, const Constants& k) {
  CriterionResult r = criterion(9, "Radon Sobolev estimate");
  bool ok = true;
  double worst = 0.0;
  const std::vector<int> dims = kind == SuiteKind::full ? std::vector<int>{2, 3} : std::vector<int>{2};
  for (int n : dims) {
    std::vector<PhantomSpec> specs{gaussian_spec(n, {}, 0.6, 3.9), gaussian_spec(n, {}, 0.9, 5.85),
                                   ball_spec(n, {}, 1.0), bump_spec(n, {0.2, 0, 0}, 1.0)};
    const DirectionSet dirs = default_directions(n, n == 2 ? 64 : 128);
    for (const PhantomSpec& s : specs) {
      const SampledField q = make_phantom(s);
      const double v = radon_sobolev_norm(radon(q, {}, n == 2 ? 257 : 129, dirs), k.sobolev_k.at(n));
      const double l2 = std::pow(lp_norm(q, 2.0), 2);
      worst = std::max(worst, v / l2);
      ok = ok && v <= l2;
    }
  }
  metric(r, "max_ratio_to_L2_squared", worst);
  r.pass = ok;
  return r;
}

}  // namespace

std::string to_string(SuiteKind k) { return k == SuiteKind::full ? "full" : "smoke"; }

SuiteKind suite_kind_from_string(const std::string& s) {
  if (s == "full") return SuiteKind::full;
  if (s == "smoke") return SuiteKind::smoke;
  throw ValidationError("suite must be smoke or full, got \"" + s + "\"");
}

bool SuiteResult::pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

std::vector<double> amplitude_sweep() { return {1.0, 1e-2, 1e-4, 1e-6}; }

std::vector<ExperimentConfig> reference_configs(SuiteKind kind, std::uint64_t seed) {
  const bool full = kind == SuiteKind::full;
  ExperimentConfig base;
  base.window = RestrictedWindow{{0, 0, 0}, {1, 0, 0}, 1.0, 1.0};
  base.seed = seed;
  if (full) {
    base.res.sweep_points = 250;
  } else {
    base.res.ns = 129;
    base.res.ndir = 128;
    base.res.sweep_points = 16;
    base.res.region_points = 4;
    base.res.phi_nx = 5;
    base.res.phi_ny = 9;
    base.res.g_radial = 4;
    base.res.g_angular = 8;
    base.res.besov = {6, 6, 8, 1e-4};
  }
  std::vector<ExperimentConfig> out;
  for (double e : amplitude_sweep()) {
    ExperimentConfig c = base;
    std::ostringstream name;
    name << "cut-ball-eps-" << e;
    c.name = name.str();
    c.phantom = cut_ball_spec(2, e);
    out.push_back(c);
  }
  ExperimentConfig narrow = base;
  narrow.name = "cut-ball-narrow-cap";
  narrow.phantom = cut_ball_spec(2, 1e-4);
  narrow.window.beta = 0.5;
  out.push_back(narrow);
  if (full) {
    ExperimentConfig c3 = base;
    c3.name = "cut-ball-3d";
    c3.phantom = cut_ball_spec(3, 1e-4);
    c3.res.ns = 65;
    c3.res.ndir = 288;
    c3.res.sweep_points = 16;
    c3.res.region_points = 4;
    c3.res.phi_nx = 3;
    c3.res.phi_ny = 7;
    c3.res.g_radial = 2;
    c3.res.g_angular = 8;
    c3.res.besov = {4, 4, 6, 1e-4, 1e-4};
    out.push_back(c3);
  }
  return out;
}

SuiteResult run_suite(SuiteKind kind, const Constants& constants, std::uint64_t seed, const Progress& progress) {
  SuiteResult out;
  out.kind = kind;
  out.constants_version = constants.version;
  out.seed = seed;
  auto run = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult c = fn();
    c.seconds = seconds_since(t0);
    if (progress) progress("criterion " + std::to_string(c.id) + (c.pass ? " pass" : " FAIL"));
    out.criteria.push_back(std::move(c));
  };
  run([&] { return sinogram_accuracy(kind); });
  run([&] { return transform_identity(kind, seed); });
  run([&] { return kernel_suite(kind, constants, seed); });
  run([&] { return exact_bounds(kind, seed); });
  run([&] { return decay_experiment(constants); });

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ExperimentConfig> configs = reference_configs(kind, seed);
  for (const ExperimentConfig& c : configs) {
    out.reports.push_back(run_experiment(c, constants));
    if (progress) progress("reference run " + c.name + (out.reports.back().all_flags_true() ? " all flags true" : ""));
  }
  const double ref_seconds = seconds_since(t0);
  run([&] { return certificate_criterion(configs, out.reports, constants); });
  run([&] {
    CriterionResult c = log_stability(configs, out.reports);
    return c;
  });
  // The reference runs are shared by criteria 6 and 7; their time counts
  // against the end-to-end budget.
  out.criteria.back().seconds += ref_seconds;
  run([&] { return deconvolution(kind, constants); });
  run([&] { return sobolev(kind, constants); });
  return out;
}

std::string suite_to_json(const SuiteResult& r) {
  ojson j;
  j["schema"] = 1;
  j["suite"] = to_string(r.kind);
  j["constants_version"] = r.constants_version;
  j["seed"] = r.seed;
  j["pass"] = r.pass();
  auto crit = ojson::array();
  for (const CriterionResult& c : r.criteria) {
    ojson e;
    e["id"] = c.id;
    e["title"] = c.title;
    e["pass"] = c.pass;
    ojson m;
    for (const auto& [k, v] : c.metrics) m[k] = v;
    e["metrics"] = m;
    crit.push_back(e);
  }
  j["criteria"] = crit;
  auto reps = ojson::array();
  for (const StabilityReport& s : r.reports) reps.push_back(ojson::parse(report_to_json(s)));
  j["reports"] = reps;
  return j.dump(2) + "\n";
}

double kernel_ratio_max(int n, int per_axis, double s_max, double w_max, double h_min, double h_max) {
  if (per_axis < 2) throw ValidationError("lattice needs at least two points per axis");
  auto node = [per_axis](double lo, double hi, int i) { return lo + (hi - lo) * i / (per_axis - 1); };
  const std::size_t total = static_cast<std::size_t>(per_axis) * per_axis * per_axis * per_axis;
  std::vector<double> ratio(total);
  parallel_for(total, [&](std::size_t idx) {
    std::size_t t = idx;
    const int i = static_cast<int>(t % per_axis);
    t /= per_axis;
    const int j = static_cast<int>(t % per_axis);
    t /= per_axis;
    const int l = static_cast<int>(t % per_axis);
    const int m = static_cast<int>(t / per_axis);
    const double s = node(-s_max, s_max, i);
    const cplx w{node(-w_max, w_max, j), node(-w_max, w_max, l)};
    const double h = node(h_min, h_max, m);
    ratio[idx] = std::abs(kernel_g(n, s, w, h)) / kernel_bound_shape(n, s, w, h);
  });
  return *std::max_element(ratio.begin(), ratio.end());
}

Constants calibrate(std::uint64_t seed, const Progress& progress) {
  Constants c = unit_constants();
  c.seed = seed;
  c.margin = 1.25;
  auto note = [&](const std::string& s) {
    if (progress) progress(s);
  };
  for (int n : {2, 3}) {
    c.kernel_b.at(n) = c.margin * kernel_ratio_max(n, 17, 10.0, 5.0, 0.05, 1.0);
    note("kernel constant n=" + std::to_string(n));
  }

  const Constants unit = unit_constants();
  PerDim r23, r27, r29, rthm;
  auto raise = [](PerDim& p, int n, double v) {
    if (std::isfinite(v)) p.at(n) = std::max(p.at(n), v);
  };
  for (const ExperimentConfig& cfg : reference_configs(SuiteKind::full, seed)) {
    const StabilityReport rep = run_experiment(cfg, unit);
    const int n = cfg.phantom.dim;
    for (const DecayPoint& d : rep.decay)
      if (d.bound > 0.0) raise(r23, n, d.measured / d.bound);
    if (rep.bound_prop27 && *rep.bound_prop27 > 0.0) raise(r27, n, rep.measured_prop27 / *rep.bound_prop27);
    if (rep.bound_lemma29 && *rep.bound_lemma29 > 0.0) raise(r29, n, rep.measured_lemma29 / *rep.bound_lemma29);
    if (rep.bound_thm25 > 0.0) raise(rthm, n, rep.measured_lp_G / rep.bound_thm25);
    note("reference run " + cfg.name);
  }

  const DecaySetup d;
  const DecayMeasurement m = measure_decay(d);
  for (std::size_t i = 0; i < d.h_grid.size(); ++i)
    if (m.shape[i] > 0.0) raise(r23, 2, m.fit.weighted[i] / m.shape[i]);
  note("decay experiment");

  for (const DeconvCase& dc : deconv_cases()) {
    const DeconvMeasurement dm = measure_deconv(dc, SuiteKind::full);
    for (std::size_t i = 0; i < kDeconvH.size(); ++i)
      raise(r29, 2, dm.measured / gaussian_deconv_bound(dm.transform[i], dm.L_q, kDeconvH[i], 0.4, 2, 1.0));
  }
  note("deconvolution suite");

  for (int n : {2, 3}) {
    c.helgason_c.at(n) = c.margin * r23.at(n);
    c.refined_c.at(n) = c.margin * r27.at(n);
    c.deconv_c.at(n) = c.margin * r29.at(n);
    c.theorem_c.at(n) = c.margin * rthm.at(n);
    for (const PerDim* p : {&c.helgason_c, &c.refined_c, &c.deconv_c, &c.theorem_c})
      if (!(p->at(n) > 0.0)) throw ConvergenceError("calibration produced no ratio for n = " + std::to_string(n));
  }
  seal(c);
  return c;
}

}  // namespace helgason
