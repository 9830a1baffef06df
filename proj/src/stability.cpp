#include "helgason/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "helgason/io.hpp"
#include "helgason/parallel.hpp"
#include "helgason/sphere.hpp"

namespace helgason {

namespace {

using std::numbers::pi;
using ojson = nlohmann::ordered_json;

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}

void check_h_unit(double h) {
  if (!std::isfinite(h) || !(h > 0.0) || h > 1.0)
    throw ValidationError("h must lie in (0, 1] (got " + std::to_string(h) + ")");
}

// Portable uniform doubles in [0, 1) from a 64-bit engine.
struct Uniform {
  std::uint64_t state;
  explicit Uniform(std::uint64_t seed) : state(seed * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL) {}
  double operator()() {
    // splitmix64
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
};

// Two unit vectors completing omega to an orthonormal frame (only the first
// is used in two dimensions).
std::pair<Vec, Vec> perp_frame(int dim, const Vec& omega) {
  if (dim == 2) return {Vec{-omega[1], omega[0], 0.0}, Vec{}};
  const Vec seed = std::abs(omega[0]) < 0.9 ? Vec{1, 0, 0} : Vec{0, 1, 0};
  Vec e1 = seed - dot(seed, omega) * omega;
  e1 = (1.0 / norm(e1)) * e1;
  return {e1, cross(omega, e1)};
}

Vec random_perp(int dim, const Vec& omega, Uniform& u) {
  auto [e1, e2] = perp_frame(dim, omega);
  if (dim == 2) return u() < 0.5 ? e1 : -1.0 * e1;
  const double t = 2.0 * pi * u();
  return std::cos(t) * e1 + std::sin(t) * e2;
}

Vec random_unit(int dim, Uniform& u) {
  if (dim == 2) {
    const double t = 2.0 * pi * u();
    return {std::cos(t), std::sin(t), 0.0};
  }
  const double z = 2.0 * u() - 1.0;
  const double t = 2.0 * pi * u();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(t), r * std::sin(t), z};
}

double weighted_at(const SampledField& q, const ComplexPoint& z, double h) {
  return sb_direct_sample(q, z, h, q.dim() == 3 ? 1e-7 : 1e-9).weighted;
}

}  // namespace

// ---------------------------------------------------------------------------

bool helgason_admissible(const ComplexPoint& z, const RestrictedWindow& w, double gamma) {
  const double im = z.im_norm();
  if (im == 0.0 || im < gamma) return false;
  if (!(norm(z.re - w.y0) < 0.5 * w.alpha)) return false;
  const double c = dot(w.omega0, z.im) / im;
  return c * c > 1.0 - 0.25 * w.beta * w.beta;
}

double helgason_decay_rate(const RestrictedWindow& w, double gamma) {
  return std::min(w.alpha * w.alpha / 8.0, gamma * gamma * w.beta * w.beta / 32.0);
}

HelgasonRhs helgason_rhs(double I, double x_norm_val, const ComplexPoint& z, double h, const RestrictedWindow& w,
                         double gamma, double C) {
  check_h_unit(h);
  check_positive(gamma, "gamma");
  z.validate();
  w.validate(z.dim);
  if (!(I >= 0.0) || !(x_norm_val >= 0.0)) throw ValidationError("I and the X norm must be nonnegative");
  const int n = z.dim;
  const double zn = std::sqrt(dot(z.re, z.re) + dot(z.im, z.im));
  const double decay = std::exp(-w.alpha * w.alpha / (8.0 * h)) +
                       std::exp(-gamma * gamma * w.beta * w.beta / (32.0 * h));
  HelgasonRhs out;
  out.bound = C * std::pow(h, -0.5 * n) * std::pow(1.0 + zn + norm(w.y0), n) * (I + x_norm_val * decay);
  out.admissible = helgason_admissible(z, w, gamma);
  return out;
}

std::vector<ComplexPoint> admissible_sweep(int dim, const RestrictedWindow& w, double gamma, int count,
                                           std::uint64_t seed) {
  w.validate(dim);
  check_positive(gamma, "gamma");
  if (count < 1) throw ValidationError("sweep needs at least one point");
  Uniform u(seed);
  const double cmin = std::sqrt(1.0 - 0.25 * w.beta * w.beta);
  std::vector<ComplexPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    ComplexPoint z;
    z.dim = dim;
    const double r = 0.49 * w.alpha * std::pow(u(), 1.0 / dim);
    z.re = w.y0 + r * random_unit(dim, u);
    const double c = cmin + (1.0 - cmin) * (0.02 + 0.98 * u());
    const double sgn = u() < 0.5 ? 1.0 : -1.0;
    const Vec theta = (sgn * c) * w.omega0 + std::sqrt(std::max(0.0, 1.0 - c * c)) * random_perp(dim, w.omega0, u);
    z.im = (gamma * (1.0 + 0.5 * u())) * theta;
    out.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------

void RectangleDomain::validate() const {
  check_positive(a, "rectangle a");
  check_positive(b, "rectangle b");
  check_positive(eps, "rectangle eps");
  check_positive(lambda, "rectangle lambda");
}

double RectangleDomain::delta() const {
  validate();
  return std::min(lambda / (2.0 * a) * std::exp(-log_cosh(pi * b / a)), a / 3.0);
}

double RectangleDomain::conclusion_level() const {
  return -lambda * delta() / (2.0 * a) * std::exp(-log_cosh(pi * b / a));
}

double comparison_harmonic(cplx z, const RectangleDomain& dom, double delta) {
  dom.validate();
  const double x = z.real(), y = z.imag();
  const double slack = 1e-12 * dom.a;
  if (x < -delta - slack || x > dom.a - delta + slack || std::abs(y) > dom.b * (1.0 + 1e-12))
    throw ValidationError("comparison function evaluated outside [-delta, a - delta] x [-b, b]");
  const double ratio = std::exp(log_cosh(pi * y / dom.a) - log_cosh(pi * dom.b / dom.a));
  return -dom.lambda * ratio * std::sin(pi * (x + delta) / dom.a);
}

GridFunction rectangle_grid(const RectangleDomain& dom, int nx, int ny) {
  dom.validate();
  if (nx < 3 || nx % 2 == 0 || ny < 5 || ny % 2 == 0)
    throw ValidationError("rectangle grid needs odd sizes, nx >= 3 and ny >= 5");
  GridFunction g;
  for (int i = 0; i < nx; ++i) g.x.push_back(-dom.a + dom.a * (2.0 * i + 1.0) / nx);
  g.y.push_back(-(dom.b + 0.5 * dom.eps));
  const int inner = ny - 2;
  for (int j = 0; j < inner; ++j) g.y.push_back(-dom.b + 2.0 * dom.b * j / (inner - 1));
  g.y.push_back(dom.b + 0.5 * dom.eps);
  g.x[static_cast<std::size_t>(nx / 2)] = 0.0;
  g.y[static_cast<std::size_t>(ny / 2)] = 0.0;
  g.values.assign(g.x.size() * g.y.size(), 0.0);
  return g;
}

Certificate subharmonic_certificate(const GridFunction& F, const RectangleDomain& dom) {
  dom.validate();
  if (F.x.empty() || F.y.empty() || F.values.size() != F.x.size() * F.y.size())
    throw ValidationError("sampled function has inconsistent grid sizes");
  Certificate c;
  c.delta = dom.delta();
  c.conclusion_level = dom.conclusion_level();

  const bool x_hit = std::any_of(F.x.begin(), F.x.end(), [&](double x) { return std::abs(x) < 0.5 * c.delta; });
  const auto [ylo, yhi] = std::minmax_element(F.y.begin(), F.y.end());
  if (!x_hit || *ylo > -dom.b || *yhi < dom.b)
    throw ValidationError("sample grid does not cover the conclusion rectangle |Re z| < delta/2, |Im z| < b");

  bool hyp = true, concl = true;
  for (std::size_t j = 0; j < F.y.size(); ++j) {
    const double y = F.y[j];
    if (!(std::abs(y) < dom.b + dom.eps)) continue;
    for (std::size_t i = 0; i < F.x.size(); ++i) {
      const double x = F.x[i];
      if (!(std::abs(x) < dom.a)) continue;
      const double v = F.at(i, j);
      ++c.checked;
      const double xm = std::min(x, 0.0);
      if (!(v < xm * xm)) {
        hyp = false;
        c.violations.push_back({x, y, v, xm * xm, "F < (Re z)_-^2"});
      }
      if (std::abs(y) >= dom.b && !(v < -dom.lambda)) {
        hyp = false;
        c.violations.push_back({x, y, v, -dom.lambda, "F < -lambda where |Im z| >= b"});
      }
      if (std::abs(y) < dom.b && std::abs(x) < 0.5 * c.delta && !(v < c.conclusion_level)) {
        concl = false;
        c.violations.push_back({x, y, v, c.conclusion_level, "conclusion level"});
      }
    }
  }
  c.hypotheses_hold = hyp;
  c.conclusion_holds = concl;
  c.holds = hyp && concl;
  return c;
}

RectangleDomain refined_rectangle(double alpha, double beta) {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  RectangleDomain d;
  d.a = alpha / 4.0;
  d.b = 2.0 * alpha / beta;
  d.lambda = alpha * alpha / 8.0;
  d.eps = 0.1 * d.b;
  return d;
}

std::vector<WSlice> default_w_slices(int dim, const RestrictedWindow& w) {
  w.validate(dim);
  const Vec base = w.y0 - dot(w.omega0, w.y0) * w.omega0;
  const Vec e = perp_frame(dim, w.omega0).first;
  const double re_max = std::sqrt(3.0) * w.alpha / 4.0;
  const double im_max = 2.0 * w.alpha / std::sqrt(4.0 - w.beta * w.beta);
  return {
      {base, Vec{}},
      {base + (0.5 * re_max) * e, Vec{}},
      {base - (0.5 * re_max) * e, (0.5 * im_max) * e},
  };
}

GridFunction build_phi(const SampledField& q, const RestrictedWindow& w, const WSlice& slice, double h, double M,
                       double helgason_c, const GridFunction& grid) {
  const int n = q.dim();
  w.validate(n);
  check_h_unit(h);
  if (!(M >= 1.0)) throw ValidationError("M must be at least 1");
  const double rho = 4.0 * w.alpha / w.beta + norm(w.y0);
  const double ck = std::max(4.0 * helgason_c, 2.0 * std::pow(2.0 * pi, 0.5 * n));
  const double log_k = std::log(ck) - 0.5 * n * std::log(h) + std::log(M) + n * std::log1p(rho + norm(w.y0));
  const double shift = dot(w.omega0, w.y0);

  GridFunction out = grid;
  const std::size_t nx = grid.x.size();
  parallel_for(out.values.size(), [&](std::size_t k) {
    const double x = grid.x[k % nx], y = grid.y[k / nx];
    ComplexPoint z;
    z.dim = n;
    z.re = (x + shift) * w.omega0 + slice.re;
    z.im = y * w.omega0 + slice.im;
    const double W = weighted_at(q, z, h);
    out.values[k] = W > 0.0 ? x * x + 2.0 * h * (std::log(W) - log_k) : -std::numeric_limits<double>::infinity();
  });
  return out;
}

// ---------------------------------------------------------------------------

double kappa_for(double beta) {
  check_positive(beta, "beta");
  return 0.99 / 8.0 * std::exp(-2.0 * log_cosh(8.0 * pi / beta));
}

double g_radius(double alpha, double beta) {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  return alpha / 8.0 * std::exp(-log_cosh(8.0 * pi / beta));
}

RefinedBound refined_bound(double I, double alpha, double beta, const Vec& y0, double M_q, int n, double C) {
  if (!(I >= 0.0) || !std::isfinite(I)) throw ValidationError("I must be finite and nonnegative");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("beta must lie in (0, 1]");
  RefinedBound r;
  r.kappa = kappa_for(beta);
  r.re_radius = g_radius(alpha, beta);
  r.im_radius = 2.0 * alpha / std::sqrt(4.0 - beta * beta);
  if (I == 0.0) {
    r.exact_vanishing = true;
    return r;
  }
  if (I > std::exp(-alpha * alpha / 8.0)) {
    r.trivial = true;
    return r;
  }
  r.h_star = alpha * alpha / (8.0 * std::abs(std::log(I)));
  r.bound = C * M_q * std::pow(1.0 + norm(y0) + alpha / beta, n) * std::pow(I, r.kappa);
  return r;
}

std::vector<ComplexPoint> refined_region_points(int dim, const RestrictedWindow& w, int count, std::uint64_t seed) {
  w.validate(dim);
  if (count < 2) throw ValidationError("refined region needs at least two points");
  const double rr = g_radius(w.alpha, w.beta);
  const double ir = 2.0 * w.alpha / std::sqrt(4.0 - w.beta * w.beta);
  std::vector<ComplexPoint> out;
  ComplexPoint z;
  z.dim = dim;
  z.re = w.y0;
  out.push_back(z);
  z.im = (0.9 * ir) * w.omega0;
  out.push_back(z);
  Uniform u(seed);
  while (out.size() < static_cast<std::size_t>(count)) {
    z.re = w.y0 + (0.9 * rr * std::pow(u(), 1.0 / dim)) * random_unit(dim, u);
    z.im = (0.9 * ir * std::pow(u(), 1.0 / dim)) * random_unit(dim, u);
    out.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------

BallRule polar_ball_rule(int dim, const Ball& G, int radial, int angular) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3");
  check_positive(G.radius, "region radius");
  if (radial < 1 || angular < 1) throw ValidationError("ball rule sizes must be positive");
  const quad::Rule& gl = quad::gauss_legendre(radial);
  const DirectionSet dirs = dim == 2 ? uniform_circle(angular) : gauss_product_sphere(angular);
  BallRule rule;
  for (int i = 0; i < radial; ++i) {
    const double r = 0.5 * G.radius * (gl.nodes[i] + 1.0);
    const double wr = 0.5 * G.radius * gl.weights[i] * std::pow(r, dim - 1);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      rule.nodes.push_back(G.center + r * dirs.dirs[j]);
      rule.weights.push_back(wr * dirs.weights[j]);
    }
  }
  return rule;
}

double transform_lp(const SampledField& q, const Ball& G, double h, double p, const BallRule& rule) {
  check_h(h);
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must lie in [1, inf)");
  (void)G;
  if (q.is_zero()) return 0.0;
  std::vector<double> vals(rule.nodes.size());
  parallel_for(vals.size(), [&](std::size_t k) {
    ComplexPoint z;
    z.dim = q.dim();
    z.re = rule.nodes[k];
    vals[k] = weighted_at(q, z, h);
  });
  double acc = 0.0;
  for (std::size_t k = 0; k < vals.size(); ++k) acc += rule.weights[k] * std::pow(vals[k], p);
  return std::pow(acc, 1.0 / p);
}

double gaussian_deconv_bound(double transform_lp_G, double L_q, double h, double lambda, int n, double C) {
  check_h_unit(h);
  if (!(L_q >= 0.0) || !std::isfinite(L_q)) throw ValidationError("L_q must be finite and nonnegative");
  if (!(transform_lp_G >= 0.0)) throw ValidationError("transform norm must be nonnegative");
  return C * (std::pow(h, -0.5 * n) * transform_lp_G + L_q * std::pow(h, 0.5 * lambda));
}

// ---------------------------------------------------------------------------

double stability_constant(int n, double M, double G_volume, double p, const Vec& y0, double alpha, double beta,
                          double lambda, double Cn) {
  if (!(M >= 1.0)) throw ValidationError("M must be at least 1");
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  check_positive(lambda, "lambda");
  if (!(p >= 1.0)) throw ValidationError("p must be at least 1");
  if (!(G_volume >= 0.0)) throw ValidationError("|G| must be nonnegative");
  return Cn * M * std::max(1.0, std::pow(G_volume, 1.0 / p)) * (1.0 + norm(y0)) *
         (std::pow(alpha, -n) + std::pow(beta, -n) + std::pow(alpha, lambda));
}

StabilityBound stability_bound(double I, double C, double lambda, double alpha) {
  if (!(I >= 0.0) || !std::isfinite(I)) throw ValidationError("I must be finite and nonnegative");
  StabilityBound out;
  if (I == 0.0) {
    out.exact_vanishing = true;
    return out;
  }
  out.bound = C * std::pow(std::abs(std::log(I)), -0.5 * lambda);
  out.obvious_regime = I >= std::exp(-alpha * alpha / 8.0);
  return out;
}

// ---------------------------------------------------------------------------

bool in_dependence_domain(const Vec& x, const RestrictedWindow& w) {
  if (w.beta >= 1.0) return true;
  const Vec v = x - w.y0;
  const double u = dot(v, w.omega0);
  const double perp = std::sqrt(std::max(0.0, dot(v, v) - u * u));
  return std::abs(u) * std::sqrt(1.0 - w.beta * w.beta) - perp * w.beta < w.alpha;
}

SampledField restrict_to_dependence_domain(const SampledField& q, const RestrictedWindow& w) {
  w.validate(q.dim());
  if (w.beta >= 1.0) return q;
  const double c = std::sqrt(1.0 - w.beta * w.beta);
  const double b2 = w.beta * w.beta;
  const Vec y0 = w.y0, om = w.omega0;
  const double alpha = w.alpha;
  quad::Breakpoints boundary = [=](const Vec& p, const Vec& d, std::vector<double>& out) {
    const Vec qv = p - y0;
    const double u0 = dot(qv, om), du = dot(d, om);
    const double qq = dot(qv, qv), qd = dot(qv, d), dd = dot(d, d);
    for (double s : {1.0, -1.0}) {
      // b^2 (|v|^2 - u^2) = (s c u - alpha)^2 along v = qv + t d.
      const double A = b2 * (dd - du * du) - c * c * du * du;
      const double B = b2 * 2.0 * (qd - u0 * du) - 2.0 * s * c * du * (s * c * u0 - alpha);
      const double C0 = b2 * (qq - u0 * u0) - (s * c * u0 - alpha) * (s * c * u0 - alpha);
      auto push = [&](double t) {
        if (std::isfinite(t) && s * c * (u0 + t * du) - alpha >= -1e-12) out.push_back(t);
      };
      if (std::abs(A) < 1e-14 * (std::abs(B) + std::abs(C0) + 1.0)) {
        if (B != 0.0) push(-C0 / B);
        continue;
      }
      const double disc = B * B - 4.0 * A * C0;
      if (disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      const double qn = -0.5 * (B + (B >= 0.0 ? sq : -sq));
      push(qn / A);
      if (qn != 0.0) push(C0 / qn);
    }
  };
  return restricted(q, [w](const Vec& x) { return in_dependence_domain(x, w); }, boundary);
}

// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (phantom.dim != 2 && phantom.dim != 3) throw ValidationError("phantom dimension must be 2 or 3");
  window.validate(phantom.dim);
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must lie in [1, inf)");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be positive");
  if (res.ns < 3 || res.ndir < 1 || res.sweep_points < 1 || res.region_points < 2 || res.g_radial < 1 ||
      res.g_angular < 1)
    throw ValidationError("resolutions must be positive");
  if (h_grid.empty()) throw ValidationError("h_grid must not be empty");
  for (double h : h_grid)
    if (!(h > 0.0 && h <= 1.0)) throw ValidationError("h_grid values must lie in (0, 1]");
}

namespace {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("field \"") + key + "\" has the wrong type");
  }
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const nlohmann::json j = parse_json_text(text, "experiment config");
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  if (j.contains("schema") && j["schema"] != 1) throw ValidationError("unsupported config schema");
  ExperimentConfig c;
  read_opt(j, "name", c.name);
  if (!j.contains("phantom")) throw ValidationError("experiment config needs a \"phantom\"");
  c.phantom = phantom_spec_from_json(j["phantom"]);
  if (!j.contains("window")) throw ValidationError("experiment config needs a \"window\"");
  c.window = window_from_json(j["window"], c.phantom.dim);
  read_opt(j, "p", c.p);
  read_opt(j, "lambda", c.lambda);
  read_opt(j, "seed", c.seed);
  read_opt(j, "h_grid", c.h_grid);
  if (j.contains("resolutions")) {
    const auto& r = j["resolutions"];
    if (!r.is_object()) throw ValidationError("resolutions must be an object");
    read_opt(r, "ns", c.res.ns);
    read_opt(r, "ndir", c.res.ndir);
    read_opt(r, "sweep_points", c.res.sweep_points);
    read_opt(r, "region_points", c.res.region_points);
    read_opt(r, "phi_nx", c.res.phi_nx);
    read_opt(r, "phi_ny", c.res.phi_ny);
    read_opt(r, "g_radial", c.res.g_radial);
    read_opt(r, "g_angular", c.res.g_angular);
    if (r.contains("besov")) {
      const auto& b = r["besov"];
      read_opt(b, "radial_panels", c.res.besov.radial_panels);
      read_opt(b, "radial_order", c.res.besov.radial_order);
      read_opt(b, "directions", c.res.besov.directions);
      read_opt(b, "inner_radius_factor", c.res.besov.inner_radius_factor);
      read_opt(b, "rel_tol", c.res.besov.rel_tol);
    }
  }
  c.validate();
  return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
  const int n = c.phantom.dim;
  ojson j;
  j["schema"] = 1;
  j["name"] = c.name;
  j["phantom"] = phantom_spec_to_json(c.phantom);
  j["window"] = window_to_json(c.window, n);
  j["p"] = c.p;
  j["lambda"] = c.lambda;
  ojson r;
  r["ns"] = c.res.ns;
  r["ndir"] = c.res.ndir;
  r["sweep_points"] = c.res.sweep_points;
  r["region_points"] = c.res.region_points;
  r["phi_nx"] = c.res.phi_nx;
  r["phi_ny"] = c.res.phi_ny;
  r["g_radial"] = c.res.g_radial;
  r["g_angular"] = c.res.g_angular;
  ojson b;
  b["radial_panels"] = c.res.besov.radial_panels;
  b["radial_order"] = c.res.besov.radial_order;
  b["directions"] = c.res.besov.directions;
  b["inner_radius_factor"] = c.res.besov.inner_radius_factor;
  b["rel_tol"] = c.res.besov.rel_tol;
  r["besov"] = b;
  j["resolutions"] = r;
  j["h_grid"] = c.h_grid;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

bool StabilityReport::all_flags_true() const {
  for (const auto* f : {&prop23_holds, &lemma26_holds, &prop27_holds, &lemma29_holds, &thm25_holds})
    if (!f->has_value() || !**f) return false;
  return applicable;
}

StabilityReport run_experiment(const ExperimentConfig& config, const Constants& constants) {
  config.validate();
  const int n = config.phantom.dim;
  const RestrictedWindow& w = config.window;

  StabilityReport r;
  r.name = config.name;
  r.constants_version = constants.version;
  r.dim = n;
  r.window = w;
  r.p = config.p;
  r.lambda = config.lambda;
  r.kappa = kappa_for(w.beta);
  r.G_radius = g_radius(w.alpha, w.beta);

  const SampledField q = make_phantom(config.phantom);
  if (q.is_zero()) {
    r.degenerate = true;
    return r;
  }
  if (config.lambda * config.p >= 1.0) {
    r.applicable = false;
    r.inapplicable_reason = "hypothesis violation: lambda * p >= 1";
    return r;
  }
  if (!q.halfspace()) {
    r.applicable = false;
    r.inapplicable_reason = "hypothesis violation: phantom carries no halfspace support assertion";
    return r;
  }
  if (norm(q.halfspace()->y0 - w.y0) > 1e-9 * (1.0 + norm(w.y0))) {
    r.applicable = false;
    r.inapplicable_reason = "hypothesis violation: window y0 is not the contact point of the support";
    return r;
  }

  const SampledField qE = restrict_to_dependence_domain(q, w);
  const DirectionSet dirs = default_directions(n, config.res.ndir);
  const Vec origin{};
  const Sinogram gy = radon(q, w.y0, config.res.ns, dirs);
  r.I = restricted_integral(gy, w);
  const bool reuse = w.beta >= 1.0 && norm(w.y0) == 0.0;
  r.x_norm_val = x_norm(reuse ? gy : radon(qE, origin, config.res.ns, dirs));
  r.sup_norm = qE.sup_norm();
  r.L_q = besov_seminorm(qE, config.lambda, config.p, config.res.besov);
  r.M_q = std::max(1.0, r.sup_norm + r.x_norm_val);
  r.M = std::max(r.M_q, r.L_q) * (1.0 + 1e-3);

  // Microlocal bound on an admissible sweep, gamma = 2 alpha / beta.
  const double gamma = 2.0 * w.alpha / w.beta;
  const auto pts = admissible_sweep(n, w, gamma, config.res.sweep_points, config.seed);
  const double c23 = constants.helgason_c.at(n);
  const std::size_t np = pts.size();
  std::vector<double> meas(np * config.h_grid.size()), rhs(meas.size());
  parallel_for(meas.size(), [&](std::size_t k) {
    const double h = config.h_grid[k / np];
    const ComplexPoint& z = pts[k % np];
    meas[k] = weighted_at(q, z, h);
    rhs[k] = helgason_rhs(r.I, r.x_norm_val, z, h, w, gamma, c23).bound;
  });
  bool ok23 = true;
  for (std::size_t i = 0; i < config.h_grid.size(); ++i) {
    DecayPoint d;
    d.h = config.h_grid[i];
    double worst = -1.0;
    for (std::size_t k = i * np; k < (i + 1) * np; ++k) {
      ok23 = ok23 && meas[k] <= rhs[k];
      const double ratio = rhs[k] > 0.0 ? meas[k] / rhs[k] : (meas[k] > 0.0 ? INFINITY : 0.0);
      if (ratio > worst) {
        worst = ratio;
        d.measured = meas[k];
        d.bound = rhs[k];
      }
    }
    r.decay.push_back(d);
  }
  r.prop23_holds = ok23;

  // Refined bound at the chosen h, and the comparison certificate behind it.
  const RefinedBound rb = refined_bound(r.I, w.alpha, w.beta, w.y0, r.M_q, n, constants.refined_c.at(n));
  r.trivial_case = rb.trivial;
  r.exact_vanishing = rb.exact_vanishing;
  r.h_star = rb.h_star;
  if (rb.h_star) {
    const double h = *rb.h_star;
    r.bound_prop27 = rb.bound;
    const auto region = refined_region_points(n, w, config.res.region_points, config.seed + 1);
    std::vector<double> wv(region.size());
    for (std::size_t k = 0; k < region.size(); ++k) wv[k] = weighted_at(q, region[k], h);
    r.measured_prop27 = *std::max_element(wv.begin(), wv.end());
    r.prop27_holds = r.measured_prop27 <= rb.bound;

    const RectangleDomain rect = refined_rectangle(w.alpha, w.beta);
    const GridFunction grid = rectangle_grid(rect, config.res.phi_nx, config.res.phi_ny);
    bool ok26 = true;
    for (const WSlice& s : default_w_slices(n, w)) {
      const Certificate cert = subharmonic_certificate(build_phi(q, w, s, h, r.M, c23, grid), rect);
      ok26 = ok26 && cert.holds;
      r.certificate_samples += cert.checked;
    }
    r.lemma26_holds = ok26;
  }

  // Deconvolution and the log estimate on G.
  const Ball G{w.y0, r.G_radius};
  r.measured_lp_G = lp_norm(q, G, config.p);
  const double h29 = rb.h_star.value_or(*std::min_element(config.h_grid.begin(), config.h_grid.end()));
  const BallRule rule = polar_ball_rule(n, G, config.res.g_radial, config.res.g_angular);
  const double tlp = transform_lp(q, G, h29, config.p, rule);
  r.bound_lemma29 = gaussian_deconv_bound(tlp, r.L_q, h29, config.lambda, n, constants.deconv_c.at(n));
  r.measured_lemma29 = r.measured_lp_G;
  r.lemma29_holds = r.measured_lp_G <= *r.bound_lemma29;

  const double C = stability_constant(n, r.M, ball_volume(n, r.G_radius), config.p, w.y0, w.alpha, w.beta,
                                      config.lambda, constants.theorem_c.at(n));
  const StabilityBound sb = stability_bound(r.I, C, config.lambda, w.alpha);
  r.bound_thm25 = sb.bound;
  r.thm25_holds = r.measured_lp_G <= sb.bound;
  return r;
}

namespace {

ojson opt_num(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }
ojson opt_bool(const std::optional<bool>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string report_to_json(const StabilityReport& r) {
  ojson j;
  j["schema"] = 1;
  j["constants_version"] = r.constants_version;
  j["name"] = r.name;
  j["dim"] = r.dim;
  j["window"] = window_to_json(r.window, r.dim);
  j["p"] = r.p;
  j["lambda"] = r.lambda;
  j["I"] = r.I;
  j["x_norm_val"] = r.x_norm_val;
  j["sup_norm"] = r.sup_norm;
  j["M_q"] = r.M_q;
  j["L_q"] = r.L_q;
  j["M"] = r.M;
  j["h_star"] = opt_num(r.h_star);
  j["kappa"] = r.kappa;
  j["G_radius"] = r.G_radius;
  j["bound_prop27"] = opt_num(r.bound_prop27);
  j["measured_prop27"] = r.measured_prop27;
  j["bound_lemma29"] = opt_num(r.bound_lemma29);
  j["measured_lemma29"] = r.measured_lemma29;
  j["bound_thm25"] = r.bound_thm25;
  j["measured_lp_G"] = r.measured_lp_G;
  j["applicable"] = r.applicable;
  j["inapplicable_reason"] = r.inapplicable_reason;
  j["degenerate"] = r.degenerate;
  j["trivial_case"] = r.trivial_case;
  j["exact_vanishing"] = r.exact_vanishing;
  ojson flags;
  flags["prop23"] = opt_bool(r.prop23_holds);
  flags["lemma26"] = opt_bool(r.lemma26_holds);
  flags["prop27"] = opt_bool(r.prop27_holds);
  flags["lemma29"] = opt_bool(r.lemma29_holds);
  flags["thm25"] = opt_bool(r.thm25_holds);
  j["flags"] = flags;
  j["certificate_samples"] = r.certificate_samples;
  auto decay = ojson::array();
  for (const DecayPoint& d : r.decay) decay.push_back({{"h", d.h}, {"measured", d.measured}, {"bound", d.bound}});
  j["decay"] = decay;
  j["note"] =
      "kappa is below 1/(8 cosh^2(8 pi/beta)); the I^kappa rate is not observable, only the inequality direction";
  return j.dump(2) + "\n";
}

std::string decay_csv(const StabilityReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "h,inv_h,measured,bound\n";
  for (const DecayPoint& d : r.decay) out << d.h << "," << 1.0 / d.h << "," << d.measured << "," << d.bound << "\n";
  return out.str();
}

std::string log_stability_csv(const std::vector<StabilityReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "abs_log_I,measured,bound\n";
  for (const StabilityReport& r : reports) {
    if (!r.applicable || r.degenerate || !(r.I > 0.0)) continue;
    out << std::abs(std::log(r.I)) << "," << r.measured_lp_G << "," << r.bound_thm25 << "\n";
  }
  return out.str();
}

std::string plot_script() {
  return R"PY(import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

base = sys.argv[1] if len(sys.argv) > 1 else "."


def rows(name):
    with open(f"{base}/{name}") as fh:
        return list(csv.DictReader(fh))


d = rows("decay.csv")
x = [float(r["inv_h"]) for r in d]
plt.semilogy(x, [max(float(r["measured"]), 1e-300) for r in d], "o-", label="weighted transform")
plt.semilogy(x, [float(r["bound"]) for r in d], "s--", label="bound")
plt.xlabel("1/h")
plt.legend()
plt.savefig(f"{base}/decay.png", dpi=120)
plt.clf()

t = rows("log_stability.csv")
x = [float(r["abs_log_I"]) for r in t]
plt.loglog(x, [max(float(r["measured"]), 1e-300) for r in t], "o-", label="||q||_Lp(G)")
plt.loglog(x, [float(r["bound"]) for r in t], "s--", label="C |log I|^(-lambda/2)")
plt.xlabel("|log I|")
plt.legend()
plt.savefig(f"{base}/log_stability.png", dpi=120)
)PY";
}

}  // namespace helgason
