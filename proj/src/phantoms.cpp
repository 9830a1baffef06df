#include "helgason/phantoms.hpp"

#include <algorithm>

#include "helgason/sphere.hpp"

namespace helgason {

SampledField::SampledField(int dim, Ball support, double sup_norm, Evaluator eval, quad::Breakpoints breaks,
                           std::optional<Halfspace> halfspace)
    : dim_(dim),
      support_(support),
      sup_norm_(sup_norm),
      eval_(std::move(eval)),
      breaks_(std::move(breaks)),
      halfspace_(std::move(halfspace)) {
  if (dim_ != 2 && dim_ != 3) throw ValidationError("field dimension must be 2 or 3");
  if (!breaks_) breaks_ = [](const Vec&, const Vec&, std::vector<double>&) {};
}

SampledField SampledField::with_halfspace(std::optional<Halfspace> hs) const {
  SampledField out = *this;
  out.halfspace_ = std::move(hs);
  return out;
}

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::ball_indicator: return "ball_indicator";
    case PhantomKind::smooth_bump: return "smooth_bump";
    case PhantomKind::halfspace_cut_ball: return "halfspace_cut_ball";
    case PhantomKind::gaussian_truncated: return "gaussian_truncated";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(const std::string& s) {
  if (s == "ball_indicator") return PhantomKind::ball_indicator;
  if (s == "smooth_bump") return PhantomKind::smooth_bump;
  if (s == "halfspace_cut_ball") return PhantomKind::halfspace_cut_ball;
  if (s == "gaussian_truncated") return PhantomKind::gaussian_truncated;
  throw ValidationError("unknown phantom kind '" + s + "'");
}

namespace {

bool finite(const Vec& v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

}  // namespace

SampledField make_phantom(const PhantomSpec& spec) {
  const int n = spec.dim;
  if (n != 2 && n != 3) throw ValidationError("phantom dimension must be 2 or 3");
  if (!finite(spec.center)) throw ValidationError("phantom center must be finite");
  if (n == 2 && spec.center[2] != 0.0) throw ValidationError("2-D phantom center has a third component");
  if (!(spec.radius > 0.0) || !std::isfinite(spec.radius))
    throw ValidationError("phantom radius must be positive, got " + std::to_string(spec.radius));
  if (!std::isfinite(spec.amplitude)) throw ValidationError("phantom amplitude must be finite");

  const Vec c = spec.center;
  const double r = spec.radius;
  const double amp = spec.amplitude;

  Ball support{c, r};
  SampledField::Evaluator eval;
  quad::Breakpoints breaks;

  switch (spec.kind) {
    case PhantomKind::ball_indicator:
    case PhantomKind::halfspace_cut_ball: {
      eval = [c, r, amp](const Vec& x) { return norm(x - c) <= r ? amp : 0.0; };
      breaks = [support](const Vec& p, const Vec& d, std::vector<double>& out) {
        quad::sphere_crossings(p, d, support, out);
      };
      break;
    }
    case PhantomKind::smooth_bump: {
      const double r2 = r * r;
      eval = [c, r2, amp](const Vec& x) {
        const Vec q = x - c;
        const double t = dot(q, q) / r2;
        if (t >= 1.0) return 0.0;
        return amp * std::exp(1.0 - 1.0 / (1.0 - t));
      };
      breaks = [support](const Vec& p, const Vec& d, std::vector<double>& out) {
        quad::sphere_crossings(p, d, support, out);
      };
      break;
    }
    case PhantomKind::gaussian_truncated: {
      const double t = spec.truncation_radius.value_or(8.0 * r);
      if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("truncation_radius must be positive");
      support = Ball{c, t};
      const double inv = 1.0 / (2.0 * r * r);
      const double t2 = t * t * (1.0 + 1e-12);  // rounding slack for nodes on the sphere
      eval = [c, t2, inv, amp](const Vec& x) {
        const Vec q = x - c;
        const double d2 = dot(q, q);
        if (d2 > t2) return 0.0;
        return amp * std::exp(-d2 * inv);
      };
      breaks = [support](const Vec& p, const Vec& d, std::vector<double>& out) {
        quad::sphere_crossings(p, d, support, out);
      };
      break;
    }
  }

  if (spec.kind == PhantomKind::halfspace_cut_ball && !spec.cut)
    throw ValidationError("halfspace_cut_ball requires cut data (y0, omega0)");

  std::optional<Halfspace> hs;
  if (spec.cut) {
    Vec y0 = spec.cut->first;
    Vec w0 = spec.cut->second;
    if (!finite(y0) || !finite(w0)) throw ValidationError("cut data must be finite");
    if (n == 2 && (y0[2] != 0.0 || w0[2] != 0.0)) throw ValidationError("2-D cut data has a third component");
    const double wn = norm(w0);
    if (std::abs(wn - 1.0) > 1e-6) throw ValidationError("cut normal omega0 must be a unit vector");
    w0 = (1.0 / wn) * w0;
    const double dist = norm(y0 - support.center);
    if (dist > support.radius * (1.0 + 1e-12))
      throw ValidationError("cut point y0 lies outside the closed support ball, so it cannot belong to the support");
    const double tol = spec.contact_tolerance.value_or(1e-3 * support.radius);
    if (!(tol > 0.0)) throw ValidationError("contact tolerance must be positive");
    hs = Halfspace{y0, w0, tol};
    auto inner = eval;
    eval = [inner, y0, w0](const Vec& x) { return dot(x - y0, w0) <= 0.0 ? inner(x) : 0.0; };
    auto inner_breaks = breaks;
    breaks = [inner_breaks, y0, w0](const Vec& p, const Vec& d, std::vector<double>& out) {
      inner_breaks(p, d, out);
      quad::plane_crossing(p, d, y0, w0, out);
    };
  }
  return SampledField(n, support, std::abs(amp), std::move(eval), std::move(breaks), hs);
}

SampledField scaled(const SampledField& f, double c) {
  auto ev = f.evaluator();
  SampledField out(f.dim(), f.support(), std::abs(c) * f.sup_norm(), [ev, c](const Vec& x) { return c * ev(x); },
                   f.breakpoints(), c != 0.0 ? f.halfspace() : std::nullopt);
  return out;
}

namespace {

Ball enclosing(const Ball& a, const Ball& b) {
  const Vec d = b.center - a.center;
  const double dist = norm(d);
  if (dist + b.radius <= a.radius) return a;
  if (dist + a.radius <= b.radius) return b;
  const double r = 0.5 * (dist + a.radius + b.radius);
  const Vec c = a.center + ((r - a.radius) / dist) * d;
  return Ball{c, r * (1.0 + 1e-14)};
}

}  // namespace

SampledField sum(const SampledField& f, const SampledField& g) {
  if (f.dim() != g.dim()) throw ValidationError("cannot add fields of different dimension");
  auto fe = f.evaluator();
  auto ge = g.evaluator();
  auto fb = f.breakpoints();
  auto gb = g.breakpoints();
  return SampledField(
      f.dim(), enclosing(f.support(), g.support()), f.sup_norm() + g.sup_norm(),
      [fe, ge](const Vec& x) { return fe(x) + ge(x); },
      [fb, gb](const Vec& p, const Vec& d, std::vector<double>& out) {
        fb(p, d, out);
        gb(p, d, out);
      });
}

SampledField shifted(const SampledField& f, const Vec& y) {
  auto fe = f.evaluator();
  auto fb = f.breakpoints();
  std::optional<Halfspace> hs = f.halfspace();
  if (hs) hs->y0 = hs->y0 + y;
  return SampledField(
      f.dim(), Ball{f.support().center + y, f.support().radius}, f.sup_norm(),
      [fe, y](const Vec& x) { return fe(x - y); },
      [fb, y](const Vec& p, const Vec& d, std::vector<double>& out) { fb(p - y, d, out); }, hs);
}

SampledField zero_field(int dim) {
  return SampledField(dim, Ball{Vec{}, 1.0}, 0.0, [](const Vec&) { return 0.0; }, nullptr);
}

SampledField restricted(const SampledField& f, std::function<bool(const Vec&)> inside, quad::Breakpoints boundary) {
  auto fe = f.evaluator();
  auto fb = f.breakpoints();
  return SampledField(
      f.dim(), f.support(), f.sup_norm(), [fe, inside](const Vec& x) { return inside(x) ? fe(x) : 0.0; },
      [fb, boundary](const Vec& p, const Vec& d, std::vector<double>& out) {
        fb(p, d, out);
        if (boundary) boundary(p, d, out);
      },
      f.halfspace());
}

namespace {

void check_quadrature(const quad::Estimate<double>& e, const char* what) {
  if (!e.converged && e.error > 1e-6 * std::max(e.abs, 1e-300))
    throw ConvergenceError(std::string(what) + ": quadrature did not converge (achieved error " +
                           std::to_string(e.error) + " on scale " + std::to_string(e.abs) + ")");
}

}  // namespace

double weighted_moment(const SampledField& f, double rel_tol) {
  if (f.is_zero()) return 0.0;
  const int n = f.dim();
  quad::Tolerance tol{rel_tol, 0.0, 4000};
  auto est = integrate_field<double>(
      f, [n](const Vec& x, double v) { return std::pow(1.0 + norm(x), n) * std::abs(v); }, std::nullopt, tol);
  check_quadrature(est, "weighted_moment");
  return sphere_area(n) * est.value;
}

double lp_norm(const SampledField& f, const Ball& region, double p, double rel_tol) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("L^p norm needs p in [1, inf)");
  if (f.is_zero()) return 0.0;
  quad::Tolerance tol{rel_tol, 0.0, 4000};
  auto est = integrate_field<double>(
      f, [p](const Vec&, double v) { return std::pow(std::abs(v), p); }, region, tol);
  check_quadrature(est, "lp_norm");
  return std::pow(std::max(est.value, 0.0), 1.0 / p);
}

double lp_norm(const SampledField& f, double p, double rel_tol) {
  return lp_norm(f, Ball{f.support().center, f.support().radius * 1.000001}, p, rel_tol);
}

double translation_modulus(const SampledField& f, const Vec& y, double p, double rel_tol) {
  if (f.is_zero()) return 0.0;
  const SampledField diff = sum(f, scaled(shifted(f, y), -1.0));
  quad::Tolerance tol{rel_tol, 0.0, 4000};
  auto est = integrate_field<double>(
      diff, [p](const Vec&, double v) { return std::pow(std::abs(v), p); }, std::nullopt, tol);
  check_quadrature(est, "translation_modulus");
  return std::max(est.value, 0.0);
}

double besov_seminorm(const SampledField& f, double lambda, double p, const BesovOptions& opt) {
  if (!(lambda > 0.0) || !(p >= 1.0)) throw ValidationError("Besov seminorm needs lambda > 0 and p >= 1");
  const double lp = lambda * p;
  if (lp >= 1.0)
    throw ValidationError("Besov seminorm requires lambda * p < 1 (got " + std::to_string(lp) + ")");
  if (f.is_zero()) return 0.0;

  const int n = f.dim();
  const double sr = f.support().radius;
  const double R = 2.0 * sr + 1.0;
  const double r0 = opt.inner_radius_factor * R;
  const double fp = std::pow(lp_norm(f, p), p);

  // D(y) = D(-y): integrate over a half sphere and double.
  DirectionSet dirs = n == 2 ? half_circle_directions(opt.directions) : half_sphere_directions(opt.directions);

  const quad::Rule& gl = quad::gauss_legendre(opt.radial_order);
  const double t0 = std::log(r0);
  const double t1 = std::log(R);
  const double panel = (t1 - t0) / opt.radial_panels;

  double total = 0.0;
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const Vec& u = dirs.dirs[j];
    // Singular part [0, r0]: local power law D(r u) ~ A r^k.
    const double d0 = translation_modulus(f, r0 * u, p, opt.rel_tol);
    const double d1 = translation_modulus(f, 2.0 * r0 * u, p, opt.rel_tol);
    double inner = 0.0;
    if (d0 > 0.0) {
      double k = d1 > 0.0 ? std::log(d1 / d0) / std::numbers::ln2 : 1.0;
      if (!(k > lp))
        throw ConvergenceError("Besov seminorm: local modulus exponent " + std::to_string(k) +
                               " does not exceed lambda*p; the field is not in the Besov class");
      inner = d0 * std::pow(r0, -lp) / (k - lp);
    }
    // Graded part [r0, R] in t = log r: integrand D(e^t u) e^{-lambda p t}.
    double mid = 0.0;
    for (int pi = 0; pi < opt.radial_panels; ++pi) {
      const double a = t0 + pi * panel;
      for (int q = 0; q < opt.radial_order; ++q) {
        const double t = a + 0.5 * panel * (gl.nodes[q] + 1.0);
        const double rad = std::exp(t);
        const double d = rad >= 2.0 * sr ? 2.0 * fp : translation_modulus(f, rad * u, p, opt.rel_tol);
        mid += 0.5 * panel * gl.weights[q] * d * std::exp(-lp * t);
      }
    }
    total += dirs.weights[j] * (inner + mid);
  }
  total *= 2.0;  // the other half sphere
  // Tail |y| > R: disjoint supports, D = 2 ||f||_p^p.
  total += 2.0 * fp * sphere_area(n) * std::pow(R, -lp) / lp;
  return std::pow(total, 1.0 / p);
}

}  // namespace helgason
