#pragma once

// Synthetic compactly supported functions on R^2 / R^3 with analytic
// evaluators and known discontinuity geometry.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "helgason/common.hpp"
#include "helgason/quadrature.hpp"

namespace helgason {

/// Assertion that supp f lies in {<x - y0, omega0> <= 0} and touches y0.
struct Halfspace {
  Vec y0{};
  Vec omega0{};
  double contact_tolerance = 0.0;
};

/// A real function on R^n with certified support ball and sup-norm bound.
/// Immutable; copies share the evaluator.
class SampledField {
 public:
  using Evaluator = std::function<double(const Vec&)>;

  SampledField(int dim, Ball support, double sup_norm, Evaluator eval, quad::Breakpoints breaks,
               std::optional<Halfspace> halfspace = std::nullopt);

  int dim() const { return dim_; }
  const Ball& support() const { return support_; }
  double sup_norm() const { return sup_norm_; }
  const std::optional<Halfspace>& halfspace() const { return halfspace_; }

  double operator()(const Vec& x) const { return eval_(x); }
  const Evaluator& evaluator() const { return eval_; }
  const quad::Breakpoints& breakpoints() const { return breaks_; }

  /// True when the field is identically zero (zero amplitude).
  bool is_zero() const { return sup_norm_ == 0.0; }

  SampledField with_halfspace(std::optional<Halfspace> hs) const;

 private:
  int dim_;
  Ball support_;
  double sup_norm_;
  Evaluator eval_;
  quad::Breakpoints breaks_;
  std::optional<Halfspace> halfspace_;
};

enum class PhantomKind { ball_indicator, smooth_bump, halfspace_cut_ball, gaussian_truncated };

std::string to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(const std::string& s);

struct PhantomSpec {
  PhantomKind kind = PhantomKind::ball_indicator;
  int dim = 2;
  Vec center{};
  double radius = 1.0;
  double amplitude = 1.0;
  std::optional<std::pair<Vec, Vec>> cut;  // (y0, omega0)
  std::optional<double> truncation_radius;
  std::optional<double> contact_tolerance;
};

/// Builds the field; throws ValidationError on an invalid spec.
SampledField make_phantom(const PhantomSpec& spec);

// Field algebra. Support and sup-norm metadata are propagated conservatively.
SampledField scaled(const SampledField& f, double c);
SampledField sum(const SampledField& f, const SampledField& g);
SampledField shifted(const SampledField& f, const Vec& y);
/// The zero function on R^n.
SampledField zero_field(int dim);

/// Multiplies f by the indicator of a region given as a membership predicate
/// plus the breakpoints of its boundary along lines.
SampledField restricted(const SampledField& f, std::function<bool(const Vec&)> inside, quad::Breakpoints boundary);

/// |S^{n-1}| * integral of (1 + |x|)^n |f(x)| dx.
double weighted_moment(const SampledField& f, double rel_tol = 1e-9);

/// ||f||_{L^p(region)} for p in [1, inf).
double lp_norm(const SampledField& f, const Ball& region, double p, double rel_tol = 1e-9);

/// ||f||_{L^p(R^n)}.
double lp_norm(const SampledField& f, double p, double rel_tol = 1e-9);

/// ||f - f(. - y)||_{L^p}^p.
double translation_modulus(const SampledField& f, const Vec& y, double p, double rel_tol = 1e-8);

struct BesovOptions {
  int radial_panels = 10;    // Gauss-Legendre panels in log|y|
  int radial_order = 8;      // nodes per panel
  int directions = 32;       // n=2: angles over the half circle; n=3: sphere nodes (approx.)
  double inner_radius_factor = 1e-4;  // r0 = factor * R
  double rel_tol = 1e-8;              // per translation modulus
};

/// Integral modulus of continuity (int ||f - f(.-y)||_p^p / |y|^{n + lambda p} dy)^{1/p}.
/// Requires lambda * p < 1.
double besov_seminorm(const SampledField& f, double lambda, double p, const BesovOptions& opt = {});

/// Integrates g(x, f(x)) over supp f (optionally clipped to a ball). Shared
/// by the norm computations and the Segal-Bargmann quadrature.
template <class T, class G>
quad::Estimate<T> integrate_field(const SampledField& f, G&& g, const std::optional<Ball>& clip,
                                  const quad::Tolerance& tol);

// ---------------------------------------------------------------------------

template <class T, class G>
quad::Estimate<T> integrate_field(const SampledField& f, G&& g, const std::optional<Ball>& clip,
                                  const quad::Tolerance& tol) {
  Ball dom = f.support();
  std::optional<Ball> other;
  if (clip) {
    const double dc = norm(clip->center - dom.center);
    if (dc >= clip->radius + dom.radius) return {};
    if (clip->radius < dom.radius) {
      other = dom;
      dom = *clip;
    } else {
      other = clip;
    }
    if (dc + dom.radius <= other->radius) other.reset();  // dom fully inside
  }
  quad::Breakpoints br = [&f, other](const Vec& p, const Vec& d, std::vector<double>& out) {
    f.breakpoints()(p, d, out);
    if (other) quad::sphere_crossings(p, d, *other, out);
  };
  auto integrand = [&](const Vec& x) -> T {
    if (other && !other->contains(x)) return T{};
    const double v = f(x);
    if (v == 0.0) return T{};
    return g(x, v);
  };
  quad::BallDomain bd;
  bd.center = dom.center;
  bd.radius = dom.radius;
  bd.k = f.dim();
  return quad::integrate_ball<T>(bd, integrand, br, tol);
}

}  // namespace helgason
