#pragma once

// Numerical integration used by every module: Gauss-Legendre rules of
// arbitrary order, a globally adaptive Gauss-Kronrod integrator, and nested
// integration over balls of dimension 1..3 embedded in R^3.

#include <algorithm>
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "helgason/common.hpp"

namespace helgason::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes on [-1, 1]. Rules are cached.
const Rule& gauss_legendre(int n);

struct Tolerance {
  double rel = 1e-10;
  double abs = 0.0;
  int max_intervals = 2000;
  int initial_panels = 1;
  // Also sample just inside both panel ends and charge unexplained deviations
  // to the error estimate. Kronrod nodes leave a blind zone near the ends in
  // which a kink or jump goes unnoticed.
  bool guard_ends = false;
};

/// An integral estimate. `abs` approximates the integral of |f|, which is the
/// scale the relative tolerance refers to.
template <class T>
struct Estimate {
  T value{};
  double abs = 0.0;
  double error = 0.0;
  bool converged = true;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    abs += o.abs;
    error += o.error;
    converged = converged && o.converged;
    return *this;
  }
};

/// Integrand sample: the value and the magnitude that feeds the `abs` scale.
template <class T>
struct Sample {
  T value{};
  double abs = 0.0;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class T>
struct Panel {
  double a, b;
  Estimate<T> est;
  bool operator<(const Panel& o) const { return est.error < o.est.error; }
};

// Deviation of f at relative position e from polynomial extrapolation of
// the Kronrod nodes nearest that end. Zero unless the deviation stands out
// against the spread of the linear, quadratic and cubic extrapolants.
template <class T>
double end_mismatch(const T& fe, const std::array<T, 4>& fv, double floor) {
  const double e = 1.0 - 1e-6;
  auto extrapolate = [&](int order) {
    T acc{};
    for (int i = 0; i <= order; ++i) {
      double l = 1.0;
      for (int j = 0; j <= order; ++j)
        if (j != i) l *= (e - kXgk[j]) / (kXgk[i] - kXgk[j]);
      acc += fv[i] * l;
    }
    return acc;
  };
  const T lin = extrapolate(1), quad = extrapolate(2), cub = extrapolate(3);
  const double miss = magnitude(T(fe - cub));
  double scale = magnitude(fe);
  for (const T& v : fv) scale = std::max(scale, magnitude(v));
  const double spread = magnitude(T(quad - lin)) + magnitude(T(cub - quad));
  if (!std::isfinite(miss) || miss <= 2.0 * spread + floor * scale) return 0.0;
  return miss;
}

template <class T, class F>
Estimate<T> kronrod15(F& f, double a, double b, bool guard_ends = false, double guard_floor = 1e-12) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  Sample<T> center = f(c);
  T resk = center.value * kWgk[7];
  T resg = center.value * kWg[3];
  double resabs = center.abs * kWgk[7];
  std::array<T, 4> lows{}, highs{};
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXgk[j];
    Sample<T> lo = f(c - dx);
    Sample<T> hi = f(c + dx);
    if (j < 4) {
      lows[j] = lo.value;
      highs[j] = hi.value;
    }
    resk += (lo.value + hi.value) * kWgk[j];
    resabs += (lo.abs + hi.abs) * kWgk[j];
    if (j % 2 == 1) resg += (lo.value + hi.value) * kWg[j / 2];
  }
  Estimate<T> e;
  e.value = resk * hw;
  e.abs = resabs * std::abs(hw);
  e.error = magnitude(T((resk - resg) * hw));
  if (guard_ends) {
    const double dx = hw * (1.0 - 1e-6);
    const double miss = end_mismatch<T>(f(c - dx).value, lows, guard_floor) +
                        end_mismatch<T>(f(c + dx).value, highs, guard_floor);
    e.error += miss * (1.0 - kXgk[0]) * std::abs(hw);
  }
  return e;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a Sample-valued
/// integrand over [a, b]. Stops once the summed error estimate is below
/// max(tol.abs, tol.rel * integral of |f|).
template <class T, class F>
Estimate<T> integrate(F&& f, double a, double b, const Tolerance& tol = {}) {
  Estimate<T> total;
  if (!(b > a)) return total;
  std::priority_queue<detail::Panel<T>> heap;
  T value{};
  double abs = 0.0;
  double err = 0.0;
  const int start = std::max(1, tol.initial_panels);
  // Guard samples of nested integrands carry the inner quadrature noise.
  const double guard_floor = std::max(1e-12, 0.1 * tol.rel);
  for (int k = 0; k < start; ++k) {
    const double lo = a + (b - a) * k / start;
    const double hi = k + 1 == start ? b : a + (b - a) * (k + 1) / start;
    auto est = detail::kronrod15<T>(f, lo, hi, tol.guard_ends, guard_floor);
    heap.push({lo, hi, est});
    value += est.value;
    abs += est.abs;
    err += est.error;
  }
  int intervals = start;
  while (err > std::max(tol.abs, tol.rel * abs) && intervals < tol.max_intervals) {
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    auto left = detail::kronrod15<T>(f, worst.a, mid, tol.guard_ends, guard_floor);
    auto right = detail::kronrod15<T>(f, mid, worst.b, tol.guard_ends, guard_floor);
    value += left.value + right.value - worst.est.value;
    abs += left.abs + right.abs - worst.est.abs;
    err += left.error + right.error - worst.est.error;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
    ++intervals;
  }
  // Re-sum from the panels to avoid drift from the running updates.
  total.value = T{};
  total.abs = 0.0;
  total.error = 0.0;
  while (!heap.empty()) {
    total.value += heap.top().est.value;
    total.abs += heap.top().est.abs;
    total.error += heap.top().est.error;
    heap.pop();
  }
  total.converged = total.error <= std::max(tol.abs, tol.rel * total.abs) * 1.0000001;
  return total;
}

/// Appends the parameters t at which the line p + t d (|d| = 1) may carry a
/// discontinuity of the integrand (or of its derivatives).
using Breakpoints = std::function<void(const Vec& p, const Vec& d, std::vector<double>& out)>;

/// Parameters where the line p + t d crosses the sphere bounding `ball`.
void sphere_crossings(const Vec& p, const Vec& d, const Ball& ball, std::vector<double>& out);

/// Parameter where the line crosses the plane {<x - y0, normal> = 0}, if any.
void plane_crossing(const Vec& p, const Vec& d, const Vec& y0, const Vec& normal, std::vector<double>& out);

/// A k-dimensional ball (k = 1, 2, 3) spanned by the first k frame vectors.
struct BallDomain {
  Vec center{};
  double radius = 0.0;
  std::array<Vec, 3> frame{Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}};
  int k = 1;
};

namespace detail {

template <class T, class F>
Estimate<T> integrate_line(const Vec& p, const Vec& d, double r, F& f, const Breakpoints& br,
                           const Tolerance& tol, std::vector<double>& scratch) {
  scratch.clear();
  if (br) br(p, d, scratch);
  std::vector<double> cuts;
  cuts.reserve(scratch.size() + 2);
  cuts.push_back(-r);
  for (double t : scratch)
    if (t > -r && t < r) cuts.push_back(t);
  cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  Estimate<T> total;
  auto sample = [&](double t) {
    T v = f(p + t * d);
    return Sample<T>{v, magnitude(v)};
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] <= 1e-15 * r) continue;
    total += integrate<T>(sample, cuts[i], cuts[i + 1], tol);
  }
  return total;
}

template <class T, class F>
Estimate<T> integrate_ball_impl(const Vec& center, double r, std::span<const Vec> frame, F& f,
                                const Breakpoints& br, const Tolerance& tol) {
  if (r <= 0.0) return {};
  if (frame.size() == 1) {
    std::vector<double> scratch;
    return integrate_line<T>(center, frame[0], r, f, br, tol, scratch);
  }
  // Outer coordinate u = r sin(theta) removes the square-root behaviour of
  // slice radii at the rim.
  Tolerance inner = tol;
  inner.rel = tol.rel * 0.05;
  inner.abs = tol.abs * 0.05 / (2.0 * r);
  Tolerance outer = tol;
  outer.guard_ends = true;
  bool inner_ok = true;
  auto slice = [&](double theta) {
    const double c = std::cos(theta);
    const double u = r * std::sin(theta);
    auto est = integrate_ball_impl<T>(center + u * frame[0], r * c, frame.subspan(1), f, br, inner);
    inner_ok = inner_ok && est.converged;
    return Sample<T>{est.value * (r * c), est.abs * (r * c)};
  };
  auto out = integrate<T>(slice, -std::numbers::pi / 2, std::numbers::pi / 2, outer);
  out.converged = out.converged && inner_ok;
  return out;
}

}  // namespace detail

/// Integrates f over a ball domain. Discontinuities of f must be announced
/// through `br`; the integrator resolves them exactly on the innermost lines.
template <class T, class F>
Estimate<T> integrate_ball(const BallDomain& dom, F&& f, const Breakpoints& br, const Tolerance& tol = {}) {
  std::array<Vec, 3> frame = dom.frame;
  const std::span<const Vec> axes(frame.data(), static_cast<std::size_t>(dom.k));
  if (dom.k < 2 || tol.abs > 0.0 || tol.rel >= 1e-4)
    return detail::integrate_ball_impl<T>(dom.center, dom.radius, axes, f, br, tol);
  // A coarse pass fixes the absolute scale, so slices whose contribution is
  // negligible are not resolved to full relative accuracy.
  Tolerance pilot = tol;
  pilot.rel = 1e-4;
  const double scale = detail::integrate_ball_impl<T>(dom.center, dom.radius, axes, f, br, pilot).abs;
  Tolerance fine = tol;
  fine.abs = 0.5 * tol.rel * scale;
  auto out = detail::integrate_ball_impl<T>(dom.center, dom.radius, axes, f, br, fine);
  out.converged = out.error <= std::max(fine.abs, tol.rel * out.abs) * 1.0000001;
  return out;
}

/// Orthonormal frame whose last vector is `normal`; the first vectors span the
/// orthogonal complement. Seeded by the coordinate axis least aligned with
/// `normal` (or by `seed_axis` when given, 0..n-1).
std::array<Vec, 3> orthonormal_frame(const Vec& normal, int dim, int seed_axis = -1);

}  // namespace helgason::quad
