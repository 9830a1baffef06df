#include "helgason/bargmann.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

#include "helgason/parallel.hpp"

namespace helgason {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ValidationError("dimension must be 2 or 3 (got " + std::to_string(dim) + ")");
}

bool finite_vec(const Vec& v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

// Nodes and coefficients of the Fourier form of G_n for one imaginary part:
// G_n(s, a + ib) = pref * sum_k c_k exp(i freq_k (s - a)).
struct EvenRule {
  std::vector<double> freq;
  std::vector<double> coef;
  double abs_sum = 0.0;
  double log_pref = 0.0;  // log of h^{-(n-1)/2} (2 pi)^{-1/2} exp(p^2/2)
};

EvenRule make_even_rule(int n, double b, double h, int nodes) {
  const double sq = std::sqrt(h);
  const double p = b / sq;
  // sigma = p + t, t in [-12, 12]; |sigma|^{n-1} has its kink at t = -p.
  std::vector<double> cuts{-12.0};
  if (-p > -12.0 && -p < 12.0) cuts.push_back(-p);
  cuts.push_back(12.0);
  const quad::Rule& gl = quad::gauss_legendre(nodes);
  EvenRule r;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    const double hw = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int k = 0; k < nodes; ++k) {
      const double t = mid + hw * gl.nodes[k];
      const double sigma = p + t;
      const double w = hw * gl.weights[k] * std::pow(std::abs(sigma), n - 1) * std::exp(-0.5 * t * t);
      r.freq.push_back(sigma / sq);
      r.coef.push_back(w);
      r.abs_sum += std::abs(w);
    }
  }
  r.log_pref = -0.5 * (n - 1) * std::log(h) - 0.5 * std::log(2.0 * kPi) + 0.5 * p * p;
  return r;
}

cplx eval_rule(const EvenRule& r, double x) {
  cplx acc{};
  for (std::size_t k = 0; k < r.freq.size(); ++k) acc += r.coef[k] * std::polar(1.0, r.freq[k] * x);
  return acc;
}

// Doubles the node count until the value at offset x_max (the fastest
// oscillation needed) changes by less than rel_tol of the absolute sum.
EvenRule converged_even_rule(int n, double b, double h, double x_max, double rel_tol) {
  int nodes = 400;
  EvenRule cur = make_even_rule(n, b, h, nodes);
  cplx v = eval_rule(cur, x_max);
  for (; nodes <= 51200; nodes *= 2) {
    EvenRule next = make_even_rule(n, b, h, 2 * nodes);
    const cplx w = eval_rule(next, x_max);
    if (std::abs(w - v) <= rel_tol * next.abs_sum) return next;
    cur = std::move(next);
    v = w;
  }
  throw ConvergenceError("kernel quadrature did not converge at offset " + std::to_string(x_max));
}

// exp(log_scale) G_n(s, w) for odd n.
cplx odd_kernel_scaled(int n, double s, cplx w, double h, double log_scale) {
  const cplx u = (s - w) / std::sqrt(h);
  return std::exp(-0.5 * u * u + log_scale) * hermite_q(n, u) * std::pow(h, -0.5 * (n - 1));
}

// G_2 = 2 (2 pi h)^{-1/2} (1 - 2c F(c)), c = (s - w)^2 / 2h and
// F(c) = int_0^1 exp(c (t^2 - 1)) dt. Near the real c axis, or for Re c <= 0,
// F is integrated on [0, 1] after one integration by parts. Otherwise the
// segment is replaced by the two steepest descent rays from t = 0 and t = 1,
// which removes the oscillation that cancels on [0, 1].
cplx even2_kernel(double s, cplx w, double h) {
  const cplx u = (s - w) / std::sqrt(h);
  const cplx c = 0.5 * u * u;
  quad::Tolerance tol;
  tol.rel = 1e-13;
  tol.max_intervals = 20000;
  cplx bracket;
  if (c.real() <= 0.0 || std::abs(c.imag()) < 1.0) {
    tol.initial_panels = 4 + static_cast<int>(std::min(std::abs(c.imag()) / 4.0, 400.0));
    auto body = [&](double t) {
      const cplx v = (t - 1.0) * std::exp(c * (t * t - 1.0));
      return quad::Sample<cplx>{v, std::abs(v)};
    };
    bracket = std::exp(-c) + 2.0 * c * quad::integrate<cplx>(body, 0.0, 1.0, tol).value;
  } else {
    // 1 - (1 - r/c)^{-1/2} written without cancellation.
    auto body = [&](double r) {
      const cplx q = 1.0 - r / c;
      const cplx sq = std::sqrt(q);
      const cplx v = std::exp(-r) * (-r / c) / (sq * (sq + 1.0));
      return quad::Sample<cplx>{v, std::abs(v)};
    };
    const double r_max = 45.0;
    const double kink = c.real();
    cplx tail = 0.0;
    if (kink < r_max) {
      tail = quad::integrate<cplx>(body, 0.0, kink, tol).value + quad::integrate<cplx>(body, kink, r_max, tol).value;
    } else {
      tail = quad::integrate<cplx>(body, 0.0, r_max, tol).value;
    }
    bracket = -std::sqrt(kPi) * c * std::sqrt(-1.0 / c) * std::exp(-c) + tail;
  }
  return 2.0 / std::sqrt(2.0 * kPi * h) * bracket;
}

BargmannSample from_scaled(const ComplexPoint& z, double h, cplx scaled) {
  BargmannSample out;
  out.point = z;
  out.h = h;
  out.weighted = std::abs(scaled);
  out.value = scaled * std::exp(dot(z.im, z.im) / (2.0 * h));
  return out;
}

void check_coverage(const Sinogram& g) {
  const double half = g.s.back();
  if (g.support_extent) {
    if (half < *g.support_extent * (1.0 - 1e-9)) {
      std::ostringstream msg;
      msg << "sinogram s range [-" << half << ", " << half << "] does not cover the support; required range is [-"
          << *g.support_extent << ", " << *g.support_extent << "]";
      throw ValidationError(msg.str());
    }
    return;
  }
  double peak = 0.0;
  for (double v : g.values) peak = std::max(peak, std::abs(v));
  const std::size_t ns = g.ns();
  for (std::size_t j = 0; j < g.ndir(); ++j) {
    if (std::abs(g.at(j, 0)) > 1e-10 * peak || std::abs(g.at(j, ns - 1)) > 1e-10 * peak) {
      std::ostringstream msg;
      msg << "sinogram does not vanish at the ends of its s range [-" << half << ", " << half
          << "]; the kernel needs a range covering the support";
      throw ValidationError(msg.str());
    }
  }
}

}  // namespace

cplx ComplexPoint::square() const {
  cplx acc{};
  for (int k = 0; k < 3; ++k) {
    const cplx zk{re[k], im[k]};
    acc += zk * zk;
  }
  return acc;
}

void ComplexPoint::validate() const {
  check_dim(dim);
  if (!finite_vec(re) || !finite_vec(im)) throw ValidationError("complex point has non-finite components");
  if (dim == 2 && (re[2] != 0.0 || im[2] != 0.0)) throw ValidationError("2-D complex point has a third component");
}

bool check_h(double h) {
  if (!std::isfinite(h) || !(h > 0.0)) throw ValidationError("h must be positive (got " + std::to_string(h) + ")");
  return h > 1.0;
}

BargmannSample sb_direct_sample(const SampledField& f, const ComplexPoint& z, double h, double rel_tol) {
  check_h(h);
  z.validate();
  if (z.dim != f.dim()) throw ValidationError("complex point dimension does not match the field");
  if (f.is_zero()) return from_scaled(z, h, 0.0);
  const double inv = 1.0 / (2.0 * h);
  const Vec re = z.re, im = z.im;
  auto g = [&](const Vec& y, double v) {
    const Vec d = re - y;
    return v * std::exp(-dot(d, d) * inv) * std::polar(1.0, -dot(d, im) / h);
  };
  quad::Tolerance tol;
  tol.rel = rel_tol;
  auto est = integrate_field<cplx>(f, g, Ball{re, std::sqrt(80.0 * h)}, tol);
  if (!est.converged && est.error > 1e3 * rel_tol * std::max(est.abs, 1e-300))
    throw ConvergenceError("Segal-Bargmann quadrature did not converge (achieved error " +
                           std::to_string(est.error) + ")");
  return from_scaled(z, h, est.value);
}

cplx sb_direct(const SampledField& f, const ComplexPoint& z, double h, double rel_tol) {
  return sb_direct_sample(f, z, h, rel_tol).value;
}

std::vector<double> hermite_q_coefficients(int n) {
  if (n < 1 || n % 2 == 0)
    throw ValidationError("the Hermite kernel form needs an odd dimension (got " + std::to_string(n) + ")");
  // He_{k+1} = x He_k - k He_{k-1}
  std::vector<double> prev{1.0}, cur{0.0, 1.0};
  const int m = n - 1;
  if (m == 0) return {1.0};
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) next[i + 1] += cur[i];
    for (int i = 0; i < k; ++i) next[i] -= k * prev[i];
    prev = std::move(cur);
    cur = std::move(next);
  }
  const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
  for (double& c : cur) c *= sign;
  return cur;
}

cplx hermite_q(int n, cplx u) {
  static const std::vector<std::vector<double>> table = [] {
    std::vector<std::vector<double>> t(16);
    for (int k = 1; k < 16; k += 2) t[k] = hermite_q_coefficients(k);
    return t;
  }();
  std::vector<double> other;
  if (!(n > 0 && n < 16 && n % 2 == 1)) other = hermite_q_coefficients(n);
  const auto& c = other.empty() ? table[n] : other;
  cplx acc{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

double hermite_q_bound(int n) {
  double a = 0.0;
  for (double c : hermite_q_coefficients(n)) a += std::abs(c);
  return a;
}

cplx kernel_g(int n, double s, cplx w, double h) {
  check_h(h);
  if (n < 1) throw ValidationError("dimension must be positive");
  if (n % 2 == 1) return odd_kernel_scaled(n, s, w, h, 0.0);
  if (n == 2) return even2_kernel(s, w, h);
  return kernel_g_integral(n, s, w, h);
}

cplx kernel_g_integral(int n, double s, cplx w, double h, double rel_tol) {
  check_h(h);
  if (n < 1) throw ValidationError("dimension must be positive");
  const double x = s - w.real();
  const EvenRule r = converged_even_rule(n, w.imag(), h, x, rel_tol);
  return std::exp(r.log_pref) * eval_rule(r, x);
}

double kernel_bound_shape(int n, double s, cplx w, double h) {
  check_h(h);
  const double d = std::abs(s - w);
  const double x = s - w.real();
  return std::pow(h, -0.5 * (n - 1)) * std::pow(1.0 + d / std::sqrt(h), n) *
         (1.0 + std::exp((w.imag() * w.imag() - x * x) / (2.0 * h)));
}

double kernel_bound(int n, double s, cplx w, double h, double b_n) { return b_n * kernel_bound_shape(n, s, w, h); }

BargmannSample sb_from_radon_sample(const Sinogram& g, const ComplexPoint& z, double h) {
  check_h(h);
  z.validate();
  if (z.dim != g.dim) throw ValidationError("complex point dimension does not match the sinogram");
  if (g.ns() < 2 || g.ndir() == 0) throw ValidationError("sinogram is empty");
  check_coverage(g);
  const int n = g.dim;
  const std::size_t ns = g.ns();
  const double log_scale = -dot(z.im, z.im) / (2.0 * h);
  const Vec re = z.re - g.y0;

  std::vector<double> tw(ns);
  for (std::size_t i = 0; i < ns; ++i) tw[i] = g.trapezoid_weight(i);

  std::vector<cplx> partial(g.ndir());
  parallel_for(g.ndir(), [&](std::size_t j) {
    const Vec& om = g.directions.dirs[j];
    const cplx w{dot(om, re), dot(om, z.im)};
    std::size_t lo = ns, hi = 0;
    for (std::size_t i = 0; i < ns; ++i)
      if (g.at(j, i) != 0.0) {
        lo = std::min(lo, i);
        hi = i;
      }
    if (lo > hi) return;
    cplx acc{};
    if (n % 2 == 1) {
      for (std::size_t i = lo; i <= hi; ++i)
        acc += tw[i] * g.at(j, i) * odd_kernel_scaled(n, g.s[i], w, h, log_scale);
    } else {
      const double a = w.real();
      const double x_max = std::max(std::abs(g.s[lo] - a), std::abs(g.s[hi] - a));
      const EvenRule r = converged_even_rule(n, w.imag(), h, x_max, 1e-10);
      for (std::size_t k = 0; k < r.freq.size(); ++k) {
        // exp(i freq (s_i - a)) by recurrence in i, resynchronized every 64 steps
        const cplx step = std::polar(1.0, r.freq[k] * g.ds);
        cplx e{};
        cplx col{};
        for (std::size_t i = lo; i <= hi; ++i) {
          if ((i - lo) % 64 == 0)
            e = std::polar(1.0, r.freq[k] * (g.s[i] - a));
          else
            e *= step;
          col += (tw[i] * g.at(j, i)) * e;
        }
        acc += r.coef[k] * col;
      }
      acc *= std::exp(r.log_pref + log_scale);
    }
    partial[j] = g.directions.weights[j] * acc;
  });
  cplx total{};
  for (const cplx& p : partial) total += p;
  total *= 0.5 * std::pow(2.0 * kPi, -0.5 * (n - 1)) * std::pow(h, 0.5 * (n - 1));
  return from_scaled(z, h, total);
}

cplx sb_from_radon(const Sinogram& g, const ComplexPoint& z, double h) { return sb_from_radon_sample(g, z, h).value; }

BoundCheck growth_bound_check(const SampledField& f, const ComplexPoint& z, double h) {
  const double rel = 1e-9;
  const BargmannSample s = sb_direct_sample(f, z, h, rel);
  BoundCheck c;
  c.lhs = s.weighted;
  c.rhs = std::pow(2.0 * kPi * h, 0.5 * f.dim()) * f.sup_norm();
  c.holds = c.lhs <= c.rhs * (1.0 + 10.0 * rel);
  return c;
}

BoundCheck support_side_bound_check(const SampledField& f, const ComplexPoint& z, double h) {
  if (!f.halfspace()) throw ValidationError("field carries no halfspace assertion (y0, omega0)");
  const Halfspace& hs = *f.halfspace();
  const double rel = 1e-9;
  const BargmannSample s = sb_direct_sample(f, z, h, rel);
  const double t = std::max(0.0, dot(z.re - hs.y0, hs.omega0));
  BoundCheck c;
  c.lhs = s.weighted;
  c.rhs = std::pow(2.0 * kPi * h, 0.5 * f.dim()) * std::exp(-t * t / (2.0 * h)) * f.sup_norm();
  c.holds = c.lhs <= c.rhs * (1.0 + 10.0 * rel);
  return c;
}

std::vector<double> geometric_h_grid(double h_max, double h_min, int count) {
  if (count < 2 || !(h_min > 0.0) || !(h_max > h_min)) throw ValidationError("invalid geometric h grid");
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) out[k] = h_max * std::pow(h_min / h_max, static_cast<double>(k) / (count - 1));
  return out;
}

SmallnessFit fit_exponential_smallness(const SampledField& f, const ComplexPoint& z0,
                                       const std::vector<double>& h_grid, double rel_tol) {
  if (h_grid.size() < 6) throw ValidationError("exponential smallness fit needs at least 6 values of h");
  for (double h : h_grid)
    if (!(h > 0.0 && h <= 1.0)) throw ValidationError("fit values of h must lie in (0, 1]");
  const double ratio = h_grid[1] / h_grid[0];
  if (std::abs(ratio - 1.0) < 1e-12) throw ValidationError("h grid must not repeat values");
  for (std::size_t k = 2; k < h_grid.size(); ++k)
    if (std::abs(h_grid[k] / h_grid[k - 1] - ratio) > 1e-6 * ratio)
      throw ValidationError("h grid must be geometrically spaced");

  SmallnessFit fit;
  fit.h = h_grid;
  fit.weighted.resize(h_grid.size());
  parallel_for(h_grid.size(), [&](std::size_t k) {
    fit.weighted[k] = sb_direct_sample(f, z0, h_grid[k], rel_tol).weighted;
  });

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    if (!(fit.weighted[k] >= 1e-300)) continue;
    xs.push_back(1.0 / h_grid[k]);
    ys.push_back(std::log(fit.weighted[k]) - 0.5 * f.dim() * std::log(2.0 * kPi * h_grid[k]));
  }
  if (xs.size() < 3) {
    fit.vacuous = true;
    return fit;
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / m;
    my += ys[i] / m;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icpt + slope * xs[i]);
    sse += r * r;
  }
  fit.c = -slope;
  fit.C = std::exp(icpt) * std::pow(2.0 * kPi, 0.5 * f.dim());
  fit.residual = std::sqrt(sse / m);
  fit.slope_stderr = std::sqrt(sse / std::max(1.0, m - 2.0) / sxx);
  return fit;
}

std::vector<BargmannQuery> parse_queries_jsonl(const std::string& text, int dim, std::optional<double> h_override) {
  check_dim(dim);
  if (h_override) check_h(*h_override);
  std::vector<BargmannQuery> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto read_vec = [&](const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != static_cast<std::size_t>(dim))
      throw ValidationError("line " + std::to_string(lineno) + ": \"" + key + "\" must be an array of " +
                            std::to_string(dim) + " numbers");
    Vec v{};
    for (int k = 0; k < dim; ++k) {
      if (!j[key][k].is_number())
        throw ValidationError("line " + std::to_string(lineno) + ": \"" + key + "\" must hold numbers");
      v[k] = j[key][k].get<double>();
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw ValidationError("line " + std::to_string(lineno) + ": expected a JSON object");
    BargmannQuery q;
    q.point.dim = dim;
    q.point.re = read_vec(j, "re");
    q.point.im = read_vec(j, "im");
    if (h_override) {
      q.h = *h_override;
    } else {
      if (!j.contains("h") || !j["h"].is_number())
        throw ValidationError("line " + std::to_string(lineno) + ": \"h\" must be a number");
      q.h = j["h"].get<double>();
    }
    check_h(q.h);
    q.point.validate();
    out.push_back(q);
  }
  return out;
}

std::string samples_to_jsonl(const std::vector<BargmannSample>& samples) {
  std::string out;
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["value_re"] = s.value.real();
    j["value_im"] = s.value.imag();
    j["weighted"] = s.weighted;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<BargmannSample> sb_direct_batch(const SampledField& f, const std::vector<BargmannQuery>& q) {
  std::vector<BargmannSample> out(q.size());
  parallel_for(q.size(), [&](std::size_t i) { out[i] = sb_direct_sample(f, q[i].point, q[i].h); });
  return out;
}

std::vector<BargmannSample> sb_from_radon_batch(const Sinogram& g, const std::vector<BargmannQuery>& q) {
  std::vector<BargmannSample> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = sb_from_radon_sample(g, q[i].point, q[i].h);
  return out;
}

}  // namespace helgason
