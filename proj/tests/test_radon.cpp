#include "doctest.h"

#include <cstdio>
#include <random>

#include "helgason/radon.hpp"

using namespace helgason;

namespace {

const double pi = std::numbers::pi;

PhantomSpec ball(int dim, Vec c = {}, double r = 1.0, double amp = 1.0) {
  PhantomSpec s;
  s.kind = PhantomKind::ball_indicator;
  s.dim = dim;
  s.center = c;
  s.radius = r;
  s.amplitude = amp;
  return s;
}

PhantomSpec gaussian(int dim, double sigma, double trunc) {
  PhantomSpec s;
  s.kind = PhantomKind::gaussian_truncated;
  s.dim = dim;
  s.radius = sigma;
  s.truncation_radius = trunc;
  return s;
}

double chord(double t) { return std::abs(t) < 1.0 ? 2.0 * std::sqrt(1.0 - t * t) : 0.0; }

}  // namespace

TEST_CASE("plane integrals of unit balls") {
  auto f2 = make_phantom(ball(2));
  for (double th : {0.0, 0.7, 2.0, 4.5}) {
    const Vec w{std::cos(th), std::sin(th), 0};
    CHECK(plane_integral(f2, {}, 0.6, w) == doctest::Approx(1.6).epsilon(1e-12));
  }
  auto f3 = make_phantom(ball(3));
  const Vec w{0.48, 0.6, 0.64};
  CHECK(plane_integral(f3, {}, 0.0, w) == doctest::Approx(pi).epsilon(1e-10));
  CHECK(plane_integral(f3, {}, 0.3, w) == doctest::Approx(pi * 0.91).epsilon(1e-10));
  CHECK(plane_integral(f3, {}, 1.2, w) == 0.0);
}

TEST_CASE("gaussian plane integral") {
  const double h = 0.3;
  auto f = make_phantom(gaussian(2, std::sqrt(h), 8.0));
  for (double s : {0.0, 0.4, -1.1})
    CHECK(plane_integral(f, {}, s, Vec{0.8, -0.6, 0}) ==
          doctest::Approx(std::sqrt(2 * pi * h) * std::exp(-s * s / (2 * h))).epsilon(1e-9));
}

TEST_CASE("frame invariance in three dimensions") {
  PhantomSpec s = ball(3, {0.2, -0.1, 0.3}, 0.9);
  s.kind = PhantomKind::halfspace_cut_ball;
  s.cut = std::make_pair(Vec{0.2, -0.1, 0.6}, Vec{0, 0, 1});
  auto f = make_phantom(s);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 20; ++k) {
    Vec w{nd(rng), nd(rng), nd(rng)};
    w = (1.0 / norm(w)) * w;
    const double sv = 0.5 * nd(rng);
    const double a = plane_integral(f, {}, sv, w, 0, 1e-12);
    const double b = plane_integral(f, {}, sv, w, 2, 1e-12);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("sinogram of the unit disk") {
  auto f = make_phantom(ball(2));
  auto g = radon(f, {}, 129, uniform_circle(16));
  CHECK(g.ns() == 129);
  CHECK(g.s.front() == -1.0);
  CHECK(g.s.back() == 1.0);
  for (std::size_t j = 0; j < g.ndir(); ++j)
    for (std::size_t i = 0; i < g.ns(); ++i) CHECK(g.at(j, i) == doctest::Approx(chord(g.s[i])).epsilon(1e-9));
  // value(-s,-omega) = value(s,omega) bitwise
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t i = 0; i < g.ns(); ++i) CHECK(g.at(j, i) == g.at(j + 8, g.ns() - 1 - i));
}

TEST_CASE("evenness on a symmetric sphere grid") {
  PhantomSpec s = ball(3, {0.3, 0.1, -0.2}, 0.6);
  s.kind = PhantomKind::smooth_bump;
  auto f = make_phantom(s);
  auto dirs = gauss_product_sphere(32);
  auto g = radon(f, {}, 33, dirs);
  const std::size_t n = dirs.size();
  int matched = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (dirs.dirs[k] == -1.0 * dirs.dirs[j]) {
        ++matched;
        for (std::size_t i = 0; i < g.ns(); ++i) CHECK(g.at(j, i) == g.at(k, g.ns() - 1 - i));
      }
  CHECK(matched == static_cast<int>(n));
}

TEST_CASE("shift covariance and mass") {
  PhantomSpec s = ball(2, {0.3, -0.4, 0}, 0.7);
  s.kind = PhantomKind::smooth_bump;
  auto f = make_phantom(s);
  const Vec y0{0.5, 0.2, 0};
  const Vec w{std::cos(1.1), std::sin(1.1), 0};
  for (double sv : {-0.3, 0.0, 0.45})
    CHECK(plane_integral(f, y0, sv, w) == doctest::Approx(plane_integral(f, {}, sv + dot(y0, w), w)).epsilon(1e-10));

  auto g = radon(f, y0, 257, uniform_circle(8));
  const double mass = lp_norm(f, 1.0);
  for (std::size_t j = 0; j < g.ndir(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.ns(); ++i) m += g.trapezoid_weight(i) * g.at(j, i);
    CHECK(m == doctest::Approx(mass).epsilon(1e-4));
  }
}

TEST_CASE("too narrow grids and bad directions are rejected") {
  auto f = make_phantom(ball(2, {0.5, 0, 0}));
  CHECK_THROWS_AS(radon(f, {}, 65, uniform_circle(8), 1.2), ValidationError);
  CHECK_NOTHROW(radon(f, {}, 65, uniform_circle(8), 1.5));
  CHECK_THROWS_AS(uniform_circle(0), ValidationError);
  CHECK_THROWS_AS(radon(f, {}, 65, gauss_product_sphere(8)), ValidationError);
  try {
    radon(f, {}, 65, uniform_circle(8), 1.0);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1.5") != std::string::npos);
  }
}

TEST_CASE("X-norm") {
  auto f = make_phantom(ball(2));
  auto g = radon(f, {}, 2049, uniform_circle(8));
  CHECK(x_norm(g) == doctest::Approx(2 * pi * (5 * pi / 4 + 8.0 / 3.0)).epsilon(1e-4));
  CHECK(x_norm(g) <= weighted_moment(f));
  CHECK(x_norm(radon(zero_field(2), {}, 33, uniform_circle(8), 1.0)) == 0.0);
  auto gy = radon(f, Vec{0.1, 0, 0}, 65, uniform_circle(8));
  CHECK_THROWS_AS(x_norm(gy), ValidationError);

  PhantomSpec s = ball(3, {0.4, 0.2, -0.3}, 0.8);
  s.kind = PhantomKind::smooth_bump;
  auto f3 = make_phantom(s);
  CHECK(x_norm(radon(f3, {}, 65, gauss_product_sphere(50))) <= weighted_moment(f3));
}

TEST_CASE("restricted integral against an analytic oracle") {
  auto f = make_phantom(ball(2));
  RestrictedWindow w;
  w.y0 = Vec{1, 0, 0};
  w.omega0 = Vec{1, 0, 0};
  w.alpha = 0.5;
  w.beta = 0.5;
  auto g = radon(f, w.y0, 513, uniform_circle(1024));
  const double value = restricted_integral(g, w);

  // I = int_{cap} int_{|s|<alpha} (1+|s|)^2 chord(cos(th) + s) ds dth
  const double phi = std::asin(w.beta);
  quad::Tolerance tol{1e-11, 0, 4000};
  auto inner = [&](double th) {
    const double c = std::cos(th);
    double total = 0.0;
    const double lo = std::max(-w.alpha, -1.0 - c), hi = std::min(w.alpha, 1.0 - c);
    auto fs = [&](double sv) {
      const double v = (1 + std::abs(sv)) * (1 + std::abs(sv)) * chord(c + sv);
      return quad::Sample<double>{v, v};
    };
    if (lo < std::min(0.0, hi)) total += quad::integrate<double>(fs, lo, std::min(0.0, hi), tol).value;
    if (std::max(0.0, lo) < hi) total += quad::integrate<double>(fs, std::max(0.0, lo), hi, tol).value;
    return quad::Sample<double>{total, total};
  };
  double oracle = 0.0;
  for (double c0 : {0.0, pi}) oracle += quad::integrate<double>(inner, c0 - phi, c0 + phi, tol).value;
  CHECK(value == doctest::Approx(oracle).epsilon(1e-3));

  // Monotone in alpha and beta, linear in f.
  RestrictedWindow w2 = w;
  w2.alpha = 0.6;
  CHECK(restricted_integral(g, w2) >= value);
  w2 = w;
  w2.beta = 0.7;
  CHECK(restricted_integral(g, w2) >= value);
  auto g3 = radon(scaled(f, 3.0), w.y0, 513, uniform_circle(1024));
  CHECK(restricted_integral(g3, w) == doctest::Approx(3.0 * value).epsilon(1e-12));
}

TEST_CASE("restricted integral vanishes when the window misses the support") {
  auto f = make_phantom(ball(2, {3, 0, 0}, 0.5));
  RestrictedWindow w;
  w.omega0 = Vec{1, 0, 0};
  w.alpha = 0.5;
  w.beta = 0.5;
  auto g = radon(f, {}, 257, uniform_circle(256));
  CHECK(restricted_integral(g, w) == 0.0);
  RestrictedWindow bad = w;
  bad.y0 = Vec{0.1, 0, 0};
  CHECK_THROWS_AS(restricted_integral(g, bad), ValidationError);
  auto coarse = radon(f, {}, 257, uniform_circle(32));
  CHECK_THROWS_AS(restricted_integral(coarse, w), ValidationError);
}

TEST_CASE("riesz filter") {
  // Second power is -d^2/ds^2.
  const int n = 401;
  const double ds = 0.05;
  std::vector<double> col(n);
  for (int i = 0; i < n; ++i) {
    const double s = (i - 200) * ds;
    col[i] = std::exp(-s * s / 2);
  }
  auto r2 = riesz_filter_column(col, ds, 2);
  for (int i = 100; i <= 300; i += 20) {
    const double fd = -(col[i + 1] - 2 * col[i] + col[i - 1]) / (ds * ds);
    CHECK(r2[i] == doctest::Approx(fd).epsilon(2e-3));
  }
  std::vector<double> flat(n, 1.0);
  auto r0 = riesz_filter_column(flat, ds, 2);
  for (int i = 100; i <= 300; ++i) CHECK(std::abs(r0[i]) < 1e-3);

  // First power against the oscillatory integral (2/pi)^{1/2} int_0^inf t e^{-t^2/2} cos(t s) dt.
  auto r1 = riesz_filter_column(col, ds, 1);
  for (int i = 120; i <= 280; i += 16) {
    const double s = (i - 200) * ds;
    auto fs = [s](double t) {
      const double v = t * std::exp(-t * t / 2) * std::cos(t * s);
      return quad::Sample<double>{v, std::abs(v)};
    };
    const double oracle = std::sqrt(2 / pi) * quad::integrate<double>(fs, 0.0, 40.0, {1e-13, 0, 4000}).value;
    CHECK(std::abs(r1[i] - oracle) < 1e-6);
  }
}

TEST_CASE("riesz pairing") {
  auto f = make_phantom(gaussian(2, 1.0, 8.0));
  auto g = radon(f, {}, 321, uniform_circle(64));
  CHECK(riesz_pairing(g, g) == doctest::Approx(pi).epsilon(1e-6));

  auto a = make_phantom(ball(2, {-2, 0, 0}, 0.5));
  auto b = make_phantom(ball(2, {2, 0, 0}, 0.5));
  auto ga = radon(a, {}, 401, uniform_circle(64), 2.5);
  auto gb = radon(b, {}, 401, uniform_circle(64), 2.5);
  CHECK(std::abs(riesz_pairing(ga, gb)) < 1e-2 * riesz_pairing(ga, ga));
  CHECK(riesz_pairing(ga, ga) == doctest::Approx(pi * 0.25).epsilon(2e-2));
  CHECK_THROWS_AS(riesz_pairing(ga, g), ValidationError);

  auto f3 = make_phantom(gaussian(3, 1.0, 6.5));
  auto g3 = radon(f3, {}, 129, gauss_product_sphere(64));
  CHECK(riesz_pairing(g3, g3) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-6));
}

TEST_CASE("radon sobolev functional") {
  CHECK(radon_sobolev_norm(radon(zero_field(3), {}, 33, gauss_product_sphere(32), 1.0)) == 0.0);
  for (int dim : {2, 3}) {
    auto q = make_phantom(gaussian(dim, 1.0, 6.5));
    auto dirs = default_directions(dim, dim == 2 ? 16 : 32);
    auto g = radon(q, {}, 129, dirs);
    const double l2 = std::pow(pi, dim / 2.0);
    CHECK(radon_sobolev_norm(g) == doctest::Approx(l2).epsilon(1e-3));
    CHECK(radon_sobolev_raw(g) / l2 == doctest::Approx(sobolev_gaussian_ratio(dim, 1.0)).epsilon(1e-3));

    auto q2 = make_phantom(gaussian(dim, 0.5, 3.25));
    auto g2 = radon(q2, {}, 129, dirs);
    CHECK(radon_sobolev_raw(g2) / std::pow(pi * 0.25, dim / 2.0) ==
          doctest::Approx(sobolev_gaussian_ratio(dim, 0.5)).epsilon(1e-3));
  }
  auto b = make_phantom(ball(3));
  auto gb = radon(b, {}, 257, gauss_product_sphere(128));
  const double v = radon_sobolev_norm(gb);
  CHECK(v <= 4 * pi / 3);
  auto gc = radon(scaled(b, 3.0), {}, 257, gauss_product_sphere(128));
  CHECK(radon_sobolev_norm(gc) == doctest::Approx(9 * v).epsilon(1e-10));
}

TEST_CASE("two-dimensional sobolev ratio closed form") {
  // J(a) = int sqrt(1+t^2) e^{-a t^2} dt
  for (double a : {0.25, 1.0, 3.0}) {
    auto fj = [a](double t) {
      const double v = 2 * std::sqrt(1 + t * t) * std::exp(-a * t * t);
      return quad::Sample<double>{v, v};
    };
    const double J = quad::integrate<double>(fj, 0.0, 40.0, {1e-13, 0, 4000}).value;
    CHECK(sobolev_gaussian_ratio(2, std::sqrt(a)) == doctest::Approx(8 * pi * pi * a * J).epsilon(1e-12));
  }
}

TEST_CASE("L1 bound") {
  auto f = make_phantom(ball(2));
  auto g = radon(f, {}, 1025, uniform_circle(32));
  auto c = l1_sinogram_bound_check(f, g);
  CHECK(c.holds);
  CHECK(c.rhs == doctest::Approx(2 * pi * pi).epsilon(1e-9));
  CHECK(c.lhs == doctest::Approx(2 * pi * pi).epsilon(1e-4));

  auto alt = sum(make_phantom(ball(2, {-0.5, 0, 0}, 0.5)), make_phantom(ball(2, {0.5, 0, 0}, 0.5, -1.0)));
  auto ga = radon(alt, {}, 1025, uniform_circle(32));
  auto ca = l1_sinogram_bound_check(alt, ga);
  CHECK(ca.holds);
  CHECK(ca.lhs < 0.9 * ca.rhs);

  auto z = l1_sinogram_bound_check(zero_field(2), radon(zero_field(2), {}, 33, uniform_circle(8), 1.0));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.holds);
}

TEST_CASE("CSV round trip") {
  PhantomSpec s = ball(3, {0.1, 0.2, 0.3}, 0.5);
  s.kind = PhantomKind::smooth_bump;
  auto g = radon(make_phantom(s), Vec{0.1, 0, 0}, 17, gauss_product_sphere(16));
  const std::string text = sinogram_to_csv(g);
  CHECK(text.rfind("# dim=3\n# y0=0.10000000000000001,0,0\n# ds=", 0) == 0);
  auto back = sinogram_from_csv(text);
  CHECK(back.dim == 3);
  CHECK(back.y0 == g.y0);
  CHECK(back.ds == g.ds);
  CHECK(back.s == g.s);
  CHECK(back.values == g.values);
  CHECK(back.directions.dirs == g.directions.dirs);
  CHECK(back.directions.weights == g.directions.weights);
  CHECK(sinogram_to_csv(back) == text);

  CHECK_THROWS_AS(sinogram_from_csv("# dim=2\n1,2\n"), ValidationError);
  CHECK_THROWS_AS(read_sinogram_csv("/nonexistent/sino.csv"), IoError);
}
