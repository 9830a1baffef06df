#include "doctest.h"

#include <random>

#include "helgason/bargmann.hpp"

using namespace helgason;

namespace {

const double pi = std::numbers::pi;

PhantomSpec gaussian(int dim, double sigma, double trunc, Vec c = {}) {
  PhantomSpec s;
  s.kind = PhantomKind::gaussian_truncated;
  s.dim = dim;
  s.center = c;
  s.radius = sigma;
  s.truncation_radius = trunc;
  return s;
}

PhantomSpec bump(int dim, Vec c = {}, double r = 1.0) {
  PhantomSpec s;
  s.kind = PhantomKind::smooth_bump;
  s.dim = dim;
  s.center = c;
  s.radius = r;
  return s;
}

PhantomSpec cut_ball(int dim) {
  PhantomSpec s;
  s.kind = PhantomKind::halfspace_cut_ball;
  s.dim = dim;
  s.cut = std::make_pair(Vec{1, 0, 0}, Vec{1, 0, 0});
  return s;
}

ComplexPoint point(int dim, Vec re, Vec im = {}) {
  ComplexPoint z;
  z.dim = dim;
  z.re = re;
  z.im = im;
  return z;
}

// int exp(-(z - y)^2 / 2h) exp(-|y|^2 / 2) dy
cplx gaussian_oracle(const ComplexPoint& z, double h) {
  const int n = z.dim;
  return std::pow(2.0 * pi * h / (1.0 + h), 0.5 * n) * std::exp(-z.square() / (2.0 * (1.0 + h)));
}

// e^{w^2/2} (-i d/dw)^{n-1} e^{-w^2/2}: repeated P <- P' - w P on coefficient lists.
std::vector<double> hermite_by_differentiation(int n) {
  std::vector<double> p{1.0};
  for (int k = 0; k < n - 1; ++k) {
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) q[i - 1] += i * p[i];
    for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] -= p[i];
    p = q;
  }
  if (((n - 1) / 2) % 2 == 1)
    for (double& c : p) c = -c;
  return p;
}

}  // namespace

TEST_CASE("complex point helpers") {
  auto z = point(3, {1, 3, 0}, {2, -1, 0});
  CHECK(z.square().real() == doctest::Approx(5.0));
  CHECK(z.square().imag() == doctest::Approx(-2.0));
  CHECK(z.im_norm() == doctest::Approx(std::sqrt(5.0)));
  const cplx p = z.pair(Vec{0, 1, 0});
  CHECK(p == cplx(3, -1));
  CHECK_THROWS_AS(point(2, {0, 0, 1}).validate(), ValidationError);
  CHECK_THROWS_AS(point(4, {}).validate(), ValidationError);
  CHECK_THROWS_AS(check_h(0.0), ValidationError);
  CHECK_THROWS_AS(check_h(-1.0), ValidationError);
  CHECK_FALSE(check_h(1.0));
  CHECK(check_h(1.5));
}

TEST_CASE("direct transform of a Gaussian") {
  auto f2 = make_phantom(gaussian(2, 1.0, 8.0));
  CHECK(std::abs(sb_direct(f2, point(2, {}), 1.0) - pi) < 1e-8);
  for (int n : {2, 3}) {
    auto f = make_phantom(gaussian(n, 1.0, 9.0));
    for (auto [re, im, h] : {std::tuple{Vec{0.3, -0.2, 0}, Vec{0.1, 0.4, 0}, 0.5},
                             std::tuple{Vec{1.0, 0.5, 0}, Vec{-0.3, 0, 0}, 0.2},
                             std::tuple{Vec{-0.4, 0, 0}, Vec{0, 0.6, 0}, 1.0}}) {
      if (n == 3) {
        re[2] = 0.25;
        im[2] = -0.1;
      }
      auto z = point(n, re, im);
      const cplx want = gaussian_oracle(z, h);
      const BargmannSample s = sb_direct_sample(f, z, h);
      CHECK(std::abs(s.value - want) <= 1e-8 * std::abs(want));
      CHECK(s.weighted == doctest::Approx(std::exp(-dot(im, im) / (2 * h)) * std::abs(s.value)).epsilon(1e-12));
    }
  }
}

TEST_CASE("direct transform limits") {
  PhantomSpec big;
  big.dim = 2;
  big.radius = 10.0;
  auto f = make_phantom(big);
  CHECK(std::abs(sb_direct(f, point(2, {}), 1.0) - 2.0 * pi) < 1e-8);
  CHECK(sb_direct(zero_field(2), point(2, {0.5, 0, 0}), 0.3) == cplx(0.0));
  CHECK_THROWS_AS(sb_direct(f, point(2, {}), 0.0), ValidationError);
  CHECK_THROWS_AS(sb_direct(f, point(3, {}), 1.0), ValidationError);
}

TEST_CASE("direct transform is linear") {
  auto f = make_phantom(bump(2, {0.2, 0, 0}));
  auto g = make_phantom(cut_ball(2));
  auto z = point(2, {0.4, -0.1, 0}, {0.2, 0.3, 0});
  const double h = 0.25;
  const cplx lhs = sb_direct(sum(scaled(f, 2.0), scaled(g, -0.5)), z, h);
  const cplx rhs = 2.0 * sb_direct(f, z, h) - 0.5 * sb_direct(g, z, h);
  CHECK(std::abs(lhs - rhs) < 1e-7 * std::abs(rhs));
}

TEST_CASE("Hermite polynomials") {
  CHECK(hermite_q(3, 0.0) == cplx(1.0));
  CHECK(std::abs(hermite_q(3, 1.0)) < 1e-15);
  CHECK(hermite_q(5, 0.0) == cplx(3.0));
  for (int n : {1, 3, 5, 7, 9}) {
    const auto want = hermite_by_differentiation(n);
    const auto got = hermite_q_coefficients(n);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
  }
  CHECK_THROWS_AS(hermite_q(2, 0.0), ValidationError);
  CHECK_THROWS_AS(hermite_q(4, 1.0), ValidationError);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int n : {3, 5}) {
    const double a = hermite_q_bound(n);
    for (int k = 0; k < 1000; ++k) {
      const cplx w{u(rng), u(rng)};
      CHECK(std::abs(hermite_q(n, w)) <= a * std::pow(1.0 + std::abs(w), n - 1));
    }
  }
}

TEST_CASE("kernel values") {
  CHECK(std::abs(kernel_g(3, 0.0, 0.0, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(kernel_g(3, 1.0, 0.0, 1.0)) < 1e-15);
  CHECK_THROWS_AS(kernel_g(3, 0.0, 0.0, 0.0), ValidationError);

  // The Fourier integral form agrees with the closed form in odd dimension.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> us(-4.0, 4.0), uw(-2.0, 2.0), uh(0.1, 1.0);
  for (int k = 0; k < 60; ++k) {
    const double s = us(rng), h = uh(rng);
    const cplx w{uw(rng), uw(rng)};
    const cplx a = kernel_g(3, s, w, h);
    const cplx b = kernel_g_integral(3, s, w, h);
    CHECK(std::abs(a - b) <= 1e-8 * kernel_bound_shape(3, s, w, h));
  }
}

TEST_CASE("kernel relations") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> us(-4.0, 4.0), uw(-2.0, 2.0), uh(0.1, 1.0);
  for (int n : {2, 3}) {
    for (int k = 0; k < 40; ++k) {
      const double s = us(rng), h = uh(rng);
      const cplx w{uw(rng), uw(rng)};
      const cplx g = kernel_g(n, s, w, h);
      const double scale = kernel_bound_shape(n, s, w, h);
      CHECK(std::abs(g - kernel_g(n, s - w.real(), cplx(0.0, w.imag()), h)) <= 1e-9 * scale);
      CHECK(std::abs(std::conj(g) - kernel_g(n, s, std::conj(w), h)) <= 1e-9 * scale);
      CHECK(std::abs(std::conj(g) - kernel_g(n, -s, -std::conj(w), h)) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("even kernel matches a filtered Gaussian column") {
  const double ds = 0.004;
  const int ns = 8001;
  std::vector<double> s(ns);
  for (int i = 0; i < ns; ++i) s[i] = (i - (ns - 1) / 2) * ds;
  for (auto [w, h] : {std::pair{cplx(0.3, 0.0), 0.5}, std::pair{cplx(-0.5, 0.4), 0.25}, std::pair{cplx(0.0, -0.7), 1.0}}) {
    std::vector<double> re(ns), im(ns);
    for (int i = 0; i < ns; ++i) {
      const cplx v = std::exp(-(s[i] - w) * (s[i] - w) / (2.0 * h));
      re[i] = v.real();
      im[i] = v.imag();
    }
    const auto fre = riesz_filter_column(re, ds, 1);
    const auto fim = riesz_filter_column(im, ds, 1);
    for (int i : {3000, 3700, 4000, 4100, 4500, 5200}) {
      const cplx want{fre[i], fim[i]};
      const cplx got = kernel_g(2, s[i], w, h);
      CHECK(std::abs(got - want) < 1e-6 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("even kernel far from the real axis") {
  // References from extended-precision quadrature (mpmath, 60+ digits).
  struct Ref {
    double s;
    cplx w;
    double h;
    cplx want;
  };
  const Ref refs[] = {
      {-9.7, {-4.8, -4.8}, 0.07, {-0.076746220171747220, -0.062206730283143094}},
      {3.1, {0.2, 4.0}, 0.1, {-1.3856292563718785e18, -5.6694747461850295e17}},
      {5.0, {0.5, 0.02}, 0.08, {-0.011278564653066557, -0.00010147833397078664}},
      {-7.0, {1.0, -2.5}, 0.3, {-0.0051415564435514221, -0.0036184532111285422}},
  };
  for (const Ref& r : refs) {
    const cplx got = kernel_g(2, r.s, r.w, r.h);
    CHECK(std::abs(got - r.want) < 1e-11 * std::abs(r.want));
  }
  // Agreement with the Fourier form where it does not cancel.
  for (double h : {0.2, 0.6, 1.0})
    for (cplx w : {cplx(0.4, 0.3), cplx(-1.0, -0.8)}) {
      const cplx a = kernel_g(2, 0.9, w, h), b = kernel_g_integral(2, 0.9, w, h);
      CHECK(std::abs(a - b) < 1e-9 * std::abs(b));
    }
}

TEST_CASE("kernel bound shape") {
  for (int n : {2, 3}) {
    for (double h : {0.1, 0.5, 1.0}) {
      CHECK(kernel_bound_shape(n, 0.7, 0.7, h) == doctest::Approx(2.0 * std::pow(h, -0.5 * (n - 1))));
      const double s = 0.8;
      const cplx w{-0.3, 0.5};
      const double sq = std::sqrt(h);
      CHECK(kernel_bound_shape(n, s * sq, w * sq, h) ==
            doctest::Approx(std::pow(h, -0.5 * (n - 1)) * kernel_bound_shape(n, s, w, 1.0)));
      CHECK(kernel_bound(n, s, w, h, 3.0) == doctest::Approx(3.0 * kernel_bound_shape(n, s, w, h)));
    }
  }
}

TEST_CASE("transform from Radon data in the plane") {
  auto f = make_phantom(gaussian(2, 0.6, 3.6, {0.2, -0.1, 0}));
  const Sinogram g = radon(f, {}, 129, uniform_circle(256));
  for (auto [re, im, h] : {std::tuple{Vec{0.3, 0, 0}, Vec{}, 0.5},
                           std::tuple{Vec{-0.2, 0.4, 0}, Vec{0.3, -0.2, 0}, 0.25},
                           std::tuple{Vec{0.5, 0.1, 0}, Vec{0, 0.4, 0}, 0.1},
                           std::tuple{Vec{0, -0.3, 0}, Vec{1.0, 0.2, 0}, 1.0}}) {
    auto z = point(2, re, im);
    const BargmannSample a = sb_from_radon_sample(g, z, h);
    const BargmannSample b = sb_direct_sample(f, z, h);
    CHECK(std::abs(a.value - b.value) <= 1e-4 * std::abs(b.value));
  }

  // Translated data: same transform through R_{y0}.
  const Sinogram gy = radon(f, {0.5, 0.25, 0}, 129, uniform_circle(256));
  auto z = point(2, {0.1, 0.2, 0}, {0.2, 0.1, 0});
  CHECK(std::abs(sb_from_radon(gy, z, 0.3) - sb_direct(f, z, 0.3)) <= 1e-4 * std::abs(sb_direct(f, z, 0.3)));

  Sinogram zero = radon(zero_field(2), {}, 65, uniform_circle(64), 1.0);
  CHECK(sb_from_radon(zero, point(2, {0.1, 0, 0}), 0.5) == cplx(0.0));
}

TEST_CASE("transform from Radon data in space") {
  auto f = make_phantom(gaussian(3, 0.6, 3.6, {0.1, 0, -0.2}));
  const Sinogram g = radon(f, {}, 65, gauss_product_sphere(288));
  const Vec om{0.6, 0, 0.8};
  auto z = point(3, {0.2, 0.1, 0}, -1.0 * om);
  for (double h : {0.5, 1.0}) {
    const cplx a = sb_from_radon(g, z, h);
    const cplx b = sb_direct(f, z, h);
    CHECK(std::abs(a - b) <= 1e-4 * std::abs(b));
  }
}

TEST_CASE("transform from Radon data needs the support covered") {
  auto f = make_phantom(gaussian(2, 0.6, 3.6));
  Sinogram g = radon(f, {}, 65, uniform_circle(64));
  g.s.resize(33);
  g.s.assign(33, 0.0);
  for (int i = 0; i < 33; ++i) g.s[i] = (i - 16) * g.ds;
  std::vector<double> vals;
  for (std::size_t j = 0; j < g.ndir(); ++j)
    for (int i = 16; i < 49; ++i) vals.push_back(g.values[j * 65 + i]);
  g.values = vals;
  try {
    sb_from_radon(g, point(2, {}), 0.5);
    FAIL("expected a coverage error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("required range") != std::string::npos);
  }
  g.support_extent.reset();
  CHECK_THROWS_AS(sb_from_radon(g, point(2, {}), 0.5), ValidationError);
}

TEST_CASE("growth bound") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5), uh(0.05, 1.0);
  for (int n : {2, 3}) {
    std::vector<SampledField> fields{make_phantom(bump(n, {0.1, 0, 0})), make_phantom(cut_ball(n))};
    for (const auto& f : fields) {
      for (int k = 0; k < (n == 2 ? 20 : 4); ++k) {
        auto z = point(n, {u(rng), u(rng), n == 3 ? u(rng) : 0.0}, {u(rng), u(rng), n == 3 ? u(rng) : 0.0});
        const BoundCheck c = growth_bound_check(f, z, uh(rng));
        CHECK(c.holds);
      }
    }
  }
  // Indicator of a large ball nearly attains the constant.
  PhantomSpec big;
  big.radius = 10.0;
  const BoundCheck c = growth_bound_check(make_phantom(big), point(2, {}), 1.0);
  CHECK(c.holds);
  CHECK(c.lhs == doctest::Approx(c.rhs).epsilon(1e-9));
}

TEST_CASE("support side bound") {
  auto f = make_phantom(cut_ball(2));
  // On the contact plane the bound reduces to the growth bound.
  auto z0 = point(2, {1.0, 0.3, 0}, {0.2, 0.1, 0});
  const BoundCheck a = support_side_bound_check(f, z0, 0.5);
  CHECK(a.holds);
  CHECK(a.rhs == doctest::Approx(2.0 * pi * 0.5));

  // Deep on the forbidden side.
  auto z1 = point(2, {3.0, 0, 0});
  const BoundCheck b = support_side_bound_check(f, z1, 0.1);
  CHECK(b.holds);
  CHECK(b.rhs == doctest::Approx(2.0 * pi * 0.1 * std::exp(-4.0 / 0.2)));
  CHECK(b.lhs < 0.5 * b.rhs);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 3.0), ui(-1.0, 1.0), uh(0.05, 1.0);
  for (int n : {2, 3}) {
    auto g = make_phantom(cut_ball(n));
    for (int k = 0; k < (n == 2 ? 100 : 12); ++k) {
      auto z = point(n, {u(rng), ui(rng), n == 3 ? ui(rng) : 0.0}, {ui(rng), ui(rng), n == 3 ? ui(rng) : 0.0});
      CHECK(support_side_bound_check(g, z, uh(rng)).holds);
    }
  }
  CHECK_THROWS_AS(support_side_bound_check(make_phantom(bump(2)), z0, 0.5), ValidationError);
}

TEST_CASE("exponential smallness fit") {
  auto f = make_phantom(bump(2));
  const auto hs = geometric_h_grid(1.0, 0.1, 6);
  CHECK(hs.front() == 1.0);
  CHECK(hs.back() == doctest::Approx(0.1));

  // Distance 2 from the support.
  const SmallnessFit far = fit_exponential_smallness(f, point(2, {3, 0, 0}, {-1, 0, 0}), hs);
  CHECK_FALSE(far.vacuous);
  CHECK(far.c >= 0.9 * 0.5 * 4.0);

  // Interior point with zero covector.
  const SmallnessFit mid = fit_exponential_smallness(f, point(2, {}), geometric_h_grid(0.1, 0.01, 6));
  CHECK(std::abs(mid.c) < 0.1);
  CHECK(far.c > 20.0 * std::abs(mid.c));

  const SmallnessFit zero = fit_exponential_smallness(zero_field(2), point(2, {}), hs);
  CHECK(zero.vacuous);

  CHECK_THROWS_AS(fit_exponential_smallness(f, point(2, {}), {1.0, 0.5, 0.25}), ValidationError);
  CHECK_THROWS_AS(fit_exponential_smallness(f, point(2, {}), {1.0, 0.9, 0.5, 0.4, 0.3, 0.2}), ValidationError);
  CHECK_THROWS_AS(fit_exponential_smallness(f, point(2, {}), geometric_h_grid(2.0, 0.1, 6)), ValidationError);
}

TEST_CASE("JSON lines batch") {
  const std::string text =
      "{\"re\": [0.1, 0.2], \"im\": [0.0, 0.3], \"h\": 0.5}\n"
      "\n"
      "{\"re\": [0, 0], \"im\": [0, 0], \"h\": 1}\n";
  const auto q = parse_queries_jsonl(text, 2);
  REQUIRE(q.size() == 2);
  CHECK(q[0].point.re[1] == 0.2);
  CHECK(q[0].point.im[1] == 0.3);
  CHECK(q[0].h == 0.5);

  auto f = make_phantom(gaussian(2, 1.0, 8.0));
  const auto out = sb_direct_batch(f, q);
  const std::string lines = samples_to_jsonl(out);
  CHECK(lines.find("\"value_re\"") != std::string::npos);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
  CHECK(std::abs(out[1].value - pi) < 1e-8);

  CHECK_THROWS_AS(parse_queries_jsonl("{\"re\": [0], \"im\": [0, 0], \"h\": 1}", 2), ValidationError);
  CHECK_THROWS_AS(parse_queries_jsonl("{\"re\": [0, 0], \"im\": [0, 0], \"h\": -1}", 2), ValidationError);
  CHECK_THROWS_AS(parse_queries_jsonl("not json", 2), ValidationError);
  CHECK_THROWS_AS(parse_queries_jsonl("{\"re\": [0, 0], \"im\": [0, 0]}", 2), ValidationError);
}
