#include "helgason/quadrature.hpp"

#include <map>
#include <mutex>

namespace helgason::quad {

namespace {

Rule make_gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi initial guess, then Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw ValidationError("Gauss-Legendre rule needs at least one node");
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

void sphere_crossings(const Vec& p, const Vec& d, const Ball& ball, std::vector<double>& out) {
  const Vec q = p - ball.center;
  const double b = dot(q, d);
  const double disc = b * b - (dot(q, q) - ball.radius * ball.radius);
  if (disc <= 0.0) return;
  const double root = std::sqrt(disc);
  out.push_back(-b - root);
  out.push_back(-b + root);
}

void plane_crossing(const Vec& p, const Vec& d, const Vec& y0, const Vec& normal, std::vector<double>& out) {
  const double dn = dot(d, normal);
  if (std::abs(dn) < 1e-14) return;
  out.push_back(-dot(p - y0, normal) / dn);
}

std::array<Vec, 3> orthonormal_frame(const Vec& normal, int dim, int seed_axis) {
  std::array<Vec, 3> frame{};
  if (dim == 2) {
    frame[0] = Vec{-normal[1], normal[0], 0.0};
    frame[1] = normal;
    frame[2] = Vec{0, 0, 1};
    return frame;
  }
  int axis = seed_axis;
  if (axis < 0) {
    axis = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(normal[i]) < std::abs(normal[axis])) axis = i;
  }
  Vec seed{0, 0, 0};
  seed[axis] = 1.0;
  Vec e1 = seed - dot(seed, normal) * normal;
  e1 = (1.0 / norm(e1)) * e1;
  frame[0] = e1;
  frame[1] = cross(normal, e1);
  frame[2] = normal;
  return frame;
}

}  // namespace helgason::quad
