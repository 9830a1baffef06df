#include "helgason/sphere.hpp"

#include "helgason/quadrature.hpp"

namespace helgason {

std::string to_string(DirectionRule rule) {
  switch (rule) {
    case DirectionRule::uniform_circle: return "uniform_circle";
    case DirectionRule::gauss_product: return "gauss_product";
    case DirectionRule::fibonacci: return "fibonacci";
    case DirectionRule::custom: return "custom";
  }
  return "custom";
}

DirectionRule direction_rule_from_string(const std::string& s) {
  if (s == "uniform_circle") return DirectionRule::uniform_circle;
  if (s == "gauss_product") return DirectionRule::gauss_product;
  if (s == "fibonacci") return DirectionRule::fibonacci;
  if (s == "custom") return DirectionRule::custom;
  throw ValidationError("unknown direction rule '" + s + "'");
}

DirectionSet uniform_circle(int count) {
  if (count < 1) throw ValidationError("direction count must be positive");
  DirectionSet set;
  set.dim = 2;
  set.rule = DirectionRule::uniform_circle;
  const double w = 2.0 * std::numbers::pi / count;
  for (int j = 0; j < count; ++j) {
    const double th = w * j;
    // Exact antipodes keep value(-s,-omega) = value(s,omega) bitwise.
    if (count % 2 == 0 && j >= count / 2)
      set.dirs.push_back(-1.0 * set.dirs[j - count / 2]);
    else
      set.dirs.push_back(Vec{std::cos(th), std::sin(th), 0.0});
    set.weights.push_back(w);
  }
  return set;
}

namespace {

DirectionSet product_rule(int polar, int azimuth, double zmin) {
  DirectionSet set;
  set.dim = 3;
  set.rule = DirectionRule::gauss_product;
  const quad::Rule& gl = quad::gauss_legendre(polar);
  const double half = 0.5 * (1.0 - zmin);
  const double dphi = 2.0 * std::numbers::pi / azimuth;
  for (int i = 0; i < polar; ++i) {
    const double z = zmin + half * (gl.nodes[i] + 1.0);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int k = 0; k < azimuth; ++k) {
      const double phi = dphi * (k + 0.5);
      set.dirs.push_back(Vec{rho * std::cos(phi), rho * std::sin(phi), z});
      set.weights.push_back(half * gl.weights[i] * dphi);
    }
  }
  if (zmin == -1.0 && azimuth % 2 == 0) {
    auto index = [azimuth](int i, int k) { return static_cast<std::size_t>(i) * azimuth + k; };
    for (int i = 0; i < polar; ++i)
      for (int k = 0; k < azimuth; ++k) {
        const int ia = polar - 1 - i;
        const int ka = (k + azimuth / 2) % azimuth;
        if (i > ia || (i == ia && k >= azimuth / 2)) set.dirs[index(i, k)] = -1.0 * set.dirs[index(ia, ka)];
      }
  }
  return set;
}

}  // namespace

DirectionSet gauss_product_sphere(int count) {
  if (count < 1) throw ValidationError("direction count must be positive");
  const int polar = std::max(2, static_cast<int>(std::ceil(std::sqrt(count / 2.0))));
  return product_rule(polar, 2 * polar, -1.0);
}

DirectionSet fibonacci_sphere(int count) {
  if (count < 1) throw ValidationError("direction count must be positive");
  DirectionSet set;
  set.dim = 3;
  set.rule = DirectionRule::fibonacci;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / count;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * k;
    set.dirs.push_back(Vec{rho * std::cos(phi), rho * std::sin(phi), z});
    set.weights.push_back(4.0 * std::numbers::pi / count);
  }
  return set;
}

DirectionSet default_directions(int dim, int count) {
  return dim == 2 ? uniform_circle(count) : gauss_product_sphere(count);
}

DirectionSet make_directions(int dim, int count, DirectionRule rule) {
  switch (rule) {
    case DirectionRule::uniform_circle:
      if (dim != 2) throw ValidationError("uniform_circle directions are two-dimensional");
      return uniform_circle(count);
    case DirectionRule::gauss_product:
      if (dim != 3) throw ValidationError("gauss_product directions are three-dimensional");
      return gauss_product_sphere(count);
    case DirectionRule::fibonacci:
      if (dim != 3) throw ValidationError("fibonacci directions are three-dimensional");
      return fibonacci_sphere(count);
    case DirectionRule::custom: break;
  }
  throw ValidationError("custom direction sets cannot be generated");
}

DirectionSet half_circle_directions(int count) {
  if (count < 1) throw ValidationError("direction count must be positive");
  DirectionSet set;
  set.dim = 2;
  const double w = std::numbers::pi / count;
  for (int j = 0; j < count; ++j) {
    const double th = w * (j + 0.5);
    set.dirs.push_back(Vec{std::cos(th), std::sin(th), 0.0});
    set.weights.push_back(w);
  }
  return set;
}

DirectionSet half_sphere_directions(int count) {
  const int polar = std::max(2, static_cast<int>(std::ceil(std::sqrt(count / 2.0))));
  auto set = product_rule(polar, 2 * polar, 0.0);
  set.rule = DirectionRule::custom;
  return set;
}

}  // namespace helgason
