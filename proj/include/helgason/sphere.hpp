#pragma once

#include <string>
#include <vector>

#include "helgason/common.hpp"

namespace helgason {

enum class DirectionRule { uniform_circle, gauss_product, fibonacci, custom };

std::string to_string(DirectionRule rule);
DirectionRule direction_rule_from_string(const std::string& s);

/// Quadrature nodes on S^{n-1}; weights sum to the measure of the covered set.
struct DirectionSet {
  int dim = 2;
  DirectionRule rule = DirectionRule::custom;
  std::vector<Vec> dirs;
  std::vector<double> weights;

  std::size_t size() const { return dirs.size(); }
};

/// n = 2: N equally spaced angles 2*pi*j/N, weights 2*pi/N. Closed under
/// omega -> -omega when N is even.
DirectionSet uniform_circle(int count);

/// n = 3: Gauss-Legendre in cos(theta) times a uniform azimuth grid with
/// twice as many points; the polar count is ceil(sqrt(count / 2)).
/// Closed under omega -> -omega.
DirectionSet gauss_product_sphere(int count);

/// n = 3: spherical Fibonacci points with equal weights 4*pi/N.
DirectionSet fibonacci_sphere(int count);

/// Default rule for a dimension: uniform_circle (n = 2), gauss_product (n = 3).
DirectionSet default_directions(int dim, int count);
DirectionSet make_directions(int dim, int count, DirectionRule rule);

/// Half of the circle / sphere, for integrands even under omega -> -omega.
DirectionSet half_circle_directions(int count);
DirectionSet half_sphere_directions(int count);

}  // namespace helgason
