#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace helgason {

using cplx = std::complex<double>;

// Points in R^n for n in {2,3}. Two-dimensional data keeps the third
// component at zero, so dot products and norms need no dimension argument.
using Vec = std::array<double, 3>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double c, const Vec& a) { return {c * a[0], c * a[1], c * a[2]}; }
inline Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Ball {
  Vec center{};
  double radius = 0.0;
  bool contains(const Vec& x) const { return norm(x - center) <= radius; }
};

// Surface area of the unit sphere S^{n-1}.
inline double sphere_area(int n) {
  return n == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

// Lebesgue measure of a ball of radius r in R^n.
inline double ball_volume(int n, double r) {
  return n == 2 ? std::numbers::pi * r * r : 4.0 / 3.0 * std::numbers::pi * r * r * r;
}

// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

/// Error categories shared by the C++ core, the C API and the CLI exit codes.
enum class ErrorCode : int {
  ok = 0,
  io = 1,
  validation = 2,
  regression = 3,
  convergence = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorCode::validation, what) {}
};
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};
struct ConvergenceError : Error {
  explicit ConvergenceError(const std::string& what) : Error(ErrorCode::convergence, what) {}
};
struct RegressionError : Error {
  explicit RegressionError(const std::string& what) : Error(ErrorCode::regression, what) {}
};

}  // namespace helgason
