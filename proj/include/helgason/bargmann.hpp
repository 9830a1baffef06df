#pragma once

// Segal-Bargmann transform T_h f(z) = int exp(-(z - y)^2 / 2h) f(y) dy at
// complex points, by direct quadrature and from Radon data through the
// kernel G_n = |D|^{n-1} exp(-(. - w)^2 / 2h).

#include <optional>
#include <string>
#include <vector>

#include "helgason/phantoms.hpp"
#include "helgason/radon.hpp"

namespace helgason {

struct ComplexPoint {
  int dim = 2;
  Vec re{};
  Vec im{};

  double im_norm() const { return norm(im); }
  /// <omega, zeta> = <omega, re> + i <omega, im>.
  cplx pair(const Vec& omega) const { return {dot(omega, re), dot(omega, im)}; }
  /// Holomorphic square sum_k zeta_k^2 (not |zeta|^2).
  cplx square() const;
  void validate() const;
};

struct BargmannSample {
  ComplexPoint point;
  double h = 1.0;
  cplx value{};
  double weighted = 0.0;  // exp(-|Im z|^2 / 2h) |value|
};

/// Throws for h <= 0 or non-finite h. Returns true when h lies outside (0, 1].
bool check_h(double h);

/// Direct quadrature over supp f, clipped to the ball of radius sqrt(80 h)
/// about Re z. The tolerance is relative to the integral of |integrand|.
BargmannSample sb_direct_sample(const SampledField& f, const ComplexPoint& z, double h, double rel_tol = 1e-9);
cplx sb_direct(const SampledField& f, const ComplexPoint& z, double h, double rel_tol = 1e-9);

/// Q_n(w) = exp(w^2/2) D^{n-1} exp(-w^2/2), D = -i d/dw. Odd n only.
cplx hermite_q(int n, cplx u);
/// Coefficients of Q_n in increasing degree.
std::vector<double> hermite_q_coefficients(int n);
/// Sum of |coefficients|, so |Q_n(w)| <= A_n (1 + |w|)^{n-1}.
double hermite_q_bound(int n);

/// G_n(s, w) at scale h. Odd n: closed form; n = 2: contour-shifted integral
/// over [0, 1]; other even n: kernel_g_integral.
cplx kernel_g(int n, double s, cplx w, double h);
/// The Fourier integral form of G_n, valid for every n.
cplx kernel_g_integral(int n, double s, cplx w, double h, double rel_tol = 1e-8);

/// h^{-(n-1)/2} (1 + |s - w| / sqrt h)^n (1 + exp(((Im w)^2 - (s - Re w)^2) / 2h)).
double kernel_bound_shape(int n, double s, cplx w, double h);
/// B_n * kernel_bound_shape.
double kernel_bound(int n, double s, cplx w, double h, double b_n);

/// T_h f(z) from the sinogram of f, trapezoid in s and direction weights.
BargmannSample sb_from_radon_sample(const Sinogram& g, const ComplexPoint& z, double h);
cplx sb_from_radon(const Sinogram& g, const ComplexPoint& z, double h);

struct BoundCheck {
  double lhs = 0.0;  // both sides multiplied by exp(-|Im z|^2 / 2h)
  double rhs = 0.0;
  bool holds = true;
};

/// |T_h f(z)| <= (2 pi h)^{n/2} exp(|Im z|^2 / 2h) ||f||_inf.
BoundCheck growth_bound_check(const SampledField& f, const ComplexPoint& z, double h);

/// The growth bound with the extra factor exp(-<Re z - y0, omega0>_+^2 / 2h)
/// for fields carrying a halfspace assertion.
BoundCheck support_side_bound_check(const SampledField& f, const ComplexPoint& z, double h);

struct SmallnessFit {
  double c = 0.0;              // decay rate in |T_h f| <~ C exp(-c/h + |Im z|^2 / 2h)
  double C = 0.0;              // includes the (2 pi h)^{n/2} prefactor at h = 1
  double residual = 0.0;       // rms of the log fit
  double slope_stderr = 0.0;
  bool vacuous = false;        // every weighted value below 1e-300
  std::vector<double> h;
  std::vector<double> weighted;
};

/// Least squares of log(weighted (2 pi h)^{-n/2}) against 1/h. The grid
/// must hold at least 6 geometrically spaced values in (0, 1].
SmallnessFit fit_exponential_smallness(const SampledField& f, const ComplexPoint& z0,
                                       const std::vector<double>& h_grid, double rel_tol = 1e-10);

/// h_max * ratio^k, k = 0..count-1.
std::vector<double> geometric_h_grid(double h_max, double h_min, int count);

// JSON lines batch interface.
struct BargmannQuery {
  ComplexPoint point;
  double h = 1.0;
};

/// One query per non-empty line. A given h_override replaces every line's h,
/// which may then be omitted.
std::vector<BargmannQuery> parse_queries_jsonl(const std::string& text, int dim,
                                               std::optional<double> h_override = std::nullopt);
std::string samples_to_jsonl(const std::vector<BargmannSample>& samples);

std::vector<BargmannSample> sb_direct_batch(const SampledField& f, const std::vector<BargmannQuery>& q);
std::vector<BargmannSample> sb_from_radon_batch(const Sinogram& g, const std::vector<BargmannQuery>& q);

}  // namespace helgason
