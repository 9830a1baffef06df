#pragma once

// Translated Radon transform R_{y0} f(s, omega) = integral of f over the
// hyperplane {<x - y0, omega> = s}, sampled on an (s, direction) grid, plus
// the functionals the stability estimates are built from.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helgason/phantoms.hpp"
#include "helgason/sphere.hpp"

namespace helgason {

struct Sinogram {
  int dim = 2;
  Vec y0{};
  std::vector<double> s;  // uniform, symmetric about 0
  double ds = 0.0;
  DirectionSet directions;
  std::vector<double> values;  // values[j * ns + i] = R_{y0} f(s_i, omega_j)
  /// Largest |s| at which the source field can have nonzero plane integrals,
  /// when known (sinograms read from CSV do not carry it).
  std::optional<double> support_extent;

  std::size_t ns() const { return s.size(); }
  std::size_t ndir() const { return directions.size(); }
  double at(std::size_t dir, std::size_t i) const { return values[dir * ns() + i]; }
  std::span<const double> column(std::size_t dir) const { return {values.data() + dir * ns(), ns()}; }
  /// Trapezoid weight of node i in s.
  double trapezoid_weight(std::size_t i) const;
};

/// The data window (y0, omega0, alpha, beta): offsets |s| < alpha and the cap
/// Gamma = {omega : <omega, omega0>^2 > 1 - beta^2}.
struct RestrictedWindow {
  Vec y0{};
  Vec omega0{1, 0, 0};
  double alpha = 1.0;
  double beta = 1.0;

  bool in_cap(const Vec& omega) const;
  void validate(int dim) const;
};

/// R + |c - y0|: the half width an s-grid needs to contain the support.
double support_extent(const SampledField& f, const Vec& y0);

/// One plane integral. `seed_axis` selects the in-plane frame rule (n = 3).
double plane_integral(const SampledField& f, const Vec& y0, double s, const Vec& omega, int seed_axis = -1,
                      double rel_tol = 1e-9);

/// Samples R_{y0} f on `ns` uniform offsets in [-half_width, half_width]
/// (default: the support extent) and the given directions.
Sinogram radon(const SampledField& f, const Vec& y0, int ns, const DirectionSet& dirs,
               std::optional<double> half_width = std::nullopt);

/// ||u||_X = int (1 + |s|)^n ||R_0 u(s, .)||_{L^1(S^{n-1})} ds. Needs y0 = 0.
double x_norm(const Sinogram& g);

/// I = int_{|s| < alpha} (1 + |s|)^n ||R_{y0} f(s, .)||_{L^1(Gamma)} ds.
double restricted_integral(const Sinogram& g, const RestrictedWindow& w);

/// Number of direction nodes inside the cap.
std::size_t directions_in_cap(const DirectionSet& dirs, const RestrictedWindow& w);

/// |D|^{power} applied to one uniformly sampled column: cosine taper on the
/// outer 5% at each end, zero padding to >= 4x, multiplier |sigma|^power.
std::vector<double> riesz_filter_column(std::span<const double> column, double ds, int power);

/// |D|^{n-1} in s, per direction. Same layout as Sinogram::values.
std::vector<double> riesz_filter(const Sinogram& g);

/// 1/2 (2 pi)^{1-n} sum R f * |D|^{n-1} R g ds domega, approximating
/// the L^2 pairing of f and g. Both sinograms at y0 = 0 on identical grids.
double riesz_pairing(const Sinogram& gf, const Sinogram& gg);

/// Raw functional int_S int (1 + tau^2)^{(n-1)/2} |FT_s R q(tau, eta)|^2 dtau deta
/// with FT(tau) = int e^{-i s tau} (.) ds.
double radon_sobolev_raw(const Sinogram& g);

/// Raw functional / ||q||^2 for q = exp(-|x|^2 / 2 sigma^2), in closed form.
double sobolev_gaussian_ratio(int dim, double sigma);

/// Normalized Radon Sobolev functional radon_sobolev_raw / normalization.
/// The default normalization is sobolev_gaussian_ratio(n, 1).
double radon_sobolev_norm(const Sinogram& g, std::optional<double> normalization = std::nullopt);

struct L1Check {
  double lhs = 0.0;  // int int |R f| ds domega
  double rhs = 0.0;  // |S^{n-1}| ||f||_{L^1}
  bool holds = true;
};

/// Discrete check of int int |R f| <= |S^{n-1}| ||f||_1 within rel_tol.
L1Check l1_sinogram_bound_check(const SampledField& f, const Sinogram& g, double rel_tol = 1e-3);

/// Sinogram CSV: `# dim=`, `# y0=`, `# ds=` header rows, then
/// `s, omega_1..omega_n, weight, value` rows at 17 significant digits.
void write_sinogram_csv(const Sinogram& g, const std::string& path);
Sinogram read_sinogram_csv(const std::string& path);
std::string sinogram_to_csv(const Sinogram& g);
Sinogram sinogram_from_csv(const std::string& text);

}  // namespace helgason
