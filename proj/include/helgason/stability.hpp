#pragma once

// The estimate chain from restricted Radon data to a logarithmic stability
// bound: the microlocal Helgason bound, the subharmonic comparison lemma,
// the refined bound near y0, the Gaussian deconvolution bound and the final
// log estimate, each paired with a check against measured quantities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "helgason/bargmann.hpp"
#include "helgason/constants.hpp"
#include "helgason/phantoms.hpp"
#include "helgason/radon.hpp"

namespace helgason {

// ---------------------------------------------------------------------------
// Microlocal Helgason bound

struct HelgasonRhs {
  double bound = 0.0;
  bool admissible = false;
};

/// C h^{-n/2} (1 + |zeta| + |y0|)^n (I + X (e^{-alpha^2/8h} + e^{-gamma^2 beta^2/32h})).
HelgasonRhs helgason_rhs(double I, double x_norm_val, const ComplexPoint& z, double h, const RestrictedWindow& w,
                         double gamma, double C);

bool helgason_admissible(const ComplexPoint& z, const RestrictedWindow& w, double gamma);

/// Decay rate of the I = 0 branch: min(alpha^2/8, gamma^2 beta^2/32).
double helgason_decay_rate(const RestrictedWindow& w, double gamma);

/// `count` admissible points with |Im zeta| in [gamma, 1.5 gamma].
std::vector<ComplexPoint> admissible_sweep(int dim, const RestrictedWindow& w, double gamma, int count,
                                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// Subharmonic comparison

struct RectangleDomain {
  double a = 1.0;
  double b = 1.0;
  double eps = 0.1;
  double lambda = 1.0;

  void validate() const;
  /// min(lambda / (2 a cosh(pi b / a)), a / 3).
  double delta() const;
  /// -lambda delta / (2 a cosh(pi b / a)).
  double conclusion_level() const;
};

/// -lambda cosh(pi y / a) / cosh(pi b / a) sin(pi (x + delta) / a) on
/// [-delta, a - delta] x [-b, b].
double comparison_harmonic(cplx z, const RectangleDomain& dom, double delta);

/// F sampled on a tensor grid; values[j * x.size() + i] = F(x_i + i y_j).
struct GridFunction {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[j * x.size() + i]; }
  double at(std::size_t i, std::size_t j) const { return values[j * x.size() + i]; }
};

struct Violation {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
  double limit = 0.0;
  std::string rule;
};

struct Certificate {
  bool holds = false;
  bool hypotheses_hold = false;
  bool conclusion_holds = false;
  double delta = 0.0;
  double conclusion_level = 0.0;
  std::size_t checked = 0;
  std::vector<Violation> violations;
};

/// Throws ValidationError when the grid does not reach into the conclusion
/// rectangle or does not span |Im z| <= b.
Certificate subharmonic_certificate(const GridFunction& F, const RectangleDomain& dom);

/// Odd-sized grid over R = (-a, a) x (-(b + eps), b + eps) holding x = 0 and y = +-b.
GridFunction rectangle_grid(const RectangleDomain& dom, int nx, int ny);

/// Parameters of the comparison applied inside the refined bound.
RectangleDomain refined_rectangle(double alpha, double beta);

/// w-slice of the holomorphic extension: zeta(z) = (z + <omega0, y0>) omega0 + w.
struct WSlice {
  Vec re{};
  Vec im{};
};

/// Slices satisfying |Re w_perp| < sqrt(3) alpha / 4 and |Im w|^2 < 4 alpha^2 / (4 - beta^2).
std::vector<WSlice> default_w_slices(int dim, const RestrictedWindow& w);

/// Phi(z) = |Re z|^2 + 2h log W(zeta(z)) - 2h log K with W the weighted
/// transform and K = max(4 C, 2 (2 pi)^{n/2}) h^{-n/2} M (1 + rho + |y0|)^n.
GridFunction build_phi(const SampledField& q, const RestrictedWindow& w, const WSlice& slice, double h, double M,
                       double helgason_c, const GridFunction& grid);

// ---------------------------------------------------------------------------
// Refined bound near y0

/// 0.99 / (8 cosh^2(8 pi / beta)).
double kappa_for(double beta);
/// alpha / (8 cosh(8 pi / beta)).
double g_radius(double alpha, double beta);

struct RefinedBound {
  bool trivial = false;          // I > e^{-alpha^2/8}: no bound emitted
  bool exact_vanishing = false;  // I = 0: h undefined, bound 0
  std::optional<double> h_star;
  double kappa = 0.0;
  double bound = 0.0;
  double re_radius = 0.0;  // |Re zeta - y0| < re_radius
  double im_radius = 0.0;  // |Im zeta| < im_radius
};

RefinedBound refined_bound(double I, double alpha, double beta, const Vec& y0, double M_q, int n, double C);

/// Points of the refined region: Re zeta near y0, Im zeta up to 0.9 im_radius.
std::vector<ComplexPoint> refined_region_points(int dim, const RestrictedWindow& w, int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Gaussian deconvolution

struct BallRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
};

/// Polar Gauss rule over a ball: Gauss-Legendre in r times uniform angles
/// (n = 2) or a Gauss product sphere rule (n = 3).
BallRule polar_ball_rule(int dim, const Ball& G, int radial, int angular);

/// ||T_h q||_{L^p(G)} over real points.
double transform_lp(const SampledField& q, const Ball& G, double h, double p, const BallRule& rule);

/// C (h^{-n/2} ||T_h q||_{L^p(G)} + L_q h^{lambda/2}).
double gaussian_deconv_bound(double transform_lp_G, double L_q, double h, double lambda, int n, double C);

// ---------------------------------------------------------------------------
// Log stability estimate

/// C_n M max(1, |G|^{1/p}) (1 + |y0|) (alpha^{-n} + beta^{-n} + alpha^lambda).
double stability_constant(int n, double M, double G_volume, double p, const Vec& y0, double alpha, double beta,
                          double lambda, double Cn);

struct StabilityBound {
  double bound = 0.0;
  bool exact_vanishing = false;
  bool obvious_regime = false;  // I >= e^{-alpha^2/8}
};

/// C |log I|^{-lambda/2}.
StabilityBound stability_bound(double I, double C, double lambda, double alpha);

// ---------------------------------------------------------------------------
// Dependence domain

/// x lies in E when some plane of the window passes through it. For beta < 1
/// the complement is two closed cones with apexes y0 +- alpha / cos(phi) omega0,
/// phi = arcsin(beta), and half angle pi/2 - phi.
bool in_dependence_domain(const Vec& x, const RestrictedWindow& w);
SampledField restrict_to_dependence_domain(const SampledField& q, const RestrictedWindow& w);

// ---------------------------------------------------------------------------
// Experiments

struct Resolutions {
  int ns = 257;
  int ndir = 256;
  int sweep_points = 32;     // admissible points for the Helgason check
  int region_points = 8;     // points of the refined region
  int phi_nx = 9;            // Phi grid in Re z
  int phi_ny = 13;           // Phi grid in Im z
  int g_radial = 8;          // ball rule for ||T_h q||_{L^p(G)}
  int g_angular = 16;
  BesovOptions besov{};
};

struct ExperimentConfig {
  std::string name = "experiment";
  PhantomSpec phantom;
  RestrictedWindow window;
  double p = 2.0;
  double lambda = 0.4;
  Resolutions res;
  std::vector<double> h_grid{1.0, 0.5, 0.25, 0.125};
  std::uint64_t seed = 1;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& c);

struct DecayPoint {
  double h = 0.0;
  double measured = 0.0;  // largest weighted transform over the sweep
  double bound = 0.0;     // smallest bound over the sweep
};

struct StabilityReport {
  std::string name;
  std::string constants_version;
  int dim = 2;
  RestrictedWindow window;
  double p = 2.0;
  double lambda = 0.4;
  double I = 0.0;
  double x_norm_val = 0.0;
  double sup_norm = 0.0;
  double M_q = 1.0;
  double L_q = 0.0;
  double M = 1.0;
  std::optional<double> h_star;
  double kappa = 0.0;
  double G_radius = 0.0;
  std::optional<double> bound_prop27;
  double measured_prop27 = 0.0;
  std::optional<double> bound_lemma29;
  double measured_lemma29 = 0.0;
  double bound_thm25 = 0.0;
  double measured_lp_G = 0.0;
  bool applicable = true;
  bool degenerate = false;
  bool trivial_case = false;
  bool exact_vanishing = false;
  std::string inapplicable_reason;
  // Pass flags; unset when the inequality was not evaluated.
  std::optional<bool> prop23_holds;
  std::optional<bool> lemma26_holds;
  std::optional<bool> prop27_holds;
  std::optional<bool> lemma29_holds;
  std::optional<bool> thm25_holds;
  std::vector<DecayPoint> decay;
  std::size_t certificate_samples = 0;

  bool all_flags_true() const;
};

StabilityReport run_experiment(const ExperimentConfig& config, const Constants& constants);
std::string report_to_json(const StabilityReport& r);

/// CSV rows for the decay curve and a matplotlib script reading them.
std::string decay_csv(const StabilityReport& r);
/// One row per applicable report with I > 0: abs_log_I,measured,bound.
std::string log_stability_csv(const std::vector<StabilityReport>& reports);
std::string plot_script();

}  // namespace helgason
