#include "helgason/radon.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "helgason/parallel.hpp"

namespace helgason {

double Sinogram::trapezoid_weight(std::size_t i) const {
  return (i == 0 || i + 1 == ns()) ? 0.5 * ds : ds;
}

bool RestrictedWindow::in_cap(const Vec& omega) const {
  const double c = dot(omega, omega0);
  return c * c > 1.0 - beta * beta;
}

void RestrictedWindow::validate(int dim) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("window alpha must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("window beta must lie in (0, 1]");
  if (std::abs(norm(omega0) - 1.0) > 1e-6) throw ValidationError("window omega0 must be a unit vector");
  if (dim == 2 && (omega0[2] != 0.0 || y0[2] != 0.0))
    throw ValidationError("two-dimensional window has a nonzero third component");
}

double support_extent(const SampledField& f, const Vec& y0) {
  return f.support().radius + norm(f.support().center - y0);
}

namespace {

// Canonical representative of {omega, -omega}, so antipodal planes are
// integrated with identical nodes.
Vec canonical(const Vec& omega) {
  for (double c : omega) {
    if (c > 0.0) return omega;
    if (c < 0.0) return -1.0 * omega;
  }
  return omega;
}

double plane_integral_frame(const SampledField& f, const Vec& y0, double s, const Vec& omega,
                            const std::array<Vec, 3>& frame, double rel_tol) {
  const Ball& B = f.support();
  const double d = dot(B.center - y0, omega) - s;
  if (std::abs(d) >= B.radius) return 0.0;
  quad::BallDomain dom;
  dom.center = B.center - d * omega;
  dom.radius = std::sqrt(B.radius * B.radius - d * d);
  dom.frame = frame;
  dom.k = f.dim() - 1;
  quad::Tolerance tol;
  tol.rel = rel_tol;
  auto est = quad::integrate_ball<double>(dom, f.evaluator(), f.breakpoints(), tol);
  if (!est.converged && est.error > 1e3 * rel_tol * std::max(est.abs, 1e-300))
    throw ConvergenceError("plane integral did not converge (achieved error " + std::to_string(est.error) + ")");
  return est.value;
}

void check_unit(const DirectionSet& dirs, int dim) {
  if (dirs.dim != dim) throw ValidationError("direction set dimension does not match the field");
  if (dirs.size() == 0) throw ValidationError("direction set is empty");
  if (dirs.weights.size() != dirs.size()) throw ValidationError("direction weights do not match directions");
  for (const Vec& w : dirs.dirs)
    if (std::abs(norm(w) - 1.0) > 1e-12) throw ValidationError("direction is not a unit vector");
}

bool uniform_grid(const std::vector<double>& s, double ds) {
  if (s.size() < 2 || !(ds > 0.0)) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (std::abs(s[i] - s[i - 1] - ds) > 1e-9 * ds) return false;
  return std::abs(s.front() + s.back()) <= 1e-9 * ds;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// Forward real FFT of the zero-padded column; returns the M/2+1 half spectrum.
struct Spectrum {
  std::size_t m = 0;
  std::vector<std::complex<double>> bins;
};

Spectrum forward(std::span<const double> column, std::size_t m) {
  Spectrum out;
  out.m = m;
  out.bins.resize(m / 2 + 1);
  std::vector<double> buf(m, 0.0);
  std::copy(column.begin(), column.end(), buf.begin());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.data(), reinterpret_cast<fftw_complex*>(out.bins.data()),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> inverse(std::vector<std::complex<double>> bins, std::size_t m) {
  std::vector<double> buf(m, 0.0);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(bins.data()), buf.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  for (double& v : buf) v /= static_cast<double>(m);
  return buf;
}

void require_matching(const Sinogram& a, const Sinogram& b) {
  if (a.dim != b.dim || a.ns() != b.ns() || a.ndir() != b.ndir() || std::abs(a.ds - b.ds) > 1e-12 * a.ds)
    throw ValidationError("sinogram grids do not match");
  for (std::size_t i = 0; i < a.ns(); ++i)
    if (std::abs(a.s[i] - b.s[i]) > 1e-12 * a.ds) throw ValidationError("sinogram s grids do not match");
  for (std::size_t j = 0; j < a.ndir(); ++j)
    if (norm(a.directions.dirs[j] - b.directions.dirs[j]) > 1e-12 ||
        std::abs(a.directions.weights[j] - b.directions.weights[j]) > 1e-12 * a.directions.weights[j])
      throw ValidationError("sinogram directions do not match");
}

void require_origin(const Sinogram& g, const char* what) {
  if (norm(g.y0) != 0.0) throw ValidationError(std::string(what) + " needs a sinogram referenced at y0 = 0");
}

}  // namespace

double plane_integral(const SampledField& f, const Vec& y0, double s, const Vec& omega, int seed_axis,
                      double rel_tol) {
  if (std::abs(norm(omega) - 1.0) > 1e-12) throw ValidationError("direction is not a unit vector");
  return plane_integral_frame(f, y0, s, omega, quad::orthonormal_frame(canonical(omega), f.dim(), seed_axis), rel_tol);
}

Sinogram radon(const SampledField& f, const Vec& y0, int ns, const DirectionSet& dirs,
               std::optional<double> half_width) {
  if (ns < 2) throw ValidationError("s grid needs at least 2 samples");
  check_unit(dirs, f.dim());
  const double extent = support_extent(f, y0);
  const double S = half_width.value_or(extent);
  if (!(S > 0.0)) throw ValidationError("s grid half width must be positive");
  if (S < extent * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "s grid half width " << S << " does not contain the support; required range is [-" << extent << ", "
        << extent << "]";
    throw ValidationError(msg.str());
  }
  Sinogram g;
  g.dim = f.dim();
  g.y0 = y0;
  g.directions = dirs;
  g.support_extent = extent;
  g.s.resize(ns);
  for (int i = 0; i < ns; ++i) g.s[i] = S * (2.0 * i - (ns - 1)) / (ns - 1);
  g.ds = 2.0 * S / (ns - 1);
  g.values.assign(static_cast<std::size_t>(ns) * dirs.size(), 0.0);
  if (f.is_zero()) return g;
  parallel_for(dirs.size(), [&](std::size_t j) {
    const Vec& w = dirs.dirs[j];
    const auto frame = quad::orthonormal_frame(canonical(w), f.dim());
    for (int i = 0; i < ns; ++i)
      g.values[j * ns + i] = plane_integral_frame(f, y0, g.s[i], w, frame, 1e-9);
  });
  return g;
}

double x_norm(const Sinogram& g) {
  require_origin(g, "the X-norm");
  double total = 0.0;
  for (std::size_t j = 0; j < g.ndir(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < g.ns(); ++i)
      col += g.trapezoid_weight(i) * std::pow(1.0 + std::abs(g.s[i]), g.dim) * std::abs(g.at(j, i));
    total += g.directions.weights[j] * col;
  }
  return total;
}

std::size_t directions_in_cap(const DirectionSet& dirs, const RestrictedWindow& w) {
  return static_cast<std::size_t>(std::count_if(dirs.dirs.begin(), dirs.dirs.end(),
                                                [&](const Vec& v) { return w.in_cap(v); }));
}

namespace {

double overlap(double a, double b, double c, double d) { return std::max(0.0, std::min(b, d) - std::max(a, c)); }

// Weights of the direction nodes restricted to the cap. On the circle each
// node owns an arc of length equal to its weight and contributes the part of
// that arc inside the cap; on the sphere nodes count when they lie inside.
std::vector<double> cap_weights(const DirectionSet& dirs, const RestrictedWindow& w) {
  std::vector<double> out(dirs.size(), 0.0);
  if (dirs.dim == 3) {
    for (std::size_t j = 0; j < dirs.size(); ++j)
      if (w.in_cap(dirs.dirs[j])) out[j] = dirs.weights[j];
    return out;
  }
  const double pi = std::numbers::pi;
  const double t0 = std::atan2(w.omega0[1], w.omega0[0]);
  const double phi = std::asin(std::min(1.0, w.beta));
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    const double th = std::atan2(dirs.dirs[j][1], dirs.dirs[j][0]);
    const double a = th - 0.5 * dirs.weights[j];
    const double b = th + 0.5 * dirs.weights[j];
    double len = 0.0;
    for (double c : {t0, t0 + pi})
      for (int k = -2; k <= 2; ++k) len += overlap(a, b, c - phi + 2 * pi * k, c + phi + 2 * pi * k);
    out[j] = std::min(len, dirs.weights[j]);
  }
  return out;
}

}  // namespace

double restricted_integral(const Sinogram& g, const RestrictedWindow& w) {
  w.validate(g.dim);
  if (norm(g.y0 - w.y0) > 1e-12 * (1.0 + norm(w.y0)))
    throw ValidationError("sinogram reference point differs from the window's y0");
  const std::size_t inside = directions_in_cap(g.directions, w);
  if (inside < 32) {
    throw ValidationError("direction set resolves only " + std::to_string(inside) +
                          " directions inside the cap; at least 32 are required");
  }
  const auto cw = cap_weights(g.directions, w);
  const double lo = g.s.front() - 0.5 * g.ds;
  const double hi = g.s.back() + 0.5 * g.ds;
  double total = 0.0;
  for (std::size_t i = 0; i < g.ns(); ++i) {
    const double a = std::max({g.s[i] - 0.5 * g.ds, -w.alpha, lo + 0.5 * g.ds});
    const double b = std::min({g.s[i] + 0.5 * g.ds, w.alpha, hi - 0.5 * g.ds});
    if (b <= a) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < g.ndir(); ++j)
      if (cw[j] > 0.0) row += cw[j] * std::abs(g.at(j, i));
    total += (b - a) * std::pow(1.0 + std::abs(g.s[i]), g.dim) * row;
  }
  return total;
}

std::vector<double> riesz_filter_column(std::span<const double> column, double ds, int power) {
  const std::size_t n = column.size();
  if (n < 2 || !(ds > 0.0)) throw ValidationError("Riesz filter needs a uniform grid with at least 2 samples");
  std::vector<double> tapered(column.begin(), column.end());
  const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * n)));
  for (std::size_t e = 0; e < m && e < n; ++e) {
    const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * e / m));
    tapered[e] *= t;
    tapered[n - 1 - e] *= t;
  }
  const std::size_t M = next_pow2(4 * n);
  Spectrum spec = forward(tapered, M);
  if (power == 1) {
    // Band-limited |D| on the sample lattice, applied as a linear convolution
    // with its truncated spatial kernel; the sampled |sigma| multiplier would
    // alias the slowly decaying output around the periodic window.
    std::vector<double> kernel(M, 0.0);
    kernel[0] = std::numbers::pi / (2.0 * ds);
    for (std::size_t k = 1; k < n; ++k) {
      const double c = (k % 2 == 1) ? -2.0 / (std::numbers::pi * double(k) * double(k) * ds) : 0.0;
      kernel[k] = c;
      kernel[M - k] = c;
    }
    const Spectrum ks = forward(kernel, M);
    for (std::size_t k = 0; k < spec.bins.size(); ++k) spec.bins[k] *= ks.bins[k].real();
  } else {
    const double dsig = 2.0 * std::numbers::pi / (static_cast<double>(M) * ds);
    for (std::size_t k = 0; k < spec.bins.size(); ++k) spec.bins[k] *= std::pow(dsig * k, power);
  }
  auto full = inverse(std::move(spec.bins), M);
  full.resize(n);
  return full;
}

std::vector<double> riesz_filter(const Sinogram& g) {
  if (!uniform_grid(g.s, g.ds)) throw ValidationError("Riesz filter needs a uniform s grid");
  std::vector<double> out(g.values.size(), 0.0);
  parallel_for(g.ndir(), [&](std::size_t j) {
    auto col = riesz_filter_column(g.column(j), g.ds, g.dim - 1);
    std::copy(col.begin(), col.end(), out.begin() + j * g.ns());
  });
  return out;
}

double riesz_pairing(const Sinogram& gf, const Sinogram& gg) {
  require_matching(gf, gg);
  require_origin(gf, "the Riesz pairing");
  require_origin(gg, "the Riesz pairing");
  const auto filtered = riesz_filter(gg);
  double total = 0.0;
  for (std::size_t j = 0; j < gf.ndir(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < gf.ns(); ++i) col += gf.trapezoid_weight(i) * gf.at(j, i) * filtered[j * gf.ns() + i];
    total += gf.directions.weights[j] * col;
  }
  return 0.5 * std::pow(2.0 * std::numbers::pi, 1 - gf.dim) * total;
}

double radon_sobolev_raw(const Sinogram& g) {
  if (!uniform_grid(g.s, g.ds)) throw ValidationError("the Sobolev functional needs a uniform s grid");
  const std::size_t M = next_pow2(4 * g.ns());
  const double dtau = 2.0 * std::numbers::pi / (static_cast<double>(M) * g.ds);
  const double e = 0.5 * (g.dim - 1);
  std::vector<double> per_dir(g.ndir(), 0.0);
  parallel_for(g.ndir(), [&](std::size_t j) {
    const Spectrum spec = forward(g.column(j), M);
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.bins.size(); ++k) {
      const double tau = dtau * k;
      const double mult = (k == 0 || 2 * k == M) ? 1.0 : 2.0;
      acc += mult * std::pow(1.0 + tau * tau, e) * std::norm(g.ds * spec.bins[k]);
    }
    per_dir[j] = acc * dtau;
  });
  double total = 0.0;
  for (std::size_t j = 0; j < g.ndir(); ++j) total += g.directions.weights[j] * per_dir[j];
  return total;
}

double sobolev_gaussian_ratio(int dim, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("Gaussian width must be positive");
  const double pi = std::numbers::pi;
  const double a = sigma * sigma;
  if (dim == 3) return 16.0 * pi * pi * pi * (1.0 + 2.0 * a);
  if (dim == 2) {
    const double J = 0.5 * std::exp(0.5 * a) * (std::cyl_bessel_k(0.0, 0.5 * a) + std::cyl_bessel_k(1.0, 0.5 * a));
    return 8.0 * pi * pi * a * J;
  }
  throw ValidationError("dimension must be 2 or 3");
}

double radon_sobolev_norm(const Sinogram& g, std::optional<double> normalization) {
  require_origin(g, "the Sobolev functional");
  const double K = normalization.value_or(sobolev_gaussian_ratio(g.dim, 1.0));
  if (!(K > 0.0)) throw ValidationError("Sobolev normalization must be positive");
  return radon_sobolev_raw(g) / K;
}

L1Check l1_sinogram_bound_check(const SampledField& f, const Sinogram& g, double rel_tol) {
  L1Check out;
  for (std::size_t j = 0; j < g.ndir(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < g.ns(); ++i) col += g.trapezoid_weight(i) * std::abs(g.at(j, i));
    out.lhs += g.directions.weights[j] * col;
  }
  out.rhs = f.is_zero() ? 0.0 : sphere_area(f.dim()) * lp_norm(f, 1.0);
  out.holds = out.lhs <= out.rhs * (1.0 + rel_tol) + 1e-300;
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> split_numbers(const std::string& text, std::size_t line_no) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("sinogram CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

std::string sinogram_to_csv(const Sinogram& g) {
  std::string out;
  out += "# dim=" + std::to_string(g.dim) + "\n";
  out += "# y0=";
  for (int k = 0; k < g.dim; ++k) out += (k ? "," : "") + fmt17(g.y0[k]);
  out += "\n# ds=" + fmt17(g.ds) + "\n";
  for (std::size_t j = 0; j < g.ndir(); ++j) {
    const Vec& w = g.directions.dirs[j];
    std::string dir;
    for (int k = 0; k < g.dim; ++k) dir += "," + fmt17(w[k]);
    const std::string wt = "," + fmt17(g.directions.weights[j]) + ",";
    for (std::size_t i = 0; i < g.ns(); ++i) out += fmt17(g.s[i]) + dir + wt + fmt17(g.at(j, i)) + "\n";
  }
  return out;
}

Sinogram sinogram_from_csv(const std::string& text) {
  Sinogram g;
  std::optional<int> dim;
  std::optional<double> ds;
  bool have_y0 = false;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
      const std::string val = line.substr(eq + 1);
      if (key == "dim") {
        dim = static_cast<int>(split_numbers(val, line_no).at(0));
      } else if (key == "y0") {
        auto v = split_numbers(val, line_no);
        for (std::size_t k = 0; k < v.size() && k < 3; ++k) g.y0[k] = v[k];
        have_y0 = true;
      } else if (key == "ds") {
        ds = split_numbers(val, line_no).at(0);
      }
      continue;
    }
    if (!dim) throw ValidationError("sinogram CSV: data before the '# dim=' header");
    auto v = split_numbers(line, line_no);
    if (v.size() != static_cast<std::size_t>(*dim) + 3)
      throw ValidationError("sinogram CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(*dim + 3) + " columns");
    rows.push_back(std::move(v));
  }
  if (!dim || !ds || !have_y0) throw ValidationError("sinogram CSV: missing '# dim=', '# y0=' or '# ds=' header");
  if (*dim != 2 && *dim != 3) throw ValidationError("sinogram CSV: dimension must be 2 or 3");
  if (rows.empty()) throw ValidationError("sinogram CSV: no data rows");
  g.dim = *dim;
  g.ds = *ds;
  g.directions.dim = g.dim;
  g.directions.rule = DirectionRule::custom;
  const int n = g.dim;
  auto same_dir = [n](const std::vector<double>& a, const std::vector<double>& b) {
    for (int k = 1; k <= n; ++k)
      if (a[k] != b[k]) return false;
    return true;
  };
  std::size_t ns = 0;
  while (ns < rows.size() && same_dir(rows[ns], rows[0])) ++ns;
  if (rows.size() % ns != 0) throw ValidationError("sinogram CSV: directions have different numbers of samples");
  for (std::size_t i = 0; i < ns; ++i) g.s.push_back(rows[i][0]);
  for (std::size_t j = 0; j < rows.size() / ns; ++j) {
    const auto& head = rows[j * ns];
    Vec w{};
    for (int k = 0; k < n; ++k) w[k] = head[k + 1];
    g.directions.dirs.push_back(w);
    g.directions.weights.push_back(head[n + 1]);
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& r = rows[j * ns + i];
      if (!same_dir(r, head) || r[0] != g.s[i])
        throw ValidationError("sinogram CSV: rows are not grouped by direction on a common s grid");
      g.values.push_back(r[n + 2]);
    }
  }
  check_unit(g.directions, g.dim);
  if (!uniform_grid(g.s, g.ds)) throw ValidationError("sinogram CSV: s grid is not uniform and symmetric with the stated ds");
  return g;
}

void write_sinogram_csv(const Sinogram& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << sinogram_to_csv(g);
  if (!out) throw IoError("failed writing '" + path + "'");
}

Sinogram read_sinogram_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return sinogram_from_csv(buf.str());
}

}  // namespace helgason
