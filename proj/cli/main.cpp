// helgason: command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "helgason/helgason.h"

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(hg_status st) {
  if (st != HG_OK) throw Failure{static_cast<int>(st), hg_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{HG_ERR_IO, "cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{HG_ERR_IO, "cannot open '" + path + "' for writing"};
  out << text;
  if (!out) throw Failure{HG_ERR_IO, "failed writing '" + path + "'"};
}

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { hg_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Phantom = Handle<hg_phantom, hg_phantom_free>;
using Sino = Handle<hg_sinogram, hg_sinogram_free>;
using Consts = Handle<hg_constants, hg_constants_free>;
using Report = Handle<hg_report, hg_report_free>;
using Suite = Handle<hg_suite, hg_suite_free>;

std::vector<double> parse_coords(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Failure{HG_ERR_VALIDATION, "bad coordinate '" + cell + "' in '" + text + "'"};
    }
  }
  return out;
}

void progress(const char* message, void*) { std::cerr << "  " << message << std::endl; }

// --- commands ---------------------------------------------------------------

struct PhantomArgs {
  std::string spec, out;
  int per_axis = 101;
};

int cmd_phantom(const PhantomArgs& a) {
  Phantom p;
  check(hg_phantom_create(read_file(a.spec).c_str(), &p.p));
  Owned csv;
  check(hg_phantom_grid_csv(p.p, a.per_axis, &csv.p));
  write_file(a.out, csv.str());
  return 0;
}

struct RadonArgs {
  std::string spec, y0, out;
  int ns = 257;
  int ndir = 0;
  double half_width = 0.0;
};

int cmd_radon(const RadonArgs& a) {
  Phantom p;
  check(hg_phantom_create(read_file(a.spec).c_str(), &p.p));
  const int n = hg_phantom_dim(p.p);
  std::vector<double> y0(3, 0.0);
  if (!a.y0.empty()) {
    y0 = parse_coords(a.y0);
    if (static_cast<int>(y0.size()) != n)
      throw Failure{HG_ERR_VALIDATION, "--y0 needs " + std::to_string(n) + " coordinates"};
  }
  if (a.ndir < 1) throw Failure{HG_ERR_VALIDATION, "--ndir must be positive"};
  Sino g;
  check(hg_sinogram_compute(p.p, y0.data(), a.ns, a.ndir, a.half_width, &g.p));
  check(hg_sinogram_write_csv(g.p, a.out.c_str()));
  return 0;
}

struct BargmannArgs {
  std::string mode, field, sino, points, out;
  std::optional<double> h;
};

int cmd_bargmann(const BargmannArgs& a) {
  if (a.h) {
    if (!(*a.h > 0.0)) throw Failure{HG_ERR_VALIDATION, "--h must be positive"};
    if (*a.h > 1.0) std::cerr << "warning: h = " << *a.h << " lies outside (0, 1]; the estimates assume small h\n";
  }
  const std::string queries = read_file(a.points);
  const double h = a.h.value_or(0.0);
  Owned out;
  if (a.mode == "direct") {
    if (a.field.empty()) throw Failure{HG_ERR_VALIDATION, "--mode direct needs --field"};
    Phantom p;
    check(hg_phantom_create(read_file(a.field).c_str(), &p.p));
    check(hg_bargmann_direct(p.p, queries.c_str(), h, &out.p));
  } else {
    if (a.sino.empty()) throw Failure{HG_ERR_VALIDATION, "--mode radon needs --sino"};
    Sino g;
    check(hg_sinogram_read_csv(a.sino.c_str(), &g.p));
    check(hg_bargmann_radon(g.p, queries.c_str(), h, &out.p));
  }
  write_file(a.out, out.str());
  return 0;
}

struct StabilityArgs {
  std::string config, report, plots, constants;
};

int cmd_stability(const StabilityArgs& a) {
  const std::string config = read_file(a.config);
  Consts c;
  check(hg_constants_load(a.constants.empty() ? nullptr : a.constants.c_str(), &c.p));
  Report r;
  check(hg_experiment_run(config.c_str(), c.p, &r.p));
  Owned json;
  check(hg_report_json(r.p, &json.p));
  write_file(a.report, json.str());
  if (!a.plots.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(a.plots, ec);
    if (ec) throw Failure{HG_ERR_IO, "cannot create '" + a.plots + "': " + ec.message()};
    Owned decay, logc, script;
    check(hg_report_decay_csv(r.p, &decay.p));
    check(hg_report_log_csv(r.p, &logc.p));
    check(hg_plot_script(&script.p));
    write_file(a.plots + "/decay.csv", decay.str());
    write_file(a.plots + "/log_stability.csv", logc.str());
    write_file(a.plots + "/plot.py", script.str());
  }
  if (!hg_report_applicable(r.p)) std::cerr << "report marked inapplicable\n";
  return 0;
}

struct VerifyArgs {
  std::string suite = "smoke";
  std::string report, constants;
};

int cmd_verify(const VerifyArgs& a) {
  Consts c;
  check(hg_constants_load(a.constants.empty() ? nullptr : a.constants.c_str(), &c.p));
  std::cerr << "constants " << hg_constants_version(c.p) << ", suite " << a.suite << "\n";
  Suite s;
  check(hg_suite_run(a.suite.c_str(), c.p, progress, nullptr, &s.p));
  for (std::size_t i = 0; i < hg_suite_criterion_count(s.p); ++i) {
    int id = 0, pass = 0;
    const char* title = nullptr;
    double secs = 0.0, budget = 0.0;
    check(hg_suite_criterion(s.p, i, &id, &title, &pass, &secs, &budget));
    std::printf("criterion %d %s: %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", title, secs);
  }
  if (!a.report.empty()) {
    Owned json;
    check(hg_suite_json(s.p, &json.p));
    write_file(a.report, json.str());
  }
  const bool ok = hg_suite_pass(s.p) != 0;
  std::printf("%s\n", ok ? "suite passed" : "suite FAILED");
  return ok ? 0 : HG_ERR_REGRESSION;
}

int cmd_calibrate(const std::string& out) {
  Consts c;
  check(hg_calibrate(progress, nullptr, &c.p));
  check(hg_constants_save(c.p, out.c_str()));
  std::cerr << "wrote " << out << " (" << hg_constants_version(c.p) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability toolkit for restricted Radon data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hg_version()));

  PhantomArgs pa;
  auto* ph = app.add_subcommand("phantom", "Evaluate a phantom on a dense grid");
  ph->add_option("--spec", pa.spec, "Phantom spec or experiment config (JSON)")->required();
  ph->add_option("--out", pa.out, "Output CSV")->required();
  ph->add_option("--per-axis", pa.per_axis, "Grid points per axis")->capture_default_str();

  RadonArgs ra;
  auto* rd = app.add_subcommand("radon", "Compute a translated Radon sinogram");
  rd->add_option("--spec", ra.spec, "Phantom spec (JSON)")->required();
  rd->add_option("--y0", ra.y0, "Reference point, comma separated (default origin)");
  rd->add_option("--ns", ra.ns, "Offset samples")->capture_default_str();
  rd->add_option("--ndir", ra.ndir, "Directions")->required();
  rd->add_option("--half-width", ra.half_width, "Offset half width (default: covers the support)");
  rd->add_option("--out", ra.out, "Output sinogram CSV")->required();

  BargmannArgs ba;
  auto* bg = app.add_subcommand("bargmann", "Evaluate the Segal-Bargmann transform at complex points");
  bg->set_help_flag("--help", "Print this help message and exit");
  bg->add_option("--mode", ba.mode, "direct or radon")->required()->check(CLI::IsMember({"direct", "radon"}));
  auto* field = bg->add_option("--field", ba.field, "Phantom spec (direct mode)");
  auto* sino = bg->add_option("--sino", ba.sino, "Sinogram CSV (radon mode)");
  field->excludes(sino);
  bg->add_option("--points", ba.points, "Query points (JSON lines)")->required();
  bg->add_option("--h", ba.h, "Scale h, overriding the per-line values");
  bg->add_option("--out", ba.out, "Output JSON lines")->required();

  StabilityArgs sa;
  auto* st = app.add_subcommand("stability", "Run a stability experiment");
  st->add_option("--config", sa.config, "Experiment config (JSON)")->required();
  st->add_option("--report", sa.report, "Output report (JSON)")->required();
  st->add_option("--plots", sa.plots, "Directory for plot data and script");
  st->add_option("--constants", sa.constants, "Constants file (default: frozen set)");

  VerifyArgs va;
  auto* vf = app.add_subcommand("verify", "Run the acceptance suite with the frozen constants");
  vf->add_option("--suite", va.suite, "smoke or full")->capture_default_str()->check(CLI::IsMember({"smoke", "full"}));
  vf->add_option("--report", va.report, "Write the suite report (JSON)");
  vf->add_option("--constants", va.constants, "Constants file (default: frozen set)");

  std::string cal_out;
  auto* cal = app.add_subcommand("calibrate", "Regenerate the constants from the reference runs");
  cal->add_option("--out", cal_out, "Output constants file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : HG_ERR_VALIDATION;
  }

  try {
    if (*ph) return cmd_phantom(pa);
    if (*rd) return cmd_radon(ra);
    if (*bg) return cmd_bargmann(ba);
    if (*st) return cmd_stability(sa);
    if (*vf) return cmd_verify(va);
    if (*cal) return cmd_calibrate(cal_out);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return 0;
}
