#include "helgason/helgason.h"

#include <cstring>
#include <new>
#include <sstream>

#include "helgason/bargmann.hpp"
#include "helgason/constants.hpp"
#include "helgason/io.hpp"
#include "helgason/radon.hpp"
#include "helgason/sphere.hpp"
#include "helgason/stability.hpp"
#include "helgason/suite.hpp"

struct hg_phantom {
  helgason::SampledField field;
};

struct hg_sinogram {
  helgason::Sinogram sino;
};

struct hg_constants {
  helgason::Constants constants;
};

struct hg_report {
  helgason::StabilityReport report;
};

struct hg_suite {
  helgason::SuiteResult result;
};

namespace {

using namespace helgason;

thread_local std::string g_last_error;

hg_status fail(hg_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs body, translating exceptions into status codes.
template <class F>
hg_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return HG_OK;
  } catch (const Error& e) {
    return fail(static_cast<hg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HG_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw ValidationError(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Progress wrap(hg_progress_fn fn, void* user) {
  if (!fn) return nullptr;
  return [fn, user](const std::string& m) { fn(m.c_str(), user); };
}

// A bare phantom spec, or an experiment config whose phantom is used.
PhantomSpec spec_from_text(const std::string& text) {
  const nlohmann::json j = parse_json_text(text, "phantom spec");
  if (j.is_object() && j.contains("phantom")) {
    const ExperimentConfig c = experiment_config_from_json(text);
    if (c.lambda * c.p >= 1.0) throw ValidationError("hypothesis violation: lambda * p >= 1");
    return c.phantom;
  }
  return phantom_spec_from_json(j);
}

}  // namespace

extern "C" {

const char* hg_version(void) { return "1.0.0"; }

const char* hg_last_error(void) { return g_last_error.c_str(); }

void hg_string_free(char* s) { std::free(s); }

hg_status hg_phantom_create(const char* spec_json, hg_phantom** out) {
  return guarded([&] {
    require(spec_json, "spec");
    require(out, "output handle");
    *out = new hg_phantom{make_phantom(spec_from_text(spec_json))};
  });
}

void hg_phantom_free(hg_phantom* p) { delete p; }

int hg_phantom_dim(const hg_phantom* p) { return p ? p->field.dim() : 0; }

hg_status hg_phantom_eval(const hg_phantom* p, const double* x, double* value) {
  return guarded([&] {
    require(p, "phantom");
    require(x, "point");
    require(value, "value");
    Vec v{x[0], x[1], p->field.dim() == 3 ? x[2] : 0.0};
    *value = p->field(v);
  });
}

hg_status hg_phantom_grid_csv(const hg_phantom* p, int per_axis, char** csv) {
  return guarded([&] {
    require(p, "phantom");
    require(csv, "output");
    if (per_axis < 2) throw ValidationError("grid needs at least 2 points per axis");
    const SampledField& f = p->field;
    const int n = f.dim();
    const Ball& b = f.support();
    std::ostringstream out;
    out.precision(17);
    out << (n == 2 ? "x,y,value\n" : "x,y,z,value\n");
    auto node = [&](int axis, int i) { return b.center[axis] - b.radius + 2.0 * b.radius * i / (per_axis - 1); };
    const int nz = n == 3 ? per_axis : 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < per_axis; ++j)
        for (int i = 0; i < per_axis; ++i) {
          const Vec x{node(0, i), node(1, j), n == 3 ? node(2, k) : 0.0};
          out << x[0] << "," << x[1] << ",";
          if (n == 3) out << x[2] << ",";
          out << f(x) << "\n";
        }
    *csv = dup_string(out.str());
  });
}

hg_status hg_sinogram_compute(const hg_phantom* p, const double* y0, int ns, int ndir, double half_width,
                              hg_sinogram** out) {
  return guarded([&] {
    require(p, "phantom");
    require(out, "output handle");
    const int n = p->field.dim();
    Vec y{};
    if (y0)
      for (int k = 0; k < n; ++k) y[k] = y0[k];
    if (ndir < 1) throw ValidationError("ndir must be positive");
    std::optional<double> hw;
    if (half_width > 0.0) hw = half_width;
    *out = new hg_sinogram{radon(p->field, y, ns, default_directions(n, ndir), hw)};
  });
}

hg_status hg_sinogram_read_csv(const char* path, hg_sinogram** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output handle");
    *out = new hg_sinogram{read_sinogram_csv(path)};
  });
}

hg_status hg_sinogram_write_csv(const hg_sinogram* g, const char* path) {
  return guarded([&] {
    require(g, "sinogram");
    require(path, "path");
    write_sinogram_csv(g->sino, path);
  });
}

void hg_sinogram_free(hg_sinogram* g) { delete g; }

int hg_sinogram_dim(const hg_sinogram* g) { return g ? g->sino.dim : 0; }
size_t hg_sinogram_ns(const hg_sinogram* g) { return g ? g->sino.ns() : 0; }
size_t hg_sinogram_ndir(const hg_sinogram* g) { return g ? g->sino.ndir() : 0; }

double hg_sinogram_s(const hg_sinogram* g, size_t i) {
  return g && i < g->sino.ns() ? g->sino.s[i] : 0.0;
}

double hg_sinogram_value(const hg_sinogram* g, size_t dir, size_t i) {
  return g && dir < g->sino.ndir() && i < g->sino.ns() ? g->sino.at(dir, i) : 0.0;
}

hg_status hg_bargmann_direct(const hg_phantom* p, const char* queries_jsonl, double h, char** out_jsonl) {
  return guarded([&] {
    require(p, "phantom");
    require(queries_jsonl, "queries");
    require(out_jsonl, "output");
    std::optional<double> hh;
    if (h != 0.0) hh = h;
    const auto q = parse_queries_jsonl(queries_jsonl, p->field.dim(), hh);
    *out_jsonl = dup_string(samples_to_jsonl(sb_direct_batch(p->field, q)));
  });
}

hg_status hg_bargmann_radon(const hg_sinogram* g, const char* queries_jsonl, double h, char** out_jsonl) {
  return guarded([&] {
    require(g, "sinogram");
    require(queries_jsonl, "queries");
    require(out_jsonl, "output");
    std::optional<double> hh;
    if (h != 0.0) hh = h;
    const auto q = parse_queries_jsonl(queries_jsonl, g->sino.dim, hh);
    *out_jsonl = dup_string(samples_to_jsonl(sb_from_radon_batch(g->sino, q)));
  });
}

hg_status hg_constants_load(const char* path, hg_constants** out) {
  return guarded([&] {
    require(out, "output handle");
    *out = new hg_constants{load_constants(path ? std::string(path) : default_constants_path())};
  });
}

hg_status hg_constants_save(const hg_constants* c, const char* path) {
  return guarded([&] {
    require(c, "constants");
    require(path, "path");
    save_constants(c->constants, path);
  });
}

void hg_constants_free(hg_constants* c) { delete c; }

const char* hg_constants_version(const hg_constants* c) { return c ? c->constants.version.c_str() : ""; }

hg_status hg_calibrate(hg_progress_fn progress, void* user, hg_constants** out) {
  return guarded([&] {
    require(out, "output handle");
    *out = new hg_constants{calibrate(kCalibrationSeed, wrap(progress, user))};
  });
}

hg_status hg_experiment_run(const char* config_json, const hg_constants* c, hg_report** out) {
  return guarded([&] {
    require(config_json, "config");
    require(c, "constants");
    require(out, "output handle");
    *out = new hg_report{run_experiment(experiment_config_from_json(config_json), c->constants)};
  });
}

void hg_report_free(hg_report* r) { delete r; }

int hg_report_applicable(const hg_report* r) { return r && r->report.applicable ? 1 : 0; }

int hg_report_all_flags_true(const hg_report* r) { return r && r->report.all_flags_true() ? 1 : 0; }

hg_status hg_report_json(const hg_report* r, char** json) {
  return guarded([&] {
    require(r, "report");
    require(json, "output");
    *json = dup_string(report_to_json(r->report));
  });
}

hg_status hg_report_decay_csv(const hg_report* r, char** csv) {
  return guarded([&] {
    require(r, "report");
    require(csv, "output");
    *csv = dup_string(decay_csv(r->report));
  });
}

hg_status hg_report_log_csv(const hg_report* r, char** csv) {
  return guarded([&] {
    require(r, "report");
    require(csv, "output");
    *csv = dup_string(log_stability_csv({r->report}));
  });
}

hg_status hg_plot_script(char** script) {
  return guarded([&] {
    require(script, "output");
    *script = dup_string(plot_script());
  });
}

hg_status hg_suite_run(const char* kind, const hg_constants* c, hg_progress_fn progress, void* user,
                       hg_suite** out) {
  return guarded([&] {
    require(kind, "suite kind");
    require(c, "constants");
    require(out, "output handle");
    *out = new hg_suite{run_suite(suite_kind_from_string(kind), c->constants, kVerifySeed, wrap(progress, user))};
  });
}

void hg_suite_free(hg_suite* s) { delete s; }

int hg_suite_pass(const hg_suite* s) { return s && s->result.pass() ? 1 : 0; }

size_t hg_suite_criterion_count(const hg_suite* s) { return s ? s->result.criteria.size() : 0; }

hg_status hg_suite_criterion(const hg_suite* s, size_t index, int* id, const char** title, int* pass,
                             double* seconds, double* budget_seconds) {
  return guarded([&] {
    require(s, "suite");
    if (index >= s->result.criteria.size()) throw ValidationError("criterion index out of range");
    const CriterionResult& c = s->result.criteria[index];
    if (id) *id = c.id;
    if (title) *title = c.title.c_str();
    if (pass) *pass = c.pass ? 1 : 0;
    if (seconds) *seconds = c.seconds;
    if (budget_seconds) *budget_seconds = c.budget_seconds;
  });
}

hg_status hg_suite_json(const hg_suite* s, char** json) {
  return guarded([&] {
    require(s, "suite");
    require(json, "output");
    *json = dup_string(suite_to_json(s->result));
  });
}

}  // extern "C"
