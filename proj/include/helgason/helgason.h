#ifndef HELGASON_H
#define HELGASON_H

/* C interface to the stability toolkit. Handles are opaque; every call
 * returns a status code and, on failure, leaves a message retrievable with
 * hg_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with hg_string_free(). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HG_API __declspec(dllexport)
#else
#define HG_API __attribute__((visibility("default")))
#endif

typedef enum hg_status {
  HG_OK = 0,
  HG_ERR_IO = 1,
  HG_ERR_VALIDATION = 2,
  HG_ERR_REGRESSION = 3,
  HG_ERR_CONVERGENCE = 4,
  HG_ERR_INTERNAL = 5
} hg_status;

typedef struct hg_phantom hg_phantom;
typedef struct hg_sinogram hg_sinogram;
typedef struct hg_constants hg_constants;
typedef struct hg_report hg_report;
typedef struct hg_suite hg_suite;

/* Called with a short progress line during long runs. */
typedef void (*hg_progress_fn)(const char* message, void* user);

HG_API const char* hg_version(void);
HG_API const char* hg_last_error(void);
HG_API void hg_string_free(char* s);

/* Phantoms: spec JSON as documented in the README. */
HG_API hg_status hg_phantom_create(const char* spec_json, hg_phantom** out);
HG_API void hg_phantom_free(hg_phantom* p);
HG_API int hg_phantom_dim(const hg_phantom* p);
HG_API hg_status hg_phantom_eval(const hg_phantom* p, const double* x, double* value);
/* Dense grid over the support box: header "x,y[,z],value". */
HG_API hg_status hg_phantom_grid_csv(const hg_phantom* p, int per_axis, char** csv);

/* Sinograms. half_width <= 0 selects the smallest range covering the support. */
HG_API hg_status hg_sinogram_compute(const hg_phantom* p, const double* y0, int ns, int ndir, double half_width,
                                     hg_sinogram** out);
HG_API hg_status hg_sinogram_read_csv(const char* path, hg_sinogram** out);
HG_API hg_status hg_sinogram_write_csv(const hg_sinogram* g, const char* path);
HG_API void hg_sinogram_free(hg_sinogram* g);
HG_API int hg_sinogram_dim(const hg_sinogram* g);
HG_API size_t hg_sinogram_ns(const hg_sinogram* g);
HG_API size_t hg_sinogram_ndir(const hg_sinogram* g);
HG_API double hg_sinogram_s(const hg_sinogram* g, size_t i);
HG_API double hg_sinogram_value(const hg_sinogram* g, size_t dir, size_t i);

/* Segal-Bargmann transform over JSON lines {"re": [..], "im": [..], "h": h}.
 * h > 0 overrides every line's h. Output lines hold value_re, value_im, weighted. */
HG_API hg_status hg_bargmann_direct(const hg_phantom* p, const char* queries_jsonl, double h, char** out_jsonl);
HG_API hg_status hg_bargmann_radon(const hg_sinogram* g, const char* queries_jsonl, double h, char** out_jsonl);

/* Frozen constants. path NULL selects HELGASON_CONSTANTS or the installed data file. */
HG_API hg_status hg_constants_load(const char* path, hg_constants** out);
HG_API hg_status hg_constants_save(const hg_constants* c, const char* path);
HG_API void hg_constants_free(hg_constants* c);
HG_API const char* hg_constants_version(const hg_constants* c);
HG_API hg_status hg_calibrate(hg_progress_fn progress, void* user, hg_constants** out);

/* Stability experiments. */
HG_API hg_status hg_experiment_run(const char* config_json, const hg_constants* c, hg_report** out);
HG_API void hg_report_free(hg_report* r);
HG_API int hg_report_applicable(const hg_report* r);
HG_API int hg_report_all_flags_true(const hg_report* r);
HG_API hg_status hg_report_json(const hg_report* r, char** json);
HG_API hg_status hg_report_decay_csv(const hg_report* r, char** csv);
HG_API hg_status hg_report_log_csv(const hg_report* r, char** csv);
HG_API hg_status hg_plot_script(char** script);

/* Acceptance suite: kind is "smoke" or "full". */
HG_API hg_status hg_suite_run(const char* kind, const hg_constants* c, hg_progress_fn progress, void* user,
                              hg_suite** out);
HG_API void hg_suite_free(hg_suite* s);
HG_API int hg_suite_pass(const hg_suite* s);
HG_API size_t hg_suite_criterion_count(const hg_suite* s);
/* Borrowed title; seconds is wall time, budget 0 when unbounded. */
HG_API hg_status hg_suite_criterion(const hg_suite* s, size_t index, int* id, const char** title, int* pass,
                                    double* seconds, double* budget_seconds);
HG_API hg_status hg_suite_json(const hg_suite* s, char** json);

#ifdef __cplusplus
}
#endif

#endif
