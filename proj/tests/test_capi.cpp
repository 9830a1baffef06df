#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helgason/helgason.h"

namespace {

const char* kBall = R"({"kind": "ball_indicator", "dim": 2, "center": [0, 0], "radius": 1})";
const char* kGaussian =
    R"({"kind": "gaussian_truncated", "dim": 2, "center": [0, 0], "radius": 1, "truncation_radius": 8})";

std::string take(char* s) {
  std::string out = s ? s : "";
  hg_string_free(s);
  return out;
}

std::string error_text() { return hg_last_error(); }

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("helgason_capi_" + name);
}

}  // namespace

TEST_CASE("status codes and errors") {
  CHECK(std::string(hg_version()).size() > 0);
  hg_phantom* p = nullptr;
  CHECK(hg_phantom_create(nullptr, &p) == HG_ERR_VALIDATION);
  CHECK(error_text().find("null") != std::string::npos);
  CHECK(hg_phantom_create("{\"kind\": ", &p) == HG_ERR_VALIDATION);
  CHECK(hg_phantom_create(R"({"kind": "teapot", "dim": 2, "center": [0, 0], "radius": 1})", &p) ==
        HG_ERR_VALIDATION);
  CHECK(p == nullptr);
  CHECK(hg_phantom_create(kBall, &p) == HG_OK);
  CHECK(error_text().empty());
  hg_phantom_free(p);
  hg_phantom_free(nullptr);
}

TEST_CASE("phantom evaluation") {
  hg_phantom* p = nullptr;
  REQUIRE(hg_phantom_create(kBall, &p) == HG_OK);
  CHECK(hg_phantom_dim(p) == 2);
  double v = -1.0;
  const double inside[2] = {0.3, 0.2}, outside[2] = {0.9, 0.9};
  REQUIRE(hg_phantom_eval(p, inside, &v) == HG_OK);
  CHECK(v == 1.0);
  REQUIRE(hg_phantom_eval(p, outside, &v) == HG_OK);
  CHECK(v == 0.0);

  char* csv = nullptr;
  REQUIRE(hg_phantom_grid_csv(p, 11, &csv) == HG_OK);
  const std::string text = take(csv);
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  CHECK(lines == 1 + 11 * 11);
  CHECK(hg_phantom_grid_csv(p, 1, &csv) == HG_ERR_VALIDATION);
  hg_phantom_free(p);
}

TEST_CASE("config with lambda p at least one") {
  const std::string config = std::string(R"({"phantom": )") + kBall +
                             R"(, "window": {"y0": [0, 0], "omega0": [1, 0], "alpha": 1, "beta": 1}, "p": 2, "lambda": 0.5})";
  hg_phantom* p = nullptr;
  CHECK(hg_phantom_create(config.c_str(), &p) == HG_ERR_VALIDATION);
  CHECK(error_text().find("hypothesis violation") != std::string::npos);
}

TEST_CASE("sinogram of the unit disc") {
  hg_phantom* p = nullptr;
  REQUIRE(hg_phantom_create(kBall, &p) == HG_OK);
  hg_sinogram* g = nullptr;
  REQUIRE(hg_sinogram_compute(p, nullptr, 65, 32, 0.0, &g) == HG_OK);
  CHECK(hg_sinogram_dim(g) == 2);
  CHECK(hg_sinogram_ns(g) == 65);
  CHECK(hg_sinogram_ndir(g) == 32);
  CHECK(hg_sinogram_s(g, 32) == doctest::Approx(0.0));
  for (std::size_t j = 0; j < 32; ++j) CHECK(hg_sinogram_value(g, j, 32) == doctest::Approx(2.0).epsilon(1e-3));

  const auto path = scratch("sino.csv");
  REQUIRE(hg_sinogram_write_csv(g, path.c_str()) == HG_OK);
  hg_sinogram* back = nullptr;
  REQUIRE(hg_sinogram_read_csv(path.c_str(), &back) == HG_OK);
  CHECK(hg_sinogram_ns(back) == 65);
  CHECK(hg_sinogram_value(back, 5, 40) == hg_sinogram_value(g, 5, 40));
  hg_sinogram_free(back);
  std::filesystem::remove(path);

  hg_sinogram* bad = nullptr;
  CHECK(hg_sinogram_compute(p, nullptr, 65, 0, 0.0, &bad) == HG_ERR_VALIDATION);
  CHECK(hg_sinogram_compute(p, nullptr, 65, 32, 0.5, &bad) == HG_ERR_VALIDATION);
  CHECK(error_text().find("required range") != std::string::npos);
  CHECK(hg_sinogram_read_csv("/nonexistent/sino.csv", &bad) == HG_ERR_IO);
  hg_sinogram_free(g);
  hg_phantom_free(p);
}

TEST_CASE("transform batches") {
  hg_phantom* p = nullptr;
  REQUIRE(hg_phantom_create(kGaussian, &p) == HG_OK);
  char* out = nullptr;
  REQUIRE(hg_bargmann_direct(p, "{\"re\": [0, 0], \"im\": [0, 0], \"h\": 1}\n", 0.0, &out) == HG_OK);
  const std::string line = take(out);
  double re = 0.0, im = 0.0, w = 0.0;
  REQUIRE(std::sscanf(line.c_str(), "{\"value_re\":%lf,\"value_im\":%lf,\"weighted\":%lf}", &re, &im, &w) == 3);
  CHECK(re == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(std::abs(im) < 1e-10);

  // Radon mode on the same points, with the scale given once.
  hg_sinogram* g = nullptr;
  REQUIRE(hg_sinogram_compute(p, nullptr, 257, 256, 0.0, &g) == HG_OK);
  const char* pts = "{\"re\": [0.2, -0.1], \"im\": [0.3, 0.1]}\n{\"re\": [-0.5, 0.4], \"im\": [0, -0.2]}\n";
  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(hg_bargmann_direct(p, pts, 0.5, &a) == HG_OK);
  REQUIRE(hg_bargmann_radon(g, pts, 0.5, &b) == HG_OK);
  std::istringstream da(take(a)), db(take(b));
  std::string la, lb;
  int rows = 0;
  while (std::getline(da, la) && std::getline(db, lb)) {
    double ar = 0, ai = 0, aw = 0, br = 0, bi = 0, bw = 0;
    std::sscanf(la.c_str(), "{\"value_re\":%lf,\"value_im\":%lf,\"weighted\":%lf}", &ar, &ai, &aw);
    std::sscanf(lb.c_str(), "{\"value_re\":%lf,\"value_im\":%lf,\"weighted\":%lf}", &br, &bi, &bw);
    CHECK(std::hypot(ar - br, ai - bi) <= 1e-4 * std::hypot(ar, ai));
    ++rows;
  }
  CHECK(rows == 2);

  CHECK(hg_bargmann_direct(p, pts, 0.0, &out) == HG_ERR_VALIDATION);  // no h anywhere
  CHECK(hg_bargmann_direct(p, pts, -1.0, &out) == HG_ERR_VALIDATION);
  hg_sinogram_free(g);
  hg_phantom_free(p);
}

TEST_CASE("constants and tamper detection") {
  hg_constants* c = nullptr;
  REQUIRE(hg_constants_load(nullptr, &c) == HG_OK);
  const std::string version = hg_constants_version(c);
  CHECK(version.rfind("c-", 0) == 0);

  const auto good = scratch("constants.json");
  REQUIRE(hg_constants_save(c, good.c_str()) == HG_OK);
  hg_constants* again = nullptr;
  REQUIRE(hg_constants_load(good.c_str(), &again) == HG_OK);
  CHECK(version == hg_constants_version(again));
  hg_constants_free(again);

  std::ifstream in(good);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto at = text.find("\"margin\": 1.25");
  REQUIRE(at != std::string::npos);
  text.replace(at, 14, "\"margin\": 1.5");
  const auto bad = scratch("constants_bad.json");
  std::ofstream(bad) << text;
  hg_constants* tampered = nullptr;
  CHECK(hg_constants_load(bad.c_str(), &tampered) == HG_ERR_REGRESSION);
  CHECK(error_text().find("calibration mismatch") != std::string::npos);
  CHECK(hg_constants_load("/nonexistent/constants.json", &tampered) == HG_ERR_IO);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
  hg_constants_free(c);
}

TEST_CASE("experiments through the C interface") {
  hg_constants* c = nullptr;
  REQUIRE(hg_constants_load(nullptr, &c) == HG_OK);
  // A ball without a halfspace assertion: a valid report marked inapplicable.
  const std::string config = std::string(R"({"name": "plain-ball", "phantom": )") + kBall +
                             R"(, "window": {"y0": [1, 0], "omega0": [1, 0], "alpha": 1, "beta": 1}})";
  hg_report* r = nullptr;
  REQUIRE(hg_experiment_run(config.c_str(), c, &r) == HG_OK);
  CHECK(hg_report_applicable(r) == 0);
  CHECK(hg_report_all_flags_true(r) == 0);
  char* json = nullptr;
  REQUIRE(hg_report_json(r, &json) == HG_OK);
  const std::string text = take(json);
  CHECK(text.find("\"applicable\": false") != std::string::npos);
  CHECK(text.find(std::string("\"constants_version\": \"") + hg_constants_version(c)) != std::string::npos);
  char* csv = nullptr;
  REQUIRE(hg_report_log_csv(r, &csv) == HG_OK);
  CHECK(take(csv) == "abs_log_I,measured,bound\n");
  REQUIRE(hg_plot_script(&csv) == HG_OK);
  CHECK(take(csv).find("decay.csv") != std::string::npos);
  hg_report_free(r);

  CHECK(hg_experiment_run("{", c, &r) == HG_ERR_VALIDATION);
  hg_suite* s = nullptr;
  CHECK(hg_suite_run("medium", c, nullptr, nullptr, &s) == HG_ERR_VALIDATION);
  CHECK(hg_suite_criterion_count(nullptr) == 0);
  hg_constants_free(c);
}
