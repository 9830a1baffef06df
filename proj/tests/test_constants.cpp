#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helgason/bargmann.hpp"
#include "helgason/constants.hpp"
#include "helgason/suite.hpp"

using namespace helgason;

namespace {

Constants sample() {
  Constants c;
  c.seed = 99;
  c.kernel_b = {0.5, 0.25};
  c.helgason_c = {1e-3, 2e-3};
  c.refined_c = {1.5, 2.5};
  c.deconv_c = {0.75, 0.8};
  c.theorem_c = {1e-12, 3e-11};
  c.sobolev_k = {0.125, 0.0625};
  seal(c);
  return c;
}

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("constants round trip") {
  const Constants c = sample();
  CHECK(c.version.size() == 10);
  CHECK(c.version.rfind("c-", 0) == 0);
  const std::string text = constants_to_json(c);
  const Constants back = constants_from_json(text);
  CHECK(back.version == c.version);
  CHECK(back.seed == 99);
  CHECK(back.theorem_c.n3 == c.theorem_c.n3);
  CHECK(back.canonical() == c.canonical());
  CHECK(constants_to_json(back) == text);
}

TEST_CASE("tampered constants are rejected") {
  const std::string text = constants_to_json(sample());
  CHECK_THROWS_AS(constants_from_json(replace_once(text, "0.75", "0.76")), RegressionError);
  CHECK_THROWS_AS(constants_from_json(replace_once(text, "\"seed\": 99", "\"seed\": 98")), RegressionError);
  const Constants c = sample();
  CHECK_THROWS_AS(constants_from_json(replace_once(text, c.version, "c-00000000")), RegressionError);
  try {
    constants_from_json(replace_once(text, "0.75", "0.76"));
  } catch (const RegressionError& e) {
    CHECK(std::string(e.what()).find("calibration mismatch") != std::string::npos);
  }
  CHECK_THROWS_AS(constants_from_json("{ not json"), IoError);
  CHECK_THROWS_AS(constants_from_json("{\"schema\": 2}"), IoError);
  CHECK_THROWS_AS(load_constants("/nonexistent/constants.json"), IoError);
}

TEST_CASE("save and load through a file") {
  const auto path = std::filesystem::temp_directory_path() / "helgason_constants_test.json";
  save_constants(sample(), path.string());
  CHECK(load_constants(path.string()).version == sample().version);
  std::filesystem::remove(path);
}

TEST_CASE("frozen constants") {
  const Constants c = load_constants(default_constants_path());
  CHECK(c.seed == kCalibrationSeed);
  CHECK(c.margin == 1.25);
  for (int n : {2, 3}) {
    for (const PerDim* p : {&c.kernel_b, &c.helgason_c, &c.refined_c, &c.deconv_c, &c.theorem_c, &c.sobolev_k}) {
      CHECK(p->at(n) > 0.0);
      CHECK(std::isfinite(p->at(n)));
    }
    CHECK(c.sobolev_k.at(n) == doctest::Approx(sobolev_gaussian_ratio(n, 1.0)).epsilon(1e-12));
    // A coarse lattice away from the calibration nodes stays under B_n.
    CHECK(kernel_ratio_max(n, 4, 8.3, 4.1, 0.11, 0.83) <= c.kernel_b.at(n));
  }
  CHECK_THROWS_AS(c.kernel_b.at(4), ValidationError);
}

TEST_CASE("suite plumbing") {
  CHECK(suite_kind_from_string("smoke") == SuiteKind::smoke);
  CHECK(suite_kind_from_string("full") == SuiteKind::full);
  CHECK(to_string(SuiteKind::full) == "full");
  CHECK_THROWS_AS(suite_kind_from_string("medium"), ValidationError);
  CHECK(amplitude_sweep() == std::vector<double>{1.0, 1e-2, 1e-4, 1e-6});
  for (SuiteKind k : {SuiteKind::smoke, SuiteKind::full}) {
    const auto configs = reference_configs(k, kVerifySeed);
    CHECK(configs.size() == (k == SuiteKind::full ? 6u : 5u));
    for (const ExperimentConfig& c : configs) {
      CHECK_NOTHROW(c.validate());
      CHECK(c.seed == kVerifySeed);
      CHECK(c.lambda * c.p < 1.0);
    }
  }
  CHECK_THROWS_AS(kernel_ratio_max(2, 1, 1.0, 1.0, 0.1, 1.0), ValidationError);
}
