#pragma once

// Acceptance suite with frozen constants, and the calibration that produces
// those constants from the same reference runs under a different seed.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "helgason/constants.hpp"
#include "helgason/stability.hpp"

namespace helgason {

enum class SuiteKind { smoke, full };

std::string to_string(SuiteKind k);
SuiteKind suite_kind_from_string(const std::string& s);

inline constexpr std::uint64_t kCalibrationSeed = 20240611;
inline constexpr std::uint64_t kVerifySeed = 7;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::string detail;
  double seconds = 0.0;         // wall time, kept out of the JSON report
  double budget_seconds = 0.0;  // 0 when the criterion has no runtime target
};

struct SuiteResult {
  SuiteKind kind = SuiteKind::smoke;
  std::string constants_version;
  std::uint64_t seed = kVerifySeed;
  std::vector<CriterionResult> criteria;
  std::vector<StabilityReport> reports;

  bool pass() const;
};

using Progress = std::function<void(const std::string&)>;

/// Reference stability runs: the cut-ball amplitude sweep, a narrow-cap
/// window and a reduced three-dimensional run.
std::vector<ExperimentConfig> reference_configs(SuiteKind kind, std::uint64_t seed);

/// The cut-ball amplitudes of the reference sweep.
std::vector<double> amplitude_sweep();

/// Runs criteria 1-9. Determinism (criterion 10) compares two reports.
SuiteResult run_suite(SuiteKind kind, const Constants& constants, std::uint64_t seed = kVerifySeed,
                      const Progress& progress = nullptr);

/// Deterministic JSON: no timings.
std::string suite_to_json(const SuiteResult& r);

/// Regenerates every constant. Slow (several minutes).
Constants calibrate(std::uint64_t seed = kCalibrationSeed, const Progress& progress = nullptr);

/// max |G_n| / kernel_bound_shape over a per-axis lattice of s, Re w, Im w, h.
double kernel_ratio_max(int n, int per_axis, double s_max, double w_max, double h_min, double h_max);

}  // namespace helgason
