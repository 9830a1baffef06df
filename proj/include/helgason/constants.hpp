#pragma once

// Frozen calibration constants. Each existential constant of the estimate
// chain is stored per dimension (n = 2, 3) together with a checksum, so a
// tampered file is detected on load.

#include <cstdint>
#include <string>

namespace helgason {

struct PerDim {
  double n2 = 0.0;
  double n3 = 0.0;
  double at(int n) const;
  double& at(int n);
};

struct Constants {
  std::string version;      // "c-" + leading checksum digits
  double margin = 1.25;     // multiplier over the largest calibrated ratio
  std::uint64_t seed = 0;   // seed of the calibration sweeps
  PerDim kernel_b;          // B_n: |G_n| <= B_n * kernel_bound_shape
  PerDim helgason_c;        // microlocal Helgason bound
  PerDim refined_c;         // refined bound near y0
  PerDim deconv_c;          // Gaussian deconvolution bound
  PerDim theorem_c;         // C_n of the log stability constant
  PerDim sobolev_k;         // Radon Sobolev normalization

  /// Canonical text of the numeric payload the checksum covers.
  std::string canonical() const;
  std::uint64_t checksum() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

std::string constants_to_json(const Constants& c);
/// Parses and verifies the checksum. Throws IoError on unreadable text and
/// RegressionError ("calibration mismatch") on a checksum failure.
Constants constants_from_json(const std::string& text);

Constants load_constants(const std::string& path);
void save_constants(const Constants& c, const std::string& path);

/// HELGASON_CONSTANTS if set, else the data file installed with the sources.
std::string default_constants_path();

/// Sets version and returns the checksum.
std::uint64_t seal(Constants& c);

}  // namespace helgason
