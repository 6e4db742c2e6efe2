#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dualdec::harness {

/// Everything a scenario execution needs, assembled from a JSON document
/// and/or command-line flags.  Unset optionals fall back to preset defaults.
struct RunConfig {
  std::string preset = "case1-quantizer";
  std::string algorithm;               ///< exact | partial | full
  std::string rule;                    ///< constant | power-decay |
                                       ///< scaled-power-decay | log-over-k
  std::optional<double> gamma;         ///< base step (default 1/L_h)
  std::optional<double> p;             ///< decay exponent
  std::optional<double> c;             ///< scale of the mu_h-relative rules
  std::optional<int> bits;             ///< quantizer resolution
  std::optional<double> sigma;         ///< noise level
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  long stride = 1;
  std::string sweep_key;               ///< one of p | bits | sigma (or empty)
  std::vector<double> sweep_values;
};

/// Parses a JSON config document.  Unknown keys and ill-typed values raise
/// ConfigError naming the field.
RunConfig load_config(const std::string& path);

/// Validates cross-field constraints (known preset and algorithm names, a
/// single sweep axis, positive counts).  Raises ConfigError naming the field.
void validate_config(const RunConfig& cfg);

}  // namespace dualdec::harness
