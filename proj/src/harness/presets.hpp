#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <dualdec/distortion.hpp>
#include <dualdec/problem.hpp>

namespace dualdec::harness {

/// A named, seed-reproducible experiment family with its default channel,
/// algorithm, and iteration budget.
struct Preset {
  std::string name;
  std::optional<ConsensusProblem<double>> chain;
  std::optional<GeneralConsensusProblem<double>> general;
  std::string default_algorithm;
  std::string default_metric;  ///< headline series for plots and orderings
  DistortionModel<double> default_model;
  long default_steps = 10000;
  std::uint64_t seed = 0;
};

/// Default seeds, chosen once and pinned so the stock scenarios are
/// reproducible end to end.
std::uint64_t default_seed(const std::string& preset_name);

/// Builds one of the stock presets:
///  - "case1-quantizer": five scalar subsystems in the box [-3, 3], uniform
///    quantizer on the coordination uplink (default 5 bits).
///  - "case2-noise": five unconstrained scalar subsystems, bounded uniform
///    measurement noise (default level 0.2).
///  - "general-nets-demo": five subsystems coupled through three nets
///    ({0,1}, {1,2}, {2,3,4}), error-free.
/// `bits` and `sigma` override the channel defaults where they apply.
Preset make_preset(const std::string& name, std::uint64_t seed, int bits,
                   double sigma);

}  // namespace dualdec::harness
