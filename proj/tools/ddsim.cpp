// ddsim: runs a consensus dual-decomposition scenario and writes CSV traces,
// a JSON summary, and an SVG convergence plot into the output directory.
//
// A JSON config file (--config) supplies the base settings; any flag given on
// the command line overrides the file.  Exit codes: 0 success, 1 an emitted
// metric exceeded its certified envelope, 2 invalid configuration or I/O
// failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dualdec/errors.hpp>

#include "harness/config.hpp"
#include "harness/scenario.hpp"

namespace {

/// Parses "key=v1,v2,..." into the sweep fields of the config.
void apply_sweep_spec(const std::string& spec, dualdec::harness::RunConfig* cfg) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size())
    throw dualdec::ConfigError(
        "field 'sweep': expected key=v1,v2,... but got '" + spec + "'");
  cfg->sweep_key = spec.substr(0, eq);
  cfg->sweep_values.clear();
  std::istringstream values(spec.substr(eq + 1));
  std::string token;
  while (std::getline(values, token, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      cfg->sweep_values.push_back(v);
    } catch (const std::exception&) {
      throw dualdec::ConfigError("field 'sweep': value '" + token +
                                 "' is not a number");
    }
  }
  if (cfg->sweep_values.empty())
    throw dualdec::ConfigError("field 'sweep': no values given");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Inexact dual decomposition simulator: runs a scenario preset and "
      "emits CSV/JSON/SVG artifacts"};

  std::string config_path;
  std::string preset, algorithm, rule, out, sweep_spec;
  double gamma = 0, p = 0, c = 0, sigma = 0;
  int bits = 0;
  long steps = 0, stride = 0;
  std::uint64_t seed = 0;

  app.add_option("--config", config_path, "JSON config file (flags override)");
  app.add_option("--preset", preset,
                 "case1-quantizer | case2-noise | general-nets-demo");
  auto* o_algorithm =
      app.add_option("--algorithm", algorithm, "exact | partial | full");
  auto* o_rule = app.add_option(
      "--rule", rule, "constant | power-decay | scaled-power-decay | log-over-k");
  auto* o_gamma = app.add_option("--gamma", gamma, "base step (default 1/L_h)");
  auto* o_p = app.add_option("--p", p, "decay exponent in [0, 1]");
  auto* o_c = app.add_option("--c", c, "scale of the mu_h-relative rules");
  auto* o_bits = app.add_option("--bits", bits, "quantizer resolution (1..62)");
  auto* o_sigma = app.add_option("--sigma", sigma, "noise level (>= 0)");
  auto* o_steps = app.add_option("--steps", steps, "iteration budget");
  auto* o_seed = app.add_option("--seed", seed, "problem/stream seed");
  auto* o_out = app.add_option("--out", out, "output directory (default out)");
  auto* o_stride =
      app.add_option("--stride", stride, "record every stride-th iterate");
  auto* o_sweep = app.add_option("--sweep", sweep_spec,
                                 "sweep spec key=v1,v2,... (key: p|bits|sigma)");

  CLI11_PARSE(app, argc, argv);

  try {
    dualdec::harness::RunConfig cfg;
    if (!config_path.empty()) cfg = dualdec::harness::load_config(config_path);
    if (!preset.empty()) cfg.preset = preset;
    if (o_algorithm->count() > 0) cfg.algorithm = algorithm;
    if (o_rule->count() > 0) cfg.rule = rule;
    if (o_gamma->count() > 0) cfg.gamma = gamma;
    if (o_p->count() > 0) cfg.p = p;
    if (o_c->count() > 0) cfg.c = c;
    if (o_bits->count() > 0) cfg.bits = bits;
    if (o_sigma->count() > 0) cfg.sigma = sigma;
    if (o_steps->count() > 0) cfg.steps = steps;
    if (o_seed->count() > 0) cfg.seed = seed;
    if (o_out->count() > 0) cfg.out = out;
    if (o_stride->count() > 0) cfg.stride = stride;
    if (o_sweep->count() > 0) apply_sweep_spec(sweep_spec, &cfg);

    const auto result = dualdec::harness::run_scenario(cfg);
    for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
    std::cout << result.message << "\n";
    return result.exit_code;
  } catch (const dualdec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
