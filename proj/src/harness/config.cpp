#include "harness/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include <dualdec/errors.hpp>

namespace dualdec::harness {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ConfigError("field '" + field + "': " + why);
}

template <typename T>
T pull(const json& j, const std::string& field, const char* type_name) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    bad_field(field, std::string("expected ") + type_name);
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  static const std::set<std::string> known{
      "preset", "algorithm", "rule",  "gamma",  "p",   "c",     "bits",
      "sigma",  "steps",     "seed",  "out",    "stride", "sweep"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) bad_field(key, "unknown key");

  RunConfig cfg;
  if (doc.contains("preset"))
    cfg.preset = pull<std::string>(doc["preset"], "preset", "a string");
  if (doc.contains("algorithm"))
    cfg.algorithm = pull<std::string>(doc["algorithm"], "algorithm", "a string");
  if (doc.contains("rule"))
    cfg.rule = pull<std::string>(doc["rule"], "rule", "a string");
  if (doc.contains("gamma"))
    cfg.gamma = pull<double>(doc["gamma"], "gamma", "a number");
  if (doc.contains("p")) cfg.p = pull<double>(doc["p"], "p", "a number");
  if (doc.contains("c")) cfg.c = pull<double>(doc["c"], "c", "a number");
  if (doc.contains("bits")) cfg.bits = pull<int>(doc["bits"], "bits", "an integer");
  if (doc.contains("sigma"))
    cfg.sigma = pull<double>(doc["sigma"], "sigma", "a number");
  if (doc.contains("steps"))
    cfg.steps = pull<long>(doc["steps"], "steps", "an integer");
  if (doc.contains("seed"))
    cfg.seed = pull<std::uint64_t>(doc["seed"], "seed", "an unsigned integer");
  if (doc.contains("out")) cfg.out = pull<std::string>(doc["out"], "out", "a string");
  if (doc.contains("stride"))
    cfg.stride = pull<long>(doc["stride"], "stride", "an integer");
  if (doc.contains("sweep")) {
    const json& sweep = doc["sweep"];
    if (!sweep.is_object() || !sweep.contains("key") || !sweep.contains("values"))
      bad_field("sweep", "expected an object with 'key' and 'values'");
    cfg.sweep_key = pull<std::string>(sweep["key"], "sweep.key", "a string");
    cfg.sweep_values = pull<std::vector<double>>(sweep["values"], "sweep.values",
                                                 "an array of numbers");
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.preset != "case1-quantizer" && cfg.preset != "case2-noise" &&
      cfg.preset != "general-nets-demo")
    bad_field("preset", "unknown preset '" + cfg.preset + "'");
  if (!cfg.algorithm.empty() && cfg.algorithm != "exact" &&
      cfg.algorithm != "partial" && cfg.algorithm != "full")
    bad_field("algorithm", "must be exact, partial, or full");
  if (!cfg.rule.empty() && cfg.rule != "constant" && cfg.rule != "power-decay" &&
      cfg.rule != "scaled-power-decay" && cfg.rule != "log-over-k")
    bad_field("rule", "must be constant, power-decay, scaled-power-decay, or "
                      "log-over-k");
  if (cfg.gamma && !(*cfg.gamma > 0)) bad_field("gamma", "must be positive");
  if (cfg.c && !(*cfg.c > 0)) bad_field("c", "must be positive");
  if (cfg.p && !(*cfg.p >= 0 && *cfg.p <= 1))
    bad_field("p", "must lie in [0, 1]");
  if (cfg.bits && (*cfg.bits < 1 || *cfg.bits > 62))
    bad_field("bits", "must lie in [1, 62]");
  if (cfg.sigma && !(*cfg.sigma >= 0)) bad_field("sigma", "must be nonnegative");
  if (cfg.steps && *cfg.steps < 0) bad_field("steps", "must be nonnegative");
  if (cfg.stride < 1) bad_field("stride", "must be at least 1");
  if (cfg.out.empty()) bad_field("out", "must not be empty");
  if (!cfg.sweep_key.empty()) {
    if (cfg.sweep_key != "p" && cfg.sweep_key != "bits" && cfg.sweep_key != "sigma")
      bad_field("sweep.key", "must be p, bits, or sigma");
    if (cfg.sweep_values.empty()) bad_field("sweep.values", "must not be empty");
    if (cfg.sweep_key == "bits")
      for (double v : cfg.sweep_values)
        if (v != static_cast<int>(v) || v < 1 || v > 62)
          bad_field("sweep.values", "bits must be integers in [1, 62]");
    if (cfg.sweep_key == "p")
      for (double v : cfg.sweep_values)
        if (!(v >= 0 && v <= 1)) bad_field("sweep.values", "p must lie in [0, 1]");
    if (cfg.sweep_key == "sigma")
      for (double v : cfg.sweep_values)
        if (!(v >= 0)) bad_field("sweep.values", "sigma must be nonnegative");
  } else if (!cfg.sweep_values.empty()) {
    bad_field("sweep.key", "sweep values given without a sweep key");
  }
  if (cfg.preset == "general-nets-demo") {
    if (!cfg.algorithm.empty() && cfg.algorithm != "exact")
      bad_field("algorithm", "the generalized-network demo runs exact only");
    if (!cfg.sweep_key.empty())
      bad_field("sweep.key", "the generalized-network demo does not sweep");
  }
}

}  // namespace dualdec::harness
