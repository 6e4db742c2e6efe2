#include "harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <dualdec/algorithms.hpp>
#include <dualdec/analysis.hpp>
#include <dualdec/distortion.hpp>
#include <dualdec/errors.hpp>
#include <dualdec/problem.hpp>
#include <dualdec/step_rules.hpp>
#include <dualdec/subsolver.hpp>

#include "harness/emit.hpp"
#include "harness/presets.hpp"

namespace dualdec::harness {
namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// --------------------------------------------------------------------------
// Rule resolution.  Range checks against the problem's dual constants are
// made here so that an inadmissible value is reported as a config error
// naming the offending field.

StepSizeRule<double> resolve_rule(const RunConfig& cfg,
                                  std::optional<double> p_override, double L_h,
                                  std::optional<double> mu_h) {
  std::string name = cfg.rule;
  if (name.empty())
    name = cfg.sweep_key == "p" ? "power-decay" : "constant";

  const double slack = 1.0 + 16.0 * std::numeric_limits<double>::epsilon();
  const auto checked_gamma = [&]() {
    const double g = cfg.gamma.value_or(1.0 / L_h);
    if (g > slack / L_h)
      throw ConfigError("field 'gamma': step " + format_double(g) +
                        " exceeds 1/L_h = " + format_double(1.0 / L_h));
    return g;
  };
  const auto checked_c = [&]() {
    if (!mu_h)
      throw ConfigError(
          "field 'rule': " + name +
          " needs the dual strong-convexity constant, which box-constrained "
          "problems do not provide; use constant or power-decay");
    const double c = cfg.c.value_or(0.004);
    if (c > slack * *mu_h / L_h)
      throw ConfigError("field 'c': scale " + format_double(c) +
                        " exceeds mu_h/L_h = " + format_double(*mu_h / L_h));
    return c;
  };

  if (name == "constant") return StepSizeRule<double>::constant(checked_gamma());
  if (name == "power-decay") {
    const double p = p_override.value_or(cfg.p.value_or(0.0));
    return StepSizeRule<double>::power_decay(checked_gamma(), p);
  }
  if (name == "scaled-power-decay") {
    const double c = checked_c();
    const double p = p_override.value_or(cfg.p.value_or(1.0));
    // p = 0 has no decay at all; it is the constant rule with step c/mu_h.
    if (p == 0.0) return StepSizeRule<double>::constant(c / *mu_h);
    return StepSizeRule<double>::scaled_power_decay(c, p);
  }
  if (name == "log-over-k") return StepSizeRule<double>::log_over_k(checked_c());
  throw ConfigError("field 'rule': unknown rule '" + name + "'");
}

json rule_json(const StepSizeRule<double>& rule) {
  json j;
  j["kind"] = step_rule_name(rule.kind);
  const bool has_gamma = rule.kind == StepRuleKind::Constant ||
                         rule.kind == StepRuleKind::PowerDecay;
  const bool has_c = rule.kind == StepRuleKind::ScaledPowerDecay ||
                     rule.kind == StepRuleKind::LogOverK;
  const bool has_p = rule.kind == StepRuleKind::PowerDecay ||
                     rule.kind == StepRuleKind::ScaledPowerDecay;
  j["gamma"] = has_gamma ? json(rule.gamma) : json(nullptr);
  j["c"] = has_c ? json(rule.c) : json(nullptr);
  j["p"] = has_p ? json(rule.p) : json(nullptr);
  return j;
}

json channel_json(const DistortionModel<double>& model) {
  json j;
  j["kind"] = distortion_kind_name(model.kind);
  switch (model.kind) {
    case DistortionKind::UniformQuantizer:
      j["half_width"] = model.half_width;
      j["bits"] = model.bits;
      break;
    case DistortionKind::BoundedNoise:
      j["sigma"] = model.per_dim_bound;
      j["seed"] = model.seed;
      break;
    case DistortionKind::CustomBounded:
      j["generator"] = model.generator;
      j["node_bounds"] = model.node_bounds;
      j["seed"] = model.seed;
      break;
    case DistortionKind::None:
      break;
  }
  return j;
}

// --------------------------------------------------------------------------
// Per-run bundle produced by the worker tasks.

struct RunOutput {
  std::string label;    ///< "default", "p=0.5", "bits=3", "sigma=0.1"
  std::string suffix;   ///< file-name fragment, e.g. "-p0.5"
  double sweep_value = kNaN;
  StepSizeRule<double> rule;
  DistortionModel<double> model;
  AlgorithmRun<double> run;
  MetricsSeries<double> metrics;
  BoundSeries<double> bounds;
  long violation_count = 0;
  long first_violation = -1;
};

/// Prefix minimum of the signed feasible-point objective gap: the envelope
/// asserts that some visited iterate's feasible point has a gap this small.
std::vector<double> running_min_series(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  double best = std::numeric_limits<double>::infinity();
  for (double x : v) {
    best = std::min(best, x);
    out.push_back(best);
  }
  return out;
}

/// Checks every metric against its envelope where one applies.  The absolute
/// slack absorbs the floating-point cancellation floor of values computed as
/// differences of order-one quantities; beyond it, a genuine violation.
void scan_violations(const MetricsSeries<double>& m, const BoundSeries<double>& b,
                     double scale, long* count, long* first) {
  const double rel = 1e-9;
  const double abs_tol = 1e-12 * std::max(1.0, scale);
  const auto flag = [&](std::size_t t, double metric, double bound) {
    if (metric > bound * (1.0 + rel) + abs_tol) {
      ++*count;
      if (*first < 0) *first = static_cast<long>(m.k[t]);
    }
  };
  const auto min_feas_obj = running_min_series(m.feas_obj_gap);
  for (std::size_t t = 0; t < m.k.size(); ++t) {
    flag(t, m.running_min_grad[t], b.min_grad_env[t]);
    if (!b.dual_gap_env.empty()) flag(t, m.dual_gap[t], b.dual_gap_env[t]);
    if (!b.recursion.empty()) flag(t, m.dual_gap[t], b.recursion[t]);
    if (!b.bounded_dual_dist.empty())
      flag(t, m.running_min_primal_dist[t], b.bounded_dual_dist[t]);
    if (!b.bounded_dual_obj.empty())
      flag(t, min_feas_obj[t], b.bounded_dual_obj[t]);
    if (!b.projection_flag.empty() && !b.projection_flag[t]) {
      ++*count;
      if (*first < 0) *first = static_cast<long>(m.k[t]);
    }
  }
}

// --------------------------------------------------------------------------
// CSV emission.  Cells are preformatted; absent envelopes become empty cells.

std::string cell(double v) { return format_double(v); }

std::vector<std::string> trace_header(Index dual_dim) {
  std::vector<std::string> h = {"k", "gamma"};
  for (Index i = 0; i < dual_dim; ++i)
    h.push_back("lambda_" + std::to_string(i));
  const char* rest[] = {"grad_norm",        "dual_gap",
                        "primal_dist",      "feas_dist",
                        "primal_obj_gap",   "feas_obj_gap",
                        "running_min_grad", "running_min_primal_dist",
                        "c1_envelope",      "c2_envelope",
                        "recursion_envelope"};
  h.insert(h.end(), std::begin(rest), std::end(rest));
  return h;
}

void emit_trace_csv(const std::string& path, const RunOutput& r) {
  const auto& m = r.metrics;
  const auto& b = r.bounds;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(r.run.trace.size());
  for (std::size_t t = 0; t < r.run.trace.size(); ++t) {
    const auto& rec = r.run.trace[t];
    std::vector<std::string> row = {std::to_string(rec.k), cell(rec.gamma)};
    for (Index i = 0; i < rec.lambda.size(); ++i) row.push_back(cell(rec.lambda(i)));
    row.push_back(cell(m.grad_norm[t]));
    row.push_back(cell(m.dual_gap[t]));
    row.push_back(cell(m.primal_dist[t]));
    row.push_back(cell(m.feas_dist[t]));
    row.push_back(cell(m.primal_obj_gap[t]));
    row.push_back(cell(m.feas_obj_gap[t]));
    row.push_back(cell(m.running_min_grad[t]));
    row.push_back(cell(m.running_min_primal_dist[t]));
    row.push_back(cell(b.min_grad_env[t]));
    row.push_back(b.dual_gap_env.empty() ? "" : cell(b.dual_gap_env[t]));
    row.push_back(b.recursion.empty() ? "" : cell(b.recursion[t]));
    rows.push_back(std::move(row));
  }
  write_csv(path, trace_header(r.run.trace.empty()
                                   ? Index(0)
                                   : r.run.trace.front().lambda.size()),
            rows);
}

void emit_metrics_csv(const std::string& path, const MetricsSeries<double>& m) {
  const std::vector<std::string> header = {
      "k", "dual_gap", "grad_norm", "running_min_grad", "primal_dist",
      "running_min_primal_dist", "primal_obj_gap", "feas_dist",
      "feas_obj_gap", "feas_violation"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(m.k.size());
  for (std::size_t t = 0; t < m.k.size(); ++t)
    rows.push_back({std::to_string(m.k[t]), cell(m.dual_gap[t]),
                    cell(m.grad_norm[t]), cell(m.running_min_grad[t]),
                    cell(m.primal_dist[t]), cell(m.running_min_primal_dist[t]),
                    cell(m.primal_obj_gap[t]), cell(m.feas_dist[t]),
                    cell(m.feas_obj_gap[t]), cell(m.feas_violation[t])});
  write_csv(path, header, rows);
}

void emit_bounds_csv(const std::string& path, const BoundSeries<double>& b) {
  const std::vector<std::string> header = {
      "k", "c1_envelope", "c2_envelope", "recursion_envelope",
      "bounded_dual_dist", "bounded_dual_obj", "projection_flag"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(b.k.size());
  for (std::size_t t = 0; t < b.k.size(); ++t)
    rows.push_back(
        {std::to_string(b.k[t]), cell(b.min_grad_env[t]),
         b.dual_gap_env.empty() ? "" : cell(b.dual_gap_env[t]),
         b.recursion.empty() ? "" : cell(b.recursion[t]),
         b.bounded_dual_dist.empty() ? "" : cell(b.bounded_dual_dist[t]),
         b.bounded_dual_obj.empty() ? "" : cell(b.bounded_dual_obj[t]),
         b.projection_flag.empty()
             ? ""
             : std::string(b.projection_flag[t] ? "1" : "0")});
  write_csv(path, header, rows);
}

const std::vector<double>& metric_series(const MetricsSeries<double>& m,
                                         const std::string& name) {
  if (name == "dual_gap") return m.dual_gap;
  if (name == "grad_norm") return m.grad_norm;
  if (name == "running_min_grad") return m.running_min_grad;
  if (name == "primal_dist") return m.primal_dist;
  if (name == "running_min_primal_dist") return m.running_min_primal_dist;
  if (name == "feas_dist") return m.feas_dist;
  throw ConfigError("field 'metric': unknown series '" + name + "'");
}

// --------------------------------------------------------------------------
// Rate fit: geometric regimes fit log(metric) against k, power regimes
// against log(k); both over the window before the series floors out.

json rate_fit_json(const MetricsSeries<double>& m, const std::string& metric,
                   bool geometric) {
  const auto& v = metric_series(m, metric);
  try {
    if (geometric) {
      std::size_t end = 0;
      const auto fit = log_linear_fit(m.k, v, 3.0, &end);
      return json{{"metric", metric},          {"axis", "k"},
                  {"slope", fit.slope},        {"intercept", fit.intercept},
                  {"r_squared", fit.r_squared}, {"window_end", end}};
    }
    const double floor = v.back() * 3.0;
    std::vector<double> xs, ys;
    for (std::size_t t = 0; t < v.size(); ++t) {
      if (m.k[t] < 1) continue;
      if (!(v[t] > floor) || !(v[t] > 0.0)) break;
      xs.push_back(std::log(static_cast<double>(m.k[t])));
      ys.push_back(std::log(v[t]));
    }
    if (xs.size() < 2)
      throw DegenerateProblemError("series offers no window above its floor");
    const auto fit = line_fit(xs, ys);
    return json{{"metric", metric},          {"axis", "log-k"},
                {"slope", fit.slope},        {"intercept", fit.intercept},
                {"r_squared", fit.r_squared}, {"window_end", xs.size()}};
  } catch (const Error&) {
    return nullptr;
  }
}

json finals_json(const MetricsSeries<double>& m) {
  const std::size_t t = m.k.size() - 1;
  json j;
  j["k"] = m.k[t];
  j["grad_norm"] = m.grad_norm[t];
  j["running_min_grad"] = m.running_min_grad[t];
  j["dual_gap"] = m.dual_gap[t];
  j["primal_dist"] = m.primal_dist[t];
  j["running_min_primal_dist"] = m.running_min_primal_dist[t];
  j["primal_obj_gap"] = m.primal_obj_gap[t];
  j["feas_dist"] = m.feas_dist[t];
  j["feas_obj_gap"] = m.feas_obj_gap[t];
  j["feas_violation"] = m.feas_violation[t];
  return j;
}

/// Asymptotic guarantee levels plus the feasible-point composition: the
/// consensus projection can only shrink the distance, so distance levels
/// carry over; objective levels follow from the gradient bound over the box
/// (diagonal costs) or from smoothness along the consensus subspace.
json levels_json(const BoundSeries<double>& b, bool unconstrained, double L) {
  json j;
  j["bounded_dual"] = {{"dist", b.bounded_dual_dist_lvl},
                       {"obj", b.bounded_dual_obj_lvl}};
  if (!std::isnan(b.strong_dist_lvl))
    j["strong_convexity"] = {{"dist", b.strong_dist_lvl},
                             {"obj", b.strong_obj_lvl}};
  else
    j["strong_convexity"] = nullptr;
  const double dist_lvl =
      std::isnan(b.strong_dist_lvl) ? b.bounded_dual_dist_lvl : b.strong_dist_lvl;
  json fp;
  fp["dist"] = dist_lvl;
  if (unconstrained)
    fp["obj"] = 0.5 * L * dist_lvl * dist_lvl;
  else if (!std::isnan(b.gradient_sup))
    fp["obj"] = b.gradient_sup * dist_lvl;
  else
    fp["obj"] = nullptr;
  j["feasible_point"] = fp;
  return j;
}

// --------------------------------------------------------------------------
// Chain-preset execution.

struct SweepPoint {
  std::string label;
  std::string suffix;
  double value = kNaN;
  std::optional<double> p_override;
  DistortionModel<double> model;
};

std::vector<SweepPoint> sweep_points(const RunConfig& cfg,
                                     const DistortionModel<double>& base) {
  std::vector<SweepPoint> pts;
  if (cfg.sweep_key.empty()) {
    pts.push_back({"default", "", kNaN, std::nullopt, base});
    return pts;
  }
  for (double v : cfg.sweep_values) {
    SweepPoint pt;
    pt.value = v;
    if (cfg.sweep_key == "p") {
      pt.label = "p=" + format_double(v);
      pt.suffix = "-p" + format_double(v);
      pt.p_override = v;
      pt.model = base;
    } else if (cfg.sweep_key == "bits") {
      const int b = static_cast<int>(v);
      pt.label = "bits=" + std::to_string(b);
      pt.suffix = "-bits" + std::to_string(b);
      pt.model = DistortionModel<double>::uniform_quantizer(base.half_width, b);
    } else {  // sigma
      pt.label = "sigma=" + format_double(v);
      pt.suffix = "-sigma" + format_double(v);
      pt.model = DistortionModel<double>::bounded_noise(v, base.seed);
    }
    pts.push_back(std::move(pt));
  }
  return pts;
}

AlgorithmRun<double> dispatch_run(const ConsensusProblem<double>& problem,
                                  const std::string& algorithm,
                                  const StepSizeRule<double>& rule,
                                  const DistortionModel<double>& model,
                                  const RunOptions<double>& opts) {
  if (algorithm == "exact") return run_exact(problem, rule, opts);
  if (algorithm == "partial")
    return run_partially_distributed(problem, rule, model, opts);
  if (algorithm == "full")
    return run_fully_distributed(problem, rule, model, opts);
  throw ConfigError("field 'algorithm': unknown algorithm '" + algorithm + "'");
}

ScenarioResult run_chain_scenario(const RunConfig& cfg, const Preset& preset) {
  const ConsensusProblem<double>& problem = *preset.chain;
  const double L_h = dual_lipschitz_constant(problem);
  std::optional<double> mu_h;
  if (problem.constraint().kind == ConstraintKind::Unconstrained)
    mu_h = dual_strong_convexity_constant(problem);

  const std::string algorithm =
      cfg.algorithm.empty() ? preset.default_algorithm : cfg.algorithm;
  const long steps = cfg.steps.value_or(preset.default_steps);
  const long stride = cfg.stride;

  const auto reference = reference_solution(problem);
  const auto points = sweep_points(cfg, preset.default_model);

  // Independent runs execute in parallel; results join in sweep order so
  // file and JSON emission stay deterministic.
  std::vector<std::future<RunOutput>> futures;
  futures.reserve(points.size());
  for (const auto& pt : points) {
    futures.push_back(std::async(std::launch::async, [&, pt]() {
      RunOutput out;
      out.label = pt.label;
      out.suffix = pt.suffix;
      out.sweep_value = pt.value;
      out.rule = resolve_rule(cfg, pt.p_override, L_h, mu_h);
      out.model = pt.model;
      RunOptions<double> opts;
      opts.iterations = steps;
      opts.stride = stride;
      out.run = dispatch_run(problem, algorithm, out.rule, pt.model, opts);
      out.metrics = compute_metrics(problem, out.run, reference);
      out.bounds = compute_bounds(problem, out.run, reference);
      const double scale =
          std::max(std::abs(reference.d_star), std::abs(out.bounds.h0_gap));
      scan_violations(out.metrics, out.bounds, scale, &out.violation_count,
                      &out.first_violation);
      return out;
    }));
  }
  std::vector<RunOutput> runs;
  runs.reserve(futures.size());
  for (auto& f : futures) runs.push_back(f.get());

  // ---- emission ----
  std::filesystem::create_directories(cfg.out);
  const std::string base = cfg.preset + "-" + algorithm;
  const std::string scenario_tag =
      cfg.sweep_key.empty() ? base : base + "-" + cfg.sweep_key + "-sweep";

  ScenarioResult result;
  long violations_total = 0;
  long first_violation = -1;
  std::string first_violation_run;

  json summary;
  summary["preset"] = cfg.preset;
  summary["algorithm"] = algorithm;
  summary["steps"] = steps;
  summary["stride"] = stride;
  summary["seed"] = preset.seed;
  summary["sweep"] =
      cfg.sweep_key.empty()
          ? json(nullptr)
          : json{{"key", cfg.sweep_key}, {"values", cfg.sweep_values}};
  summary["problem_hash"] = hash_hex(problem.hash());
  json constants;
  constants["mu"] = problem.strong_convexity();
  constants["L"] = problem.smoothness();
  constants["L_h"] = L_h;
  constants["mu_h"] = mu_h ? json(*mu_h) : json(nullptr);
  constants["S"] =
      sensitivity_constant(problem.subsystem_count(), problem.strong_convexity());
  // epsilon and D are per-run quantities under a sweep; the shared value is
  // surfaced here when all runs agree.
  const auto shared = [&](auto&& get) -> json {
    const double v0 = get(runs.front());
    for (const auto& r : runs)
      if (get(r) != v0) return nullptr;
    return v0;
  };
  constants["epsilon"] = shared([](const RunOutput& r) { return r.run.epsilon; });
  constants["D"] = shared([](const RunOutput& r) { return r.bounds.D; });
  if (!std::isnan(runs.front().bounds.gradient_sup))
    constants["gradient_sup"] = runs.front().bounds.gradient_sup;
  summary["constants"] = constants;

  json jruns = json::array();
  std::vector<PlotSeries> curves;
  const bool geometric_fit =
      mu_h.has_value() && runs.front().rule.kind == StepRuleKind::Constant;

  for (const auto& r : runs) {
    const std::string stem = base + r.suffix;
    const std::string trace_path = join_path(cfg.out, stem + "-trace.csv");
    const std::string metrics_path = join_path(cfg.out, stem + "-metrics.csv");
    const std::string bounds_path = join_path(cfg.out, stem + "-bounds.csv");
    emit_trace_csv(trace_path, r);
    emit_metrics_csv(metrics_path, r.metrics);
    emit_bounds_csv(bounds_path, r.bounds);
    result.files.push_back(trace_path);
    result.files.push_back(metrics_path);
    result.files.push_back(bounds_path);

    violations_total += r.violation_count;
    if (r.first_violation >= 0 && first_violation < 0) {
      first_violation = r.first_violation;
      first_violation_run = r.label;
    }

    json jr;
    jr["label"] = r.label;
    jr["sweep_value"] = num_or_null(r.sweep_value);
    jr["rule"] = rule_json(r.rule);
    jr["channel"] = channel_json(r.model);
    jr["epsilon"] = r.run.epsilon;
    jr["dual_radius"] = r.bounds.D;
    jr["initial_dual_gap"] = r.bounds.h0_gap;
    jr["stop"] = stop_reason_name(r.run.stop);
    jr["finals"] = finals_json(r.metrics);
    jr["levels"] = levels_json(
        r.bounds, problem.constraint().kind == ConstraintKind::Unconstrained,
        problem.smoothness());
    jr["rate_fit"] =
        rate_fit_json(r.metrics, preset.default_metric, geometric_fit);
    jr["violations"] = {{"count", r.violation_count},
                        {"first_iteration", r.first_violation >= 0
                                                ? json(r.first_violation)
                                                : json(nullptr)}};
    jr["files"] = {{"trace", stem + "-trace.csv"},
                   {"metrics", stem + "-metrics.csv"},
                   {"bounds", stem + "-bounds.csv"}};
    jruns.push_back(std::move(jr));

    PlotSeries s;
    s.label = r.label;
    const auto& v = metric_series(r.metrics, preset.default_metric);
    for (std::size_t t = 0; t < r.metrics.k.size(); ++t) {
      s.x.push_back(static_cast<double>(r.metrics.k[t]));
      s.y.push_back(v[t]);
    }
    curves.push_back(std::move(s));
  }
  summary["runs"] = std::move(jruns);
  summary["violations_total"] = violations_total;

  // Single runs overlay the applicable envelopes on the metric curve.
  if (cfg.sweep_key.empty()) {
    const auto& r = runs.front();
    const auto add_env = [&](const char* label, const std::vector<double>& v) {
      if (v.empty()) return;
      PlotSeries s;
      s.label = label;
      for (std::size_t t = 0; t < r.bounds.k.size(); ++t) {
        s.x.push_back(static_cast<double>(r.bounds.k[t]));
        s.y.push_back(v[t]);
      }
      curves.push_back(std::move(s));
    };
    add_env("c1_envelope", r.bounds.min_grad_env);
    add_env("c2_envelope", r.bounds.dual_gap_env);
    add_env("recursion_envelope", r.bounds.recursion);
  }

  const std::string svg_path = join_path(cfg.out, scenario_tag + ".svg");
  write_svg_log_plot(svg_path, scenario_tag, "k", preset.default_metric, curves);
  result.files.push_back(svg_path);

  const std::string summary_path =
      join_path(cfg.out, scenario_tag + "-summary.json");
  write_json(summary_path, summary);
  result.files.push_back(summary_path);

  std::ostringstream msg;
  msg << scenario_tag << ": " << runs.size()
      << (runs.size() == 1 ? " run" : " runs") << ", " << violations_total
      << " envelope violation" << (violations_total == 1 ? "" : "s");
  if (violations_total > 0) {
    msg << "; first at iteration " << first_violation << " (run "
        << first_violation_run << ")";
    result.exit_code = 1;
  }
  result.message = msg.str();
  return result;
}

// --------------------------------------------------------------------------
// Multi-net demo execution: error-free run measured against the optimality
// system reference.  The emitted column layout matches the chain scenarios;
// envelopes that have no multi-net counterpart stay empty.

ScenarioResult run_general_scenario(const RunConfig& cfg, const Preset& preset) {
  const GeneralConsensusProblem<double>& gp = *preset.general;
  const double L_h = general_dual_lipschitz_constant(gp);
  std::optional<double> mu_h;
  try {
    mu_h = general_dual_strong_convexity_constant(gp);
  } catch (const ConstantUnavailableError&) {
  }

  const long steps = cfg.steps.value_or(preset.default_steps);
  RunOptions<double> opts;
  opts.iterations = steps;
  opts.stride = cfg.stride;
  const auto rule = resolve_rule(cfg, std::nullopt, L_h, mu_h);
  const auto run = run_general_exact(gp, rule, opts);
  const auto reference = general_reference_solution(gp);

  RunOutput out;
  out.label = "default";
  out.sweep_value = kNaN;
  out.rule = rule;
  out.model = DistortionModel<double>::none();
  out.run = run;

  MetricsSeries<double>& m = out.metrics;
  for (const auto& rec : run.trace) {
    m.k.push_back(rec.k);
    m.dual_gap.push_back(reference.d_star - rec.dual_value);
    m.grad_norm.push_back(rec.d.norm());
    m.running_min_grad.push_back(
        m.running_min_grad.empty()
            ? m.grad_norm.back()
            : std::min(m.running_min_grad.back(), m.grad_norm.back()));
    const double dist = (rec.y - reference.y_star).norm();
    m.primal_dist.push_back(dist);
    m.running_min_primal_dist.push_back(
        m.running_min_primal_dist.empty()
            ? dist
            : std::min(m.running_min_primal_dist.back(), dist));
    m.primal_obj_gap.push_back(general_primal_objective(gp, rec.y) -
                               reference.p_star);
    const Vector<double> y_tilde = general_feasible_point(gp, rec.y);
    m.feas_dist.push_back((y_tilde - reference.y_star).norm());
    m.feas_obj_gap.push_back(general_primal_objective(gp, y_tilde) -
                             reference.p_star);
    m.feas_violation.push_back(rec.d.norm());
  }

  BoundSeries<double>& b = out.bounds;
  b.epsilon = 0.0;
  b.h0_gap = reference.d_star - run.trace.front().dual_value;
  for (const auto& rec : run.trace)
    b.D = std::max(b.D, (rec.lambda - reference.lambda_star).norm());
  const StepSizeSchedule<double> schedule(rule, L_h, mu_h);
  const auto gammas = gamma_sequence(schedule, run.iterations_run + 1);
  std::vector<double> recursion_full;
  if (mu_h) recursion_full = recursion_envelope(b.h0_gap, gammas, *mu_h, 0.0);
  const bool constant_step = rule.kind == StepRuleKind::Constant;
  double gamma_sum = 0.0;
  Index next = 0;
  for (std::size_t t = 0; t < m.k.size(); ++t) {
    const Index k = m.k[t];
    while (next <= k) {
      gamma_sum += gammas[static_cast<std::size_t>(next)];
      ++next;
    }
    b.k.push_back(k);
    b.min_grad_env.push_back(std::sqrt(2.0 * b.h0_gap / gamma_sum));
    if (mu_h && constant_step)
      b.dual_gap_env.push_back(
          dual_gap_envelope(b.h0_gap, gammas[0], *mu_h, 0.0, k));
    if (mu_h)
      b.recursion.push_back(recursion_full[static_cast<std::size_t>(k)]);
    b.projection_flag.push_back(
        m.feas_dist[t] <= m.primal_dist[t] * (1.0 + 1e-12) ? 1 : 0);
  }

  const double scale = std::max(std::abs(reference.d_star), std::abs(b.h0_gap));
  scan_violations(m, b, scale, &out.violation_count, &out.first_violation);

  // ---- emission ----
  std::filesystem::create_directories(cfg.out);
  const std::string base = cfg.preset + "-exact";
  ScenarioResult result;
  const std::string trace_path = join_path(cfg.out, base + "-trace.csv");
  const std::string metrics_path = join_path(cfg.out, base + "-metrics.csv");
  const std::string bounds_path = join_path(cfg.out, base + "-bounds.csv");
  emit_trace_csv(trace_path, out);
  emit_metrics_csv(metrics_path, m);
  emit_bounds_csv(bounds_path, b);
  result.files = {trace_path, metrics_path, bounds_path};

  // Per-net consensus residual of the final iterate: the infinity norm of
  // each net's chained copy differences.
  const auto& final_rec = run.trace.back();
  json net_residuals = json::array();
  for (Index j = 0; j < gp.net_count(); ++j) {
    double res = 0.0;
    for (Index c = 0; c + 1 < gp.member_count(j); ++c) {
      const auto a = final_rec.y.segment(gp.copy_offset(j, c), gp.net_dim(j));
      const auto bb =
          final_rec.y.segment(gp.copy_offset(j, c + 1), gp.net_dim(j));
      res = std::max(res,
                     (a - bb).template lpNorm<Eigen::Infinity>());
    }
    net_residuals.push_back(res);
  }

  json summary;
  summary["preset"] = cfg.preset;
  summary["algorithm"] = "exact";
  summary["steps"] = steps;
  summary["stride"] = cfg.stride;
  summary["seed"] = preset.seed;
  summary["sweep"] = nullptr;
  summary["problem_hash"] = hash_hex(gp.hash());
  json constants;
  constants["mu"] = gp.strong_convexity();
  constants["L"] = gp.smoothness();
  constants["L_h"] = L_h;
  constants["mu_h"] = mu_h ? json(*mu_h) : json(nullptr);
  constants["S"] = nullptr;
  constants["epsilon"] = 0.0;
  constants["D"] = b.D;
  summary["constants"] = constants;
  json jr;
  jr["label"] = out.label;
  jr["sweep_value"] = nullptr;
  jr["rule"] = rule_json(rule);
  jr["channel"] = channel_json(out.model);
  jr["epsilon"] = 0.0;
  jr["dual_radius"] = b.D;
  jr["initial_dual_gap"] = b.h0_gap;
  jr["stop"] = stop_reason_name(run.stop);
  jr["finals"] = finals_json(m);
  jr["net_consensus_residuals"] = net_residuals;
  jr["levels"] = nullptr;
  jr["rate_fit"] =
      rate_fit_json(m, preset.default_metric, mu_h.has_value() && constant_step);
  jr["violations"] = {{"count", out.violation_count},
                      {"first_iteration", out.first_violation >= 0
                                              ? json(out.first_violation)
                                              : json(nullptr)}};
  jr["files"] = {{"trace", base + "-trace.csv"},
                 {"metrics", base + "-metrics.csv"},
                 {"bounds", base + "-bounds.csv"}};
  summary["runs"] = json::array({std::move(jr)});
  summary["violations_total"] = out.violation_count;

  std::vector<PlotSeries> curves;
  PlotSeries s;
  s.label = preset.default_metric;
  const auto& v = metric_series(m, preset.default_metric);
  for (std::size_t t = 0; t < m.k.size(); ++t) {
    s.x.push_back(static_cast<double>(m.k[t]));
    s.y.push_back(v[t]);
  }
  curves.push_back(std::move(s));
  if (!b.min_grad_env.empty()) {
    PlotSeries e;
    e.label = "c1_envelope";
    for (std::size_t t = 0; t < b.k.size(); ++t) {
      e.x.push_back(static_cast<double>(b.k[t]));
      e.y.push_back(b.min_grad_env[t]);
    }
    curves.push_back(std::move(e));
  }
  const std::string svg_path = join_path(cfg.out, base + ".svg");
  write_svg_log_plot(svg_path, base, "k", preset.default_metric, curves);
  result.files.push_back(svg_path);
  const std::string summary_path = join_path(cfg.out, base + "-summary.json");
  write_json(summary_path, summary);
  result.files.push_back(summary_path);

  std::ostringstream msg;
  msg << base << ": 1 run, " << out.violation_count << " envelope violation"
      << (out.violation_count == 1 ? "" : "s");
  if (out.violation_count > 0) {
    msg << "; first at iteration " << out.first_violation;
    result.exit_code = 1;
  }
  result.message = msg.str();
  return result;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& cfg) {
  validate_config(cfg);
  const std::uint64_t seed = cfg.seed.value_or(default_seed(cfg.preset));
  const Preset preset = make_preset(cfg.preset, seed, cfg.bits.value_or(5),
                                    cfg.sigma.value_or(0.2));
  if (preset.general) return run_general_scenario(cfg, preset);
  return run_chain_scenario(cfg, preset);
}

}  // namespace dualdec::harness
