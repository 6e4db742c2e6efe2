#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include <dualdec/distortion.hpp>
#include <dualdec/problem.hpp>
#include <dualdec/step_rules.hpp>
#include <dualdec/subsolver.hpp>

namespace dualdec {

enum class AlgorithmKind { Exact, PartiallyDistributed, FullyDistributed };

inline const char* algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::Exact: return "exact";
    case AlgorithmKind::PartiallyDistributed: return "partial";
    case AlgorithmKind::FullyDistributed: return "full";
  }
  return "unknown";
}

enum class StopReason { IterationBudget, GradientThreshold };

inline const char* stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::IterationBudget: return "iteration-budget";
    case StopReason::GradientThreshold: return "gradient-threshold";
  }
  return "unknown";
}

/// Snapshot of the state *at* iterate k: the multiplier, the exact local
/// solutions y(lambda), the transmitted (possibly distorted) values y_hat,
/// the exact coordination direction d = A y and the distorted direction
/// d_hat actually used, the step gamma_k applied to move to iterate k+1,
/// and the dual value g(lambda).
template <typename Scalar = double>
struct IterationRecord {
  Index k = 0;
  Scalar gamma = Scalar(0);
  Vector<Scalar> lambda;
  Vector<Scalar> y;
  Vector<Scalar> y_hat;
  Vector<Scalar> d;
  Vector<Scalar> d_hat;
  Scalar dual_value = Scalar(0);
};

template <typename Scalar = double>
struct RunOptions {
  Index iterations = 0;
  Vector<Scalar> lambda0;  ///< empty means the zero vector
  Index stride = 1;        ///< keep every stride-th record (k = 0 and the
                           ///< final iterate are always kept)
  std::optional<Scalar> gradient_threshold;  ///< early stop on ||d|| <= value
};

template <typename Scalar = double>
struct AlgorithmRun {
  AlgorithmKind algorithm = AlgorithmKind::Exact;
  std::uint64_t problem_hash = 0;
  DistortionModel<Scalar> model;
  StepSizeRule<Scalar> rule;
  Index iteration_cap = 0;
  Index iterations_run = 0;
  StopReason stop = StopReason::IterationBudget;
  Scalar epsilon = Scalar(0);        ///< certified aggregate distortion bound
  Scalar min_grad_norm = Scalar(0);  ///< min ||d|| over all visited iterates
  std::vector<IterationRecord<Scalar>> trace;
};

namespace detail {

/// The one dual-update expression shared by every runner.  Both the central
/// update and the per-node segment updates go through this exact loop so that
/// equal inputs produce bitwise-equal multipliers across algorithms.
template <typename Scalar>
void apply_dual_update(Eigen::Ref<Vector<Scalar>> block,
                       const Eigen::Ref<const Vector<Scalar>>& direction,
                       Scalar gamma) {
  for (Index j = 0; j < block.size(); ++j) block(j) += gamma * direction(j);
}

template <typename Scalar>
Vector<Scalar> init_lambda(const Vector<Scalar>& lambda0, Index dual_dim) {
  if (lambda0.size() == 0) return Vector<Scalar>::Zero(dual_dim);
  if (lambda0.size() != dual_dim)
    throw InvalidDimensionsError("initial multiplier has the wrong length");
  return lambda0;
}

template <typename Scalar>
StepSizeSchedule<Scalar> make_schedule(const ConsensusProblem<Scalar>& problem,
                                       const StepSizeRule<Scalar>& rule) {
  std::optional<Scalar> mu_h;
  if (problem.constraint().kind == ConstraintKind::Unconstrained)
    mu_h = dual_strong_convexity_constant(problem);
  return StepSizeSchedule<Scalar>(rule, dual_lipschitz_constant(problem), mu_h);
}

inline bool should_record(Index k, Index stride, bool is_last) {
  return is_last || stride <= 1 || k % stride == 0;
}

}  // namespace detail

/// Error-free dual decomposition: y from the broadcast multiplier, exact
/// coordination direction d = A y, central update lambda += gamma_k d.
template <typename Scalar>
AlgorithmRun<Scalar> run_exact(const ConsensusProblem<Scalar>& problem,
                               const StepSizeRule<Scalar>& rule,
                               const RunOptions<Scalar>& opts = {}) {
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  const auto schedule = detail::make_schedule(problem, rule);

  AlgorithmRun<Scalar> run;
  run.algorithm = AlgorithmKind::Exact;
  run.problem_hash = problem.hash();
  run.model = DistortionModel<Scalar>::none();
  run.rule = rule;
  run.iteration_cap = opts.iterations;
  run.epsilon = Scalar(0);
  run.min_grad_norm = std::numeric_limits<Scalar>::infinity();

  Vector<Scalar> lambda =
      detail::init_lambda(opts.lambda0, problem.dual_dimension());
  for (Index k = 0;; ++k) {
    const Vector<Scalar> y = local_solutions(problem, lambda);
    const Vector<Scalar> d = consensus_mismatch(y, m, n);
    const Scalar gamma = schedule(k);
    const Scalar dnorm = d.norm();
    run.min_grad_norm = std::min(run.min_grad_norm, dnorm);

    const bool budget_hit = k >= opts.iterations;
    const bool threshold_hit =
        opts.gradient_threshold && dnorm <= *opts.gradient_threshold;
    const bool is_last = budget_hit || threshold_hit;
    if (detail::should_record(k, opts.stride, is_last))
      run.trace.push_back({k, gamma, lambda, y, y, d, d,
                           dual_value_at(problem, lambda, y)});
    if (is_last) {
      run.iterations_run = k;
      run.stop = threshold_hit && !budget_hit ? StopReason::GradientThreshold
                                              : StopReason::IterationBudget;
      break;
    }
    detail::apply_dual_update<Scalar>(lambda, d, gamma);
  }
  return run;
}

/// Central-coordinator variant: every node sends one distorted copy of its
/// local solution up an imperfect link; the coordinator forms the direction
/// from the received values and broadcasts the updated multiplier.
template <typename Scalar>
AlgorithmRun<Scalar> run_partially_distributed(
    const ConsensusProblem<Scalar>& problem, const StepSizeRule<Scalar>& rule,
    const DistortionModel<Scalar>& model, const RunOptions<Scalar>& opts = {}) {
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  const auto schedule = detail::make_schedule(problem, rule);

  AlgorithmRun<Scalar> run;
  run.algorithm = AlgorithmKind::PartiallyDistributed;
  run.problem_hash = problem.hash();
  run.model = model;
  run.rule = rule;
  run.iteration_cap = opts.iterations;
  run.epsilon = total_bound(model, n, m);
  run.min_grad_norm = std::numeric_limits<Scalar>::infinity();

  Vector<Scalar> lambda =
      detail::init_lambda(opts.lambda0, problem.dual_dimension());
  for (Index k = 0;; ++k) {
    const Vector<Scalar> y = local_solutions(problem, lambda);
    Vector<Scalar> y_hat(m * n);
    for (Index i = 0; i < m; ++i)
      y_hat.segment(i * n, n) = distort<Scalar>(y.segment(i * n, n), i, k, model);
    const Vector<Scalar> d = consensus_mismatch(y, m, n);
    const Vector<Scalar> d_hat = consensus_mismatch(y_hat, m, n);
    const Scalar gamma = schedule(k);
    const Scalar dnorm = d.norm();
    run.min_grad_norm = std::min(run.min_grad_norm, dnorm);

    const bool budget_hit = k >= opts.iterations;
    const bool threshold_hit =
        opts.gradient_threshold && dnorm <= *opts.gradient_threshold;
    const bool is_last = budget_hit || threshold_hit;
    if (detail::should_record(k, opts.stride, is_last))
      run.trace.push_back({k, gamma, lambda, y, y_hat, d, d_hat,
                           dual_value_at(problem, lambda, y)});
    if (is_last) {
      run.iterations_run = k;
      run.stop = threshold_hit && !budget_hit ? StopReason::GradientThreshold
                                              : StopReason::IterationBudget;
      break;
    }
    detail::apply_dual_update<Scalar>(lambda, d_hat, gamma);
  }
  return run;
}

/// Neighbor message-passing variant: node i keeps copies of the two
/// multiplier segments it owns (lambda_{i-1}, lambda_i), sends one distorted
/// copy of its solution to both neighbors, and updates its segments locally.
/// With the same distortion streams this realizes exactly the same multiplier
/// sequence as the central-coordinator variant.
template <typename Scalar>
AlgorithmRun<Scalar> run_fully_distributed(
    const ConsensusProblem<Scalar>& problem, const StepSizeRule<Scalar>& rule,
    const DistortionModel<Scalar>& model, const RunOptions<Scalar>& opts = {}) {
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  const auto schedule = detail::make_schedule(problem, rule);

  AlgorithmRun<Scalar> run;
  run.algorithm = AlgorithmKind::FullyDistributed;
  run.problem_hash = problem.hash();
  run.model = model;
  run.rule = rule;
  run.iteration_cap = opts.iterations;
  run.epsilon = total_bound(model, n, m);
  run.min_grad_norm = std::numeric_limits<Scalar>::infinity();

  const Vector<Scalar> lambda_init =
      detail::init_lambda(opts.lambda0, problem.dual_dimension());
  // seg_right[i]: node i's copy of lambda_i (i < m-1);
  // seg_left[i]:  node i's copy of lambda_{i-1} (i > 0).
  std::vector<Vector<Scalar>> seg_right(static_cast<std::size_t>(m)),
      seg_left(static_cast<std::size_t>(m));
  for (Index i = 0; i + 1 < m; ++i) {
    seg_right[static_cast<std::size_t>(i)] = lambda_init.segment(i * n, n);
    seg_left[static_cast<std::size_t>(i + 1)] = lambda_init.segment(i * n, n);
  }

  for (Index k = 0;; ++k) {
    // local solves from each node's own multiplier copies, mirroring the
    // broadcast-tilt arithmetic coordinate for coordinate
    Vector<Scalar> y(m * n), y_hat(m * n);
    for (Index i = 0; i < m; ++i) {
      Vector<Scalar> tilt = Vector<Scalar>::Zero(n);
      if (i < m - 1) tilt += seg_right[static_cast<std::size_t>(i)];
      if (i > 0) tilt -= seg_left[static_cast<std::size_t>(i)];
      y.segment(i * n, n) = problem.local_minimizer(i, tilt);
      // one transmission per node per round; both neighbors see the same copy
      y_hat.segment(i * n, n) = distort<Scalar>(y.segment(i * n, n), i, k, model);
    }
    Vector<Scalar> lambda(problem.dual_dimension());
    for (Index i = 0; i + 1 < m; ++i)
      lambda.segment(i * n, n) = seg_right[static_cast<std::size_t>(i)];
    const Vector<Scalar> d = consensus_mismatch(y, m, n);
    const Vector<Scalar> d_hat = consensus_mismatch(y_hat, m, n);
    const Scalar gamma = schedule(k);
    const Scalar dnorm = d.norm();
    run.min_grad_norm = std::min(run.min_grad_norm, dnorm);

    const bool budget_hit = k >= opts.iterations;
    const bool threshold_hit =
        opts.gradient_threshold && dnorm <= *opts.gradient_threshold;
    const bool is_last = budget_hit || threshold_hit;
    if (detail::should_record(k, opts.stride, is_last))
      run.trace.push_back({k, gamma, lambda, y, y_hat, d, d_hat,
                           dual_value_at(problem, lambda, y)});
    if (is_last) {
      run.iterations_run = k;
      run.stop = threshold_hit && !budget_hit ? StopReason::GradientThreshold
                                              : StopReason::IterationBudget;
      break;
    }

    // node i applies the same update to its copies of d_hat's blocks i-1, i;
    // neighbors apply identical arithmetic, so duplicated segments stay equal
    for (Index i = 0; i < m; ++i) {
      if (i < m - 1)
        detail::apply_dual_update<Scalar>(seg_right[static_cast<std::size_t>(i)],
                                          d_hat.segment(i * n, n), gamma);
      if (i > 0)
        detail::apply_dual_update<Scalar>(seg_left[static_cast<std::size_t>(i)],
                                          d_hat.segment((i - 1) * n, n), gamma);
    }
    for (Index i = 0; i + 1 < m; ++i)
      if (seg_right[static_cast<std::size_t>(i)] !=
          seg_left[static_cast<std::size_t>(i + 1)])
        throw std::logic_error("duplicated multiplier segments diverged");
  }
  return run;
}

/// Error-free dual decomposition on the generalized-network formulation.
template <typename Scalar>
AlgorithmRun<Scalar> run_general_exact(
    const GeneralConsensusProblem<Scalar>& problem,
    const StepSizeRule<Scalar>& rule, const RunOptions<Scalar>& opts = {}) {
  std::optional<Scalar> mu_h;
  try {
    mu_h = general_dual_strong_convexity_constant(problem);
  } catch (const ConstantUnavailableError&) {
    mu_h = std::nullopt;
  }
  const StepSizeSchedule<Scalar> schedule(
      rule, general_dual_lipschitz_constant(problem), mu_h);

  AlgorithmRun<Scalar> run;
  run.algorithm = AlgorithmKind::Exact;
  run.problem_hash = problem.hash();
  run.model = DistortionModel<Scalar>::none();
  run.rule = rule;
  run.iteration_cap = opts.iterations;
  run.epsilon = Scalar(0);
  run.min_grad_norm = std::numeric_limits<Scalar>::infinity();

  Vector<Scalar> lambda =
      detail::init_lambda(opts.lambda0, problem.dual_dimension());
  for (Index k = 0;; ++k) {
    const Vector<Scalar> y = general_local_solutions(problem, lambda);
    const Vector<Scalar> d = general_consensus_mismatch(problem, y);
    const Scalar gamma = schedule(k);
    const Scalar dnorm = d.norm();
    run.min_grad_norm = std::min(run.min_grad_norm, dnorm);

    const bool budget_hit = k >= opts.iterations;
    const bool threshold_hit =
        opts.gradient_threshold && dnorm <= *opts.gradient_threshold;
    const bool is_last = budget_hit || threshold_hit;
    if (detail::should_record(k, opts.stride, is_last))
      run.trace.push_back({k, gamma, lambda, y, y, d, d,
                           general_dual_value(problem, lambda)});
    if (is_last) {
      run.iterations_run = k;
      run.stop = threshold_hit && !budget_hit ? StopReason::GradientThreshold
                                              : StopReason::IterationBudget;
      break;
    }
    detail::apply_dual_update<Scalar>(lambda, d, gamma);
  }
  return run;
}

}  // namespace dualdec
