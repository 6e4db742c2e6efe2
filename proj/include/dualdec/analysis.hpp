#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <dualdec/algorithms.hpp>
#include <dualdec/problem.hpp>
#include <dualdec/subsolver.hpp>

namespace dualdec {

/// Euclidean projection of a stacked vector onto the consensus subspace:
/// every block becomes the arithmetic mean of the blocks.  The anchored
/// summation makes exact-consensus inputs bitwise fixed points.
template <typename Scalar>
Vector<Scalar> feasible_point(const Vector<Scalar>& y, Index m, Index n) {
  return detail::replicate_block_average(y, m, n);
}

/// Problem-aware construction: projects onto consensus and, for box
/// constraints, clamps the shared block back into the box.  The mean of box
/// points lies in the box, so the clamp only absorbs last-ulp rounding; all
/// blocks stay identical, hence consensus is preserved exactly.
template <typename Scalar>
Vector<Scalar> feasible_point(const ConsensusProblem<Scalar>& problem,
                              const Vector<Scalar>& y) {
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  Vector<Scalar> out = detail::replicate_block_average(y, m, n);
  if (problem.constraint().kind == ConstraintKind::SymmetricBox) {
    const Scalar a = problem.constraint().half_width;
    Vector<Scalar> block =
        out.head(n).cwiseMax(Scalar(-a)).cwiseMin(Scalar(a));
    for (Index i = 0; i < m; ++i) out.segment(i * n, n) = block;
  }
  return out;
}

/// Per-net consensus projection for the generalized-network formulation:
/// within every net, each copy becomes the anchored mean of that net's
/// copies, so all chained differences vanish exactly.
template <typename Scalar>
Vector<Scalar> general_feasible_point(const GeneralConsensusProblem<Scalar>& gp,
                                      const Vector<Scalar>& y) {
  if (y.size() != gp.stacked_dimension())
    throw InvalidDimensionsError("stacked vector has the wrong length");
  Vector<Scalar> out(y.size());
  for (Index j = 0; j < gp.net_count(); ++j) {
    const Index nj = gp.net_dim(j);
    const Index mj = gp.member_count(j);
    Vector<Scalar> mean = y.segment(gp.copy_offset(j, 0), nj);
    Vector<Scalar> acc = Vector<Scalar>::Zero(nj);
    for (Index k = 1; k < mj; ++k)
      acc += y.segment(gp.copy_offset(j, k), nj) -
             y.segment(gp.copy_offset(j, 0), nj);
    mean += acc / static_cast<Scalar>(mj);
    for (Index k = 0; k < mj; ++k)
      out.segment(gp.copy_offset(j, k), nj) = mean;
  }
  return out;
}

/// All per-iteration error metrics of a run, measured against the reference.
template <typename Scalar = double>
struct MetricsSeries {
  std::vector<Index> k;
  std::vector<Scalar> dual_gap;          ///< h(lambda_k) - h(lambda*)
  std::vector<Scalar> grad_norm;         ///< ||grad h(lambda_k)|| = ||d_k||
  std::vector<Scalar> running_min_grad;
  std::vector<Scalar> primal_dist;       ///< ||y_k - y*||
  std::vector<Scalar> running_min_primal_dist;
  std::vector<Scalar> primal_obj_gap;    ///< f(y_k) - f(y*)
  std::vector<Scalar> feas_dist;         ///< ||y~_k - y*||
  std::vector<Scalar> feas_obj_gap;      ///< f(y~_k) - f(y*)
  std::vector<Scalar> feas_violation;    ///< ||A y_k||
};

template <typename Scalar>
MetricsSeries<Scalar> compute_metrics(const ConsensusProblem<Scalar>& problem,
                                      const AlgorithmRun<Scalar>& run,
                                      const ReferenceSolution<Scalar>& ref) {
  if (run.problem_hash != problem.hash() || ref.problem_hash != problem.hash())
    throw IncompatibleInputsError(
        "run, reference, and problem do not describe the same instance");
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  MetricsSeries<Scalar> s;
  Scalar min_grad = std::numeric_limits<Scalar>::infinity();
  Scalar min_dist = std::numeric_limits<Scalar>::infinity();
  for (const auto& rec : run.trace) {
    s.k.push_back(rec.k);
    s.dual_gap.push_back(ref.d_star - rec.dual_value);
    const Scalar g = rec.d.norm();
    min_grad = std::min(min_grad, g);
    s.grad_norm.push_back(g);
    s.running_min_grad.push_back(min_grad);
    const Scalar dist = (rec.y - ref.y_star).norm();
    min_dist = std::min(min_dist, dist);
    s.primal_dist.push_back(dist);
    s.running_min_primal_dist.push_back(min_dist);
    s.primal_obj_gap.push_back(primal_objective(problem, rec.y) - ref.p_star);
    const Vector<Scalar> y_tilde = feasible_point(problem, rec.y);
    s.feas_dist.push_back((y_tilde - ref.y_star).norm());
    s.feas_obj_gap.push_back(primal_objective(problem, y_tilde) - ref.p_star);
    s.feas_violation.push_back(consensus_mismatch(rec.y, m, n).norm());
  }
  return s;
}

/// gamma_0 .. gamma_{count-1} of a validated schedule.
template <typename Scalar>
std::vector<Scalar> gamma_sequence(const StepSizeSchedule<Scalar>& schedule,
                                   Index count) {
  std::vector<Scalar> g;
  g.reserve(static_cast<std::size_t>(count));
  for (Index k = 0; k < count; ++k) g.push_back(schedule(k));
  return g;
}

/// Running-min gradient envelope sqrt(2 h0_gap / sum_{i<=k} gamma_i) + eps.
template <typename Scalar>
Scalar min_grad_envelope(Scalar h0_gap, const std::vector<Scalar>& gammas,
                         Scalar eps, Index k) {
  if (k < 0 || k >= static_cast<Index>(gammas.size()))
    throw InvalidDimensionsError("envelope index outside the step sequence");
  Scalar sum = Scalar(0);
  for (Index i = 0; i <= k; ++i) sum += gammas[static_cast<std::size_t>(i)];
  return std::sqrt(Scalar(2) * h0_gap / sum) + eps;
}

template <typename Scalar>
std::vector<Scalar> min_grad_envelope_series(Scalar h0_gap,
                                             const std::vector<Scalar>& gammas,
                                             Scalar eps) {
  std::vector<Scalar> out;
  out.reserve(gammas.size());
  Scalar sum = Scalar(0);
  for (Scalar g : gammas) {
    sum += g;
    out.push_back(std::sqrt(Scalar(2) * h0_gap / sum) + eps);
  }
  return out;
}

/// Geometric dual-gap envelope (1 - gamma mu_h)^k h0_gap + eps^2/(2 mu_h)
/// for a constant admissible step.
template <typename Scalar>
Scalar dual_gap_envelope(Scalar h0_gap, Scalar gamma, Scalar mu_h, Scalar eps,
                         Index k) {
  if (!(mu_h > Scalar(0)))
    throw ConstantUnavailableError(
        "geometric envelope needs the dual strong-convexity constant");
  return std::pow(Scalar(1) - gamma * mu_h, static_cast<Scalar>(k)) * h0_gap +
         eps * eps / (Scalar(2) * mu_h);
}

/// Numeric descent recursion b_{k+1} = (1 - gamma_k mu_h) b_k +
/// gamma_k eps^2 / 2, returned as b_0 .. b_K with K = gammas.size().
template <typename Scalar>
std::vector<Scalar> recursion_envelope(Scalar h0_gap,
                                       const std::vector<Scalar>& gammas,
                                       Scalar mu_h, Scalar eps) {
  if (!(mu_h > Scalar(0)))
    throw ConstantUnavailableError(
        "descent recursion needs the dual strong-convexity constant");
  std::vector<Scalar> b;
  b.reserve(gammas.size() + 1);
  b.push_back(h0_gap);
  for (Scalar g : gammas)
    b.push_back((Scalar(1) - g * mu_h) * b.back() +
                g * eps * eps / Scalar(2));
  return b;
}

/// S = sqrt((4 + 4 cos(pi/m)) / mu): scales multiplier distances into primal
/// objective perturbations in the chain topology.
template <typename Scalar>
Scalar sensitivity_constant(Index m, Scalar mu) {
  if (m < 2) throw InvalidDimensionsError("need at least two subsystems");
  if (!(mu > Scalar(0)))
    throw DegenerateProblemError("strong convexity constant must be positive");
  const Scalar c = std::cos(Scalar(EIGEN_PI) / static_cast<Scalar>(m));
  return std::sqrt((Scalar(4) + Scalar(4) * c) / mu);
}

/// Asymptotic level of the running-min primal distance when only a dual
/// iterate-distance bound D is available: sqrt(2 D eps / mu).
template <typename Scalar>
Scalar bounded_dual_dist_level(Scalar D, Scalar eps, Scalar mu) {
  return std::sqrt(Scalar(2) * D * eps / mu);
}

/// Matching level for the running-min primal objective gap:
/// D eps + sqrt(D) S (D + ||lambda*||) sqrt(eps).
template <typename Scalar>
Scalar bounded_dual_obj_level(Scalar D, Scalar eps, Scalar S,
                              Scalar lambda_star_norm) {
  return D * eps + std::sqrt(D) * S * (D + lambda_star_norm) * std::sqrt(eps);
}

/// Strong-convexity asymptotic level for the primal distance:
/// eps sqrt(1 / (mu mu_h)).
template <typename Scalar>
Scalar strong_convexity_dist_level(Scalar eps, Scalar mu, Scalar mu_h) {
  if (!(mu_h > Scalar(0)))
    throw ConstantUnavailableError(
        "level needs the dual strong-convexity constant");
  return eps * std::sqrt(Scalar(1) / (mu * mu_h));
}

/// Strong-convexity asymptotic level for the primal objective gap:
/// (eps^2 / 2 mu_h)(1 + S sqrt(2/mu_h)) + eps S ||lambda*|| sqrt(1/(2 mu_h)).
template <typename Scalar>
Scalar strong_convexity_obj_level(Scalar eps, Scalar mu_h, Scalar S,
                                  Scalar lambda_star_norm) {
  if (!(mu_h > Scalar(0)))
    throw ConstantUnavailableError(
        "level needs the dual strong-convexity constant");
  return eps * eps / (Scalar(2) * mu_h) *
             (Scalar(1) + S * std::sqrt(Scalar(2) / mu_h)) +
         eps * S * lambda_star_norm * std::sqrt(Scalar(1) / (Scalar(2) * mu_h));
}

/// Largest gradient norm of the total cost over the consensus segment of the
/// box, in closed form for diagonal cost matrices: the per-coordinate
/// quadratic is maximized at a box corner.
template <typename Scalar>
Scalar consensus_gradient_sup(const ConsensusProblem<Scalar>& problem) {
  if (problem.constraint().kind != ConstraintKind::SymmetricBox)
    throw ConstantUnavailableError(
        "the gradient sup is finite only on box-constrained problems");
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  const Scalar a = problem.constraint().half_width;
  Scalar total = Scalar(0);
  for (Index j = 0; j < n; ++j) {
    Scalar plus = Scalar(0), minus = Scalar(0);
    for (Index i = 0; i < m; ++i) {
      if (!problem.cost_is_diagonal(i))
        throw UnsupportedSubproblemError(
            "closed-form gradient sup needs diagonal cost matrices");
      const Scalar ajj = problem.cost(i).matrix(j, j);
      const Scalar qj = problem.cost(i).offset(j);
      const Scalar gp = Scalar(2) * ajj * a + qj;
      const Scalar gm = Scalar(-2) * ajj * a + qj;
      plus += gp * gp;
      minus += gm * gm;
    }
    total += std::max(plus, minus);
  }
  return std::sqrt(total);
}

/// Per-run bound package: envelopes at the recorded iterations plus the
/// asymptotic levels and the constants they are built from.
template <typename Scalar = double>
struct BoundSeries {
  std::vector<Index> k;
  std::vector<Scalar> min_grad_env;        ///< running-min gradient envelope
  std::vector<Scalar> dual_gap_env;        ///< dual-gap envelope (constant step)
  std::vector<Scalar> recursion;         ///< numeric recursion envelope
  std::vector<Scalar> bounded_dual_dist; ///< sqrt((2D/mu) G_k)
  std::vector<Scalar> bounded_dual_obj;  ///< D G_k + sqrt(D) S (D+||l*||) sqrt(G_k)
  std::vector<char> projection_flag;     ///< 1 if ||y~-y*|| <= ||y-y*||
  Scalar epsilon = Scalar(0);
  Scalar D = Scalar(0);                  ///< sup_k ||lambda_k - lambda*||
  Scalar S = Scalar(0);
  Scalar h0_gap = Scalar(0);
  Scalar bounded_dual_dist_lvl = Scalar(0);
  Scalar bounded_dual_obj_lvl = Scalar(0);
  Scalar strong_dist_lvl = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar strong_obj_lvl = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar gradient_sup = std::numeric_limits<Scalar>::quiet_NaN();  ///< box+diagonal only
};

template <typename Scalar>
BoundSeries<Scalar> compute_bounds(const ConsensusProblem<Scalar>& problem,
                                   const AlgorithmRun<Scalar>& run,
                                   const ReferenceSolution<Scalar>& ref) {
  if (run.problem_hash != problem.hash() || ref.problem_hash != problem.hash())
    throw IncompatibleInputsError(
        "run, reference, and problem do not describe the same instance");
  if (run.trace.empty() || run.trace.front().k != 0)
    throw IncompatibleInputsError("bounds need a trace starting at iteration 0");

  const Index m = problem.subsystem_count();
  const Scalar mu = problem.strong_convexity();
  std::optional<Scalar> mu_h;
  if (problem.constraint().kind == ConstraintKind::Unconstrained)
    mu_h = dual_strong_convexity_constant(problem);
  const auto schedule = detail::make_schedule(problem, run.rule);
  const auto gammas = gamma_sequence(schedule, run.iterations_run + 1);

  BoundSeries<Scalar> s;
  s.epsilon = run.epsilon;
  s.S = sensitivity_constant(m, mu);
  s.h0_gap = ref.d_star - run.trace.front().dual_value;
  for (const auto& rec : run.trace)
    s.D = std::max(s.D, (rec.lambda - ref.lambda_star).norm());
  const Scalar lstar = ref.lambda_star.norm();

  const bool constant_step = run.rule.kind == StepRuleKind::Constant;
  std::vector<Scalar> recursion_full;
  if (mu_h)
    recursion_full = recursion_envelope(s.h0_gap, gammas, *mu_h, s.epsilon);

  Scalar gamma_sum = Scalar(0);
  Index next = 0;
  for (const auto& rec : run.trace) {
    while (next <= rec.k) {
      gamma_sum += gammas[static_cast<std::size_t>(next)];
      ++next;
    }
    s.k.push_back(rec.k);
    const Scalar g_env = std::sqrt(Scalar(2) * s.h0_gap / gamma_sum) + s.epsilon;
    s.min_grad_env.push_back(g_env);
    if (mu_h && constant_step)
      s.dual_gap_env.push_back(
          dual_gap_envelope(s.h0_gap, gammas[0], *mu_h, s.epsilon, rec.k));
    if (mu_h)
      s.recursion.push_back(recursion_full[static_cast<std::size_t>(rec.k)]);
    s.bounded_dual_dist.push_back(
        std::sqrt(Scalar(2) * s.D * g_env / mu));
    s.bounded_dual_obj.push_back(s.D * g_env + std::sqrt(s.D) * s.S *
                                                   (s.D + lstar) *
                                                   std::sqrt(g_env));
    const Vector<Scalar> y_tilde = feasible_point(problem, rec.y);
    s.projection_flag.push_back(
        (y_tilde - ref.y_star).norm() <=
                (rec.y - ref.y_star).norm() * (Scalar(1) + Scalar(1e-12))
            ? 1
            : 0);
  }

  s.bounded_dual_dist_lvl = bounded_dual_dist_level(s.D, s.epsilon, mu);
  s.bounded_dual_obj_lvl = bounded_dual_obj_level(s.D, s.epsilon, s.S, lstar);
  if (mu_h) {
    s.strong_dist_lvl = strong_convexity_dist_level(s.epsilon, mu, *mu_h);
    s.strong_obj_lvl =
        strong_convexity_obj_level(s.epsilon, *mu_h, s.S, lstar);
  }
  if (problem.constraint().kind == ConstraintKind::SymmetricBox) {
    bool diagonal = true;
    for (Index i = 0; i < m; ++i) diagonal = diagonal && problem.cost_is_diagonal(i);
    if (diagonal) s.gradient_sup = consensus_gradient_sup(problem);
  }
  return s;
}

/// Least-squares line fit y = slope x + intercept with the coefficient of
/// determination.
template <typename Scalar = double>
struct LineFit {
  Scalar slope = Scalar(0);
  Scalar intercept = Scalar(0);
  Scalar r_squared = Scalar(0);
};

template <typename Scalar>
LineFit<Scalar> line_fit(const std::vector<Scalar>& x,
                         const std::vector<Scalar>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidDimensionsError("line fit needs two equal-length samples");
  const auto n = static_cast<Scalar>(x.size());
  Scalar sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const Scalar vxx = sxx - sx * sx / n;
  const Scalar vxy = sxy - sx * sy / n;
  const Scalar vyy = syy - sy * sy / n;
  if (!(vxx > Scalar(0)))
    throw DegenerateProblemError("line fit needs varying abscissae");
  LineFit<Scalar> f;
  f.slope = vxy / vxx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = vyy > Scalar(0) ? (vxy * vxy) / (vxx * vyy) : Scalar(1);
  return f;
}

/// Fits log(values) against k over the prefix where the series still sits
/// clearly above its final floor (values[i] > floor_multiplier * final).
/// Returns the fit plus the window end (exclusive) through `window_end`.
template <typename Scalar>
LineFit<Scalar> log_linear_fit(const std::vector<Index>& k,
                               const std::vector<Scalar>& values,
                               Scalar floor_multiplier, std::size_t* window_end = nullptr) {
  if (k.size() != values.size() || values.size() < 2)
    throw InvalidDimensionsError("log fit needs two equal-length samples");
  const Scalar floor = values.back() * floor_multiplier;
  std::size_t end = 0;
  while (end < values.size() && values[end] > floor && values[end] > Scalar(0))
    ++end;
  if (window_end) *window_end = end;
  if (end < 2)
    throw DegenerateProblemError("series offers no window above its floor");
  std::vector<Scalar> xs, ys;
  xs.reserve(end);
  ys.reserve(end);
  for (std::size_t i = 0; i < end; ++i) {
    xs.push_back(static_cast<Scalar>(k[i]));
    ys.push_back(std::log(values[i]));
  }
  return line_fit(xs, ys);
}

}  // namespace dualdec
