#pragma once

/// Dual-side evaluation built from the per-subsystem minimizations.
///
/// For multipliers lambda on the chain constraints, subsystem i sees the
/// tilt delta_i = lambda_i - lambda_{i-1} (boundary segments zero) and
/// solves
///
///     y_i(lambda) = argmin_{y in Y} f_i(y) + delta_i' y.
///
/// The dual function g(lambda) sums those optimal values, and its gradient
/// is the stacked consensus mismatch d = A y(lambda), computed blockwise as
/// y_i - y_{i+1} (the coupling matrix is never formed).  The negated dual
/// h = -g is the function the iteration schemes descend.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "problem.hpp"
#include "types.hpp"

namespace dualdec {

/// One local subproblem: min_{y in constraint} f(y) + tilt' y.
template <typename Scalar = double>
struct LocalProblem {
  QuadraticCost<Scalar> cost;
  Vector<Scalar> tilt;
  ConstraintSet<Scalar> constraint;
};

/// Closed-form local solve.  Unconstrained: 2 A y = -(q + tilt).  Symmetric
/// box: requires a diagonal quadratic term, minimized coordinatewise by
/// clamping the unconstrained solution to [-a, a].
template <typename Scalar>
Vector<Scalar> solve_local(const LocalProblem<Scalar>& local) {
  const Index n = local.cost.matrix.rows();
  if (local.cost.matrix.cols() != n || local.tilt.size() != n ||
      local.cost.offset.size() != n)
    throw InvalidDimensionsError("local subproblem dimensions disagree");
  if (local.constraint.kind == ConstraintKind::Unconstrained) {
    Vector<Scalar> rhs = Scalar(-0.5) * (local.cost.offset + local.tilt);
    return local.cost.matrix.llt().solve(rhs);
  }
  if (!local.cost.matrix.isDiagonal(Scalar(0)))
    throw UnsupportedSubproblemError(
        "box-constrained local subproblem requires a diagonal quadratic term");
  const Scalar a = local.constraint.half_width;
  Vector<Scalar> y(n);
  for (Index j = 0; j < n; ++j) {
    const Scalar u = -(local.cost.offset(j) + local.tilt(j)) /
                     (Scalar(2) * local.cost.matrix(j, j));
    y(j) = std::clamp(u, -a, a);
  }
  return y;
}

/// Tilt seen by subsystem i: lambda_i - lambda_{i-1} with the boundary
/// segments fixed to zero.
template <typename Scalar>
Vector<Scalar> local_tilt(const ConsensusProblem<Scalar>& problem,
                          const Vector<Scalar>& lambda, Index i) {
  const Index n = problem.dimension();
  const Index m = problem.subsystem_count();
  Vector<Scalar> tilt = Vector<Scalar>::Zero(n);
  if (i < m - 1) tilt += lambda.segment(i * n, n);
  if (i > 0) tilt -= lambda.segment((i - 1) * n, n);
  return tilt;
}

/// All local minimizers stacked into one vector of length m n.
template <typename Scalar>
Vector<Scalar> local_solutions(const ConsensusProblem<Scalar>& problem,
                               const Vector<Scalar>& lambda) {
  if (lambda.size() != problem.dual_dimension())
    throw InvalidDimensionsError("multiplier vector has the wrong length");
  const Index n = problem.dimension();
  Vector<Scalar> y(problem.primal_dimension());
  for (Index i = 0; i < problem.subsystem_count(); ++i)
    y.segment(i * n, n) = problem.local_minimizer(i, local_tilt(problem, lambda, i));
  return y;
}

/// Consensus mismatch d = A y computed blockwise: block i is y_i - y_{i+1}.
template <typename Scalar>
Vector<Scalar> consensus_mismatch(const Vector<Scalar>& y, Index m, Index n) {
  if (y.size() != m * n)
    throw InvalidDimensionsError("stacked vector has the wrong length");
  Vector<Scalar> d((m - 1) * n);
  for (Index i = 0; i < m - 1; ++i)
    d.segment(i * n, n) = y.segment(i * n, n) - y.segment((i + 1) * n, n);
  return d;
}

/// Separable primal objective f(y) = sum_i f_i(y_i).
template <typename Scalar>
Scalar primal_objective(const ConsensusProblem<Scalar>& problem,
                        const Vector<Scalar>& y) {
  if (y.size() != problem.primal_dimension())
    throw InvalidDimensionsError("stacked vector has the wrong length");
  const Index n = problem.dimension();
  Scalar v = Scalar(0);
  for (Index i = 0; i < problem.subsystem_count(); ++i)
    v += cost_value(problem.cost(i), y.segment(i * n, n));
  return v;
}

/// Dual value at the already-solved local minimizers:
/// g = sum_i [f_i(y_i) + delta_i' y_i].
template <typename Scalar>
Scalar dual_value_at(const ConsensusProblem<Scalar>& problem,
                     const Vector<Scalar>& lambda, const Vector<Scalar>& y) {
  const Index n = problem.dimension();
  Scalar g = Scalar(0);
  for (Index i = 0; i < problem.subsystem_count(); ++i) {
    const auto yi = y.segment(i * n, n);
    g += cost_value(problem.cost(i), yi) + local_tilt(problem, lambda, i).dot(yi);
  }
  return g;
}

/// g(lambda): concave by construction.
template <typename Scalar>
Scalar dual_value(const ConsensusProblem<Scalar>& problem,
                  const Vector<Scalar>& lambda) {
  return dual_value_at(problem, lambda, local_solutions(problem, lambda));
}

/// Exact dual gradient d = A y(lambda).
template <typename Scalar>
Vector<Scalar> dual_gradient_exact(const ConsensusProblem<Scalar>& problem,
                                   const Vector<Scalar>& lambda) {
  return consensus_mismatch(local_solutions(problem, lambda),
                            problem.subsystem_count(), problem.dimension());
}

enum class ReferenceMethod { KktSolve, LongExactRun };

inline const char* reference_method_name(ReferenceMethod m) {
  return m == ReferenceMethod::KktSolve ? "kkt-solve" : "long-exact-run";
}

/// Ground truth for convergence measurements.  Objective values use the
/// representable costs y' A_i y + q_i' y, so they are comparable only as
/// differences against values computed the same way.
template <typename Scalar = double>
struct ReferenceSolution {
  Vector<Scalar> y_star;       ///< consensus-feasible primal optimum
  Vector<Scalar> lambda_star;  ///< dual optimum (a dual optimum, for boxes)
  Scalar p_star = 0;           ///< f(y_star)
  Scalar d_star = 0;           ///< g(lambda_star)
  ReferenceMethod method = ReferenceMethod::KktSolve;
  Index iterations_used = 0;   ///< long-exact-run only
  std::uint64_t problem_hash = 0;
};

namespace detail {

/// Stationarity + feasibility system for the unconstrained case:
///   [ 2 blkdiag(A_i)   A' ] [y]   [-q]
///   [ A                0  ] [l] = [ 0].
template <typename Scalar>
ReferenceSolution<Scalar> reference_by_kkt(const ConsensusProblem<Scalar>& problem) {
  const Index m = problem.subsystem_count();
  const Index n = problem.dimension();
  const Index np = problem.primal_dimension();
  const Index nd = problem.dual_dimension();
  Matrix<Scalar> kkt = Matrix<Scalar>::Zero(np + nd, np + nd);
  Vector<Scalar> rhs = Vector<Scalar>::Zero(np + nd);
  for (Index i = 0; i < m; ++i) {
    kkt.block(i * n, i * n, n, n) = Scalar(2) * problem.cost(i).matrix;
    rhs.segment(i * n, n) = -problem.cost(i).offset;
  }
  const Matrix<Scalar> a = build_coupling_matrix<Scalar>(m, n);
  kkt.block(np, 0, nd, np) = a;
  kkt.block(0, np, np, nd) = a.transpose();
  Eigen::FullPivLU<Matrix<Scalar>> lu(kkt);
  if (!lu.isInvertible())
    throw DegenerateProblemError("singular optimality system");
  const Vector<Scalar> sol = lu.solve(rhs);
  ReferenceSolution<Scalar> ref;
  ref.y_star = sol.head(np);
  ref.lambda_star = sol.tail(nd);
  ref.p_star = primal_objective(problem, ref.y_star);
  ref.d_star = dual_value(problem, ref.lambda_star);
  ref.method = ReferenceMethod::KktSolve;
  ref.problem_hash = problem.hash();
  return ref;
}

/// Consensus average replicated m times; the replication makes A y_tilde
/// vanish exactly.  Defined here for use by the long-run reference; the
/// analysis header re-exposes it as the feasible-point map.
template <typename Scalar>
Vector<Scalar> replicate_block_average(const Vector<Scalar>& y, Index m, Index n) {
  // Anchor the mean at the first block so consensus inputs are fixed points
  // bit-for-bit.
  Vector<Scalar> mean = y.head(n);
  Vector<Scalar> acc = Vector<Scalar>::Zero(n);
  for (Index i = 1; i < m; ++i) acc += y.segment(i * n, n) - y.head(n);
  mean += acc / Scalar(m);
  Vector<Scalar> out(m * n);
  for (Index i = 0; i < m; ++i) out.segment(i * n, n) = mean;
  return out;
}

/// Error-free dual ascent with gamma = 1/L_h until the gradient norm
/// reaches tol.  Used when the box constraints rule out the linear
/// optimality system.
template <typename Scalar>
ReferenceSolution<Scalar> reference_by_long_run(
    const ConsensusProblem<Scalar>& problem, Scalar tol, Index cap) {
  const Scalar gamma = Scalar(1) / dual_lipschitz_constant(problem);
  Vector<Scalar> lambda = Vector<Scalar>::Zero(problem.dual_dimension());
  Vector<Scalar> y;
  Vector<Scalar> d;
  Scalar dnorm = 0;
  for (Index k = 0;; ++k) {
    y = local_solutions(problem, lambda);
    d = consensus_mismatch(y, problem.subsystem_count(), problem.dimension());
    dnorm = d.norm();
    if (dnorm <= tol) {
      ReferenceSolution<Scalar> ref;
      Vector<Scalar> avg = replicate_block_average(
          y, problem.subsystem_count(), problem.dimension());
      if (problem.constraint().kind == ConstraintKind::SymmetricBox) {
        // The true block mean lies in the box; clamp only to absorb the
        // last-ulp rounding of the average at active bounds.
        const Scalar a = problem.constraint().half_width;
        avg = avg.array().min(a).max(-a).matrix();
      }
      ref.y_star = std::move(avg);
      ref.lambda_star = lambda;
      ref.p_star = primal_objective(problem, ref.y_star);
      ref.d_star = dual_value_at(problem, lambda, y);
      ref.method = ReferenceMethod::LongExactRun;
      ref.iterations_used = k;
      ref.problem_hash = problem.hash();
      return ref;
    }
    if (k >= cap)
      throw NoConvergenceError(
          "reference run hit the iteration cap before reaching tolerance",
          static_cast<double>(dnorm));
    lambda += gamma * d;
  }
}

}  // namespace detail

/// Reference primal/dual optimum.  Unconstrained problems solve the linear
/// optimality system directly; box-constrained problems run the error-free
/// iteration until the consensus mismatch reaches tol (default 1e-10),
/// giving up past the iteration cap.
template <typename Scalar>
ReferenceSolution<Scalar> reference_solution(const ConsensusProblem<Scalar>& problem,
                                             Scalar tol = Scalar(1e-10),
                                             Index cap = 1000000) {
  if (problem.constraint().kind == ConstraintKind::Unconstrained)
    return detail::reference_by_kkt(problem);
  return detail::reference_by_long_run(problem, tol, cap);
}

// ---------------------------------------------------------------------------
// Multi-net variants.  The stacked copy vector is ordered per net, per
// member; subsystem i's tilt is the concatenation of its per-copy segments
// in net-index order.

template <typename Scalar>
Vector<Scalar> general_local_tilt(const GeneralConsensusProblem<Scalar>& gp,
                                  const Vector<Scalar>& lambda, Index i) {
  Index pos = 0;
  for (const auto& [j, k] : gp.copies_of(i)) pos += gp.net_dim(j);
  Vector<Scalar> tilt = Vector<Scalar>::Zero(pos);
  pos = 0;
  for (const auto& [j, k] : gp.copies_of(i)) {
    const Index nj = gp.net_dim(j);
    const Index mj = gp.member_count(j);
    auto seg = tilt.segment(pos, nj);
    if (k < mj - 1) seg += lambda.segment(gp.dual_offset(j) + k * nj, nj);
    if (k > 0) seg -= lambda.segment(gp.dual_offset(j) + (k - 1) * nj, nj);
    pos += nj;
  }
  return tilt;
}

template <typename Scalar>
Vector<Scalar> general_local_solutions(const GeneralConsensusProblem<Scalar>& gp,
                                       const Vector<Scalar>& lambda) {
  if (lambda.size() != gp.dual_dimension())
    throw InvalidDimensionsError("multiplier vector has the wrong length");
  Vector<Scalar> y(gp.stacked_dimension());
  for (Index i = 0; i < gp.subsystem_count(); ++i) {
    const Vector<Scalar> yi = gp.local_minimizer(i, general_local_tilt(gp, lambda, i));
    Index pos = 0;
    for (const auto& [j, k] : gp.copies_of(i)) {
      const Index nj = gp.net_dim(j);
      y.segment(gp.copy_offset(j, k), nj) = yi.segment(pos, nj);
      pos += nj;
    }
  }
  return y;
}

/// Per-net chained mismatch, stacked in net order.
template <typename Scalar>
Vector<Scalar> general_consensus_mismatch(const GeneralConsensusProblem<Scalar>& gp,
                                          const Vector<Scalar>& y) {
  Vector<Scalar> d(gp.dual_dimension());
  for (Index j = 0; j < gp.net_count(); ++j) {
    const Index nj = gp.net_dim(j);
    for (Index k = 0; k < gp.member_count(j) - 1; ++k)
      d.segment(gp.dual_offset(j) + k * nj, nj) =
          y.segment(gp.copy_offset(j, k), nj) -
          y.segment(gp.copy_offset(j, k + 1), nj);
  }
  return d;
}

template <typename Scalar>
Scalar general_primal_objective(const GeneralConsensusProblem<Scalar>& gp,
                                const Vector<Scalar>& y) {
  Scalar v = Scalar(0);
  for (Index i = 0; i < gp.subsystem_count(); ++i) {
    Index pos = 0;
    Vector<Scalar> yi(gp.cost(i).offset.size());
    for (const auto& [j, k] : gp.copies_of(i)) {
      const Index nj = gp.net_dim(j);
      yi.segment(pos, nj) = y.segment(gp.copy_offset(j, k), nj);
      pos += nj;
    }
    v += cost_value(gp.cost(i), yi);
  }
  return v;
}

template <typename Scalar>
Scalar general_dual_value(const GeneralConsensusProblem<Scalar>& gp,
                          const Vector<Scalar>& lambda) {
  const Vector<Scalar> y = general_local_solutions(gp, lambda);
  return general_primal_objective(gp, y) +
         lambda.dot(general_consensus_mismatch(gp, y));
}

template <typename Scalar>
Vector<Scalar> general_dual_gradient(const GeneralConsensusProblem<Scalar>& gp,
                                     const Vector<Scalar>& lambda) {
  return general_consensus_mismatch(gp, general_local_solutions(gp, lambda));
}

/// Optimality-system reference for the (unconstrained) multi-net problem.
template <typename Scalar>
ReferenceSolution<Scalar> general_reference_solution(
    const GeneralConsensusProblem<Scalar>& gp) {
  const Index np = gp.stacked_dimension();
  const Index nd = gp.dual_dimension();
  Matrix<Scalar> kkt = Matrix<Scalar>::Zero(np + nd, np + nd);
  Vector<Scalar> rhs = Vector<Scalar>::Zero(np + nd);
  for (Index i = 0; i < gp.subsystem_count(); ++i) {
    const auto& copies = gp.copies_of(i);
    // scatter 2 A_i over this subsystem's copy positions
    Index rpos = 0;
    for (const auto& [ja, ka] : copies) {
      const Index nja = gp.net_dim(ja);
      Index cpos = 0;
      for (const auto& [jb, kb] : copies) {
        const Index njb = gp.net_dim(jb);
        kkt.block(gp.copy_offset(ja, ka), gp.copy_offset(jb, kb), nja, njb) +=
            Scalar(2) * gp.cost(i).matrix.block(rpos, cpos, nja, njb);
        cpos += njb;
      }
      rhs.segment(gp.copy_offset(ja, ka), nja) -=
          gp.cost(i).offset.segment(rpos, nja);
      rpos += nja;
    }
  }
  const Matrix<Scalar> a = build_general_coupling(gp);
  kkt.block(np, 0, nd, np) = a;
  kkt.block(0, np, np, nd) = a.transpose();
  Eigen::FullPivLU<Matrix<Scalar>> lu(kkt);
  if (!lu.isInvertible())
    throw DegenerateProblemError("singular optimality system");
  const Vector<Scalar> sol = lu.solve(rhs);
  ReferenceSolution<Scalar> ref;
  ref.y_star = sol.head(np);
  ref.lambda_star = sol.tail(nd);
  ref.p_star = general_primal_objective(gp, ref.y_star);
  ref.d_star = general_dual_value(gp, ref.lambda_star);
  ref.method = ReferenceMethod::KktSolve;
  ref.problem_hash = gp.hash();
  return ref;
}

}  // namespace dualdec
