#pragma once

/// Global-consensus problem data.
///
/// A chain-consensus problem couples m subsystems, each holding a private
/// copy y_i in R^n of a shared decision variable and a strongly convex
/// quadratic cost
///
///     f_i(y) = y' A_i y + q_i' y,
///
/// through the chained constraints y_i = y_{i+1}.  The coupling matrix A
/// stacks the pairwise difference blocks [I, -I]; its Gram spectrum drives
/// the smoothness and strong-convexity constants of the negated dual
/// function, which this header exposes alongside the problem data.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iostream>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "types.hpp"

namespace dualdec {

template <typename Scalar = double>
struct QuadraticCost {
  Matrix<Scalar> matrix;  ///< symmetric positive definite quadratic term
  Vector<Scalar> offset;  ///< linear term
};

/// f_i evaluated at a single block.
template <typename Scalar, typename Derived>
Scalar cost_value(const QuadraticCost<Scalar>& cost,
                  const Eigen::MatrixBase<Derived>& y) {
  return y.dot(cost.matrix * y) + cost.offset.dot(y);
}

enum class ConstraintKind { Unconstrained, SymmetricBox };

/// Per-subsystem decision space: all of R^n or the box [-a, a]^n.
template <typename Scalar = double>
struct ConstraintSet {
  ConstraintKind kind = ConstraintKind::Unconstrained;
  Scalar half_width = Scalar(0);

  static ConstraintSet unconstrained() { return {}; }

  static ConstraintSet symmetric_box(Scalar a) {
    if (!(a > Scalar(0)))
      throw InvalidDimensionsError("box half-width must be positive");
    return {ConstraintKind::SymmetricBox, a};
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& y) const {
    if (kind == ConstraintKind::Unconstrained) return true;
    return (y.derived().array().abs() <= half_width).all();
  }
};

namespace detail {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

template <typename Scalar>
void hash_scalar(std::uint64_t& h, Scalar v) {
  hash_bytes(h, &v, sizeof(v));
}

template <typename Scalar>
void hash_matrix(std::uint64_t& h, const Matrix<Scalar>& a) {
  hash_scalar(h, static_cast<std::int64_t>(a.rows()));
  hash_scalar(h, static_cast<std::int64_t>(a.cols()));
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) hash_scalar(h, a(i, j));
}

/// Symmetry and positive definiteness check shared by both problem classes.
/// Asymmetric or non-definite matrices are rejected rather than repaired:
/// silently symmetrizing would hide bugs in the data that produced them.
/// Returns the extreme eigenvalues of the (validated) matrix.
template <typename Scalar>
std::pair<Scalar, Scalar> validate_cost(const QuadraticCost<Scalar>& cost,
                                        Index n, Index which) {
  const auto& a = cost.matrix;
  if (a.rows() != a.cols())
    throw InvalidDimensionsError("cost " + std::to_string(which) +
                                 ": quadratic term must be square");
  if (a.rows() != n)
    throw InvalidDimensionsError("cost " + std::to_string(which) +
                                 ": quadratic term does not match dimension " +
                                 std::to_string(n));
  if (cost.offset.size() != n)
    throw InvalidDimensionsError("cost " + std::to_string(which) +
                                 ": linear term does not match dimension " +
                                 std::to_string(n));
  const Scalar scale = std::max(Scalar(1), a.template lpNorm<Eigen::Infinity>());
  const Scalar asym = (a - a.transpose()).template lpNorm<Eigen::Infinity>();
  if (asym > Scalar(1e-12) * scale)
    throw DegenerateProblemError("cost " + std::to_string(which) +
                                 ": quadratic term is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a,
                                                   Eigen::EigenvaluesOnly);
  const Scalar lo = es.eigenvalues().minCoeff();
  const Scalar hi = es.eigenvalues().maxCoeff();
  if (!(lo > Scalar(0)))
    throw DegenerateProblemError("cost " + std::to_string(which) +
                                 ": quadratic term is not positive definite");
  return {lo, hi};
}

}  // namespace detail

/// Chain-consensus problem: m subsystems, shared dimension n, chained
/// consensus constraints.  Validates the cost data on construction and
/// caches the derived constants and Cholesky factors used by the local
/// solvers.
template <typename Scalar = double>
class ConsensusProblem {
 public:
  ConsensusProblem(std::vector<QuadraticCost<Scalar>> costs,
                   ConstraintSet<Scalar> constraint)
      : costs_(std::move(costs)), constraint_(constraint) {
    if (costs_.size() < 2)
      throw InvalidDimensionsError(
          "consensus requires at least two subsystems (m >= 2)");
    m_ = static_cast<Index>(costs_.size());
    n_ = costs_.front().matrix.rows();
    if (n_ < 1) throw InvalidDimensionsError("dimension must be positive (n >= 1)");
    if (m_ > 64 || n_ > 64)
      std::cerr << "warning: consensus problem of size m=" << m_ << ", n=" << n_
                << " exceeds the desk-scale envelope (m <= 64, n <= 64); "
                   "dense solves may be slow\n";
    mu_ = std::numeric_limits<Scalar>::infinity();
    L_ = Scalar(0);
    llts_.reserve(costs_.size());
    diagonal_.reserve(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      auto [lo, hi] =
          detail::validate_cost(costs_[i], n_, static_cast<Index>(i));
      mu_ = std::min(mu_, Scalar(2) * lo);
      L_ = std::max(L_, Scalar(2) * hi);
      llts_.emplace_back(costs_[i].matrix);
      diagonal_.push_back(costs_[i].matrix.isDiagonal(Scalar(0)));
    }
    hash_ = compute_hash();
  }

  Index subsystem_count() const { return m_; }
  Index dimension() const { return n_; }
  Index primal_dimension() const { return m_ * n_; }
  Index dual_dimension() const { return (m_ - 1) * n_; }

  const QuadraticCost<Scalar>& cost(Index i) const {
    return costs_[static_cast<std::size_t>(i)];
  }
  const ConstraintSet<Scalar>& constraint() const { return constraint_; }

  /// mu = min_i 2 lambda_min(A_i): strong convexity of the separable cost.
  Scalar strong_convexity() const { return mu_; }
  /// L = max_i 2 lambda_max(A_i): smoothness of the separable cost.
  Scalar smoothness() const { return L_; }

  bool cost_is_diagonal(Index i) const {
    return diagonal_[static_cast<std::size_t>(i)];
  }

  /// argmin_{y in Y} f_i(y) + tilt' y.  Closed form: unconstrained blocks
  /// solve 2 A_i y = -(q_i + tilt); boxes additionally require a diagonal
  /// quadratic term so the minimization clamps coordinatewise.
  Vector<Scalar> local_minimizer(Index i, const Vector<Scalar>& tilt) const {
    const auto& c = cost(i);
    if (constraint_.kind == ConstraintKind::Unconstrained) {
      Vector<Scalar> rhs = Scalar(-0.5) * (c.offset + tilt);
      return llts_[static_cast<std::size_t>(i)].solve(rhs);
    }
    if (!cost_is_diagonal(i))
      throw UnsupportedSubproblemError(
          "box-constrained local subproblem requires a diagonal quadratic "
          "term");
    const Scalar a = constraint_.half_width;
    Vector<Scalar> y(n_);
    for (Index j = 0; j < n_; ++j) {
      const Scalar u = -(c.offset(j) + tilt(j)) / (Scalar(2) * c.matrix(j, j));
      y(j) = std::clamp(u, -a, a);
    }
    return y;
  }

  /// Content hash over sizes, constraint, and cost coefficients.  Used to
  /// detect cross-problem mixups and to label emitted artifacts.
  std::uint64_t hash() const { return hash_; }

 private:
  std::uint64_t compute_hash() const {
    std::uint64_t h = detail::kFnvOffset;
    detail::hash_scalar(h, static_cast<std::int64_t>(m_));
    detail::hash_scalar(h, static_cast<std::int64_t>(n_));
    detail::hash_scalar(h, static_cast<std::int32_t>(constraint_.kind));
    detail::hash_scalar(h, constraint_.half_width);
    for (const auto& c : costs_) {
      detail::hash_matrix(h, c.matrix);
      for (Index j = 0; j < c.offset.size(); ++j)
        detail::hash_scalar(h, c.offset(j));
    }
    return h;
  }

  std::vector<QuadraticCost<Scalar>> costs_;
  ConstraintSet<Scalar> constraint_;
  Index m_ = 0;
  Index n_ = 0;
  Scalar mu_ = 0;
  Scalar L_ = 0;
  std::vector<Eigen::LLT<Matrix<Scalar>>> llts_;
  std::vector<bool> diagonal_;
  std::uint64_t hash_ = 0;
};

/// Coupling matrix of the chain constraints y_i = y_{i+1}: (m-1)n x mn,
/// block row i carrying [I_n, -I_n] at block columns (i, i+1).
template <typename Scalar = double>
Matrix<Scalar> build_coupling_matrix(Index m, Index n) {
  if (m < 2)
    throw InvalidDimensionsError(
        "coupling requires at least two subsystems (m >= 2)");
  if (n < 1)
    throw InvalidDimensionsError("coupling requires a positive dimension (n >= 1)");
  Matrix<Scalar> a = Matrix<Scalar>::Zero((m - 1) * n, m * n);
  for (Index i = 0; i < m - 1; ++i) {
    a.block(i * n, i * n, n, n).setIdentity();
    a.block(i * n, (i + 1) * n, n, n) = -Matrix<Scalar>::Identity(n, n);
  }
  return a;
}

/// Eigenvalues of A A' for the n = 1 chain, in ascending order:
/// 2 - 2 cos(j pi / m), j = 1..m-1.  For n > 1 the spectrum is this list
/// repeated n times (Kronecker structure of the blocks).
template <typename Scalar = double>
Vector<Scalar> coupling_spectrum(Index m) {
  if (m < 2)
    throw InvalidDimensionsError(
        "coupling requires at least two subsystems (m >= 2)");
  Vector<Scalar> ev(m - 1);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (Index j = 1; j < m; ++j)
    ev(j - 1) = Scalar(2) - Scalar(2) * std::cos(Scalar(j) * pi / Scalar(m));
  return ev;
}

/// Smoothness constant of the negated dual function:
/// L_h = lambda_max(A A') / mu = (2 + 2 cos(pi/m)) / mu.
template <typename Scalar>
Scalar dual_lipschitz_constant(const ConsensusProblem<Scalar>& problem) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar lam_max =
      Scalar(2) + Scalar(2) * std::cos(pi / Scalar(problem.subsystem_count()));
  return lam_max / problem.strong_convexity();
}

/// Strong-convexity constant of the negated dual function:
/// mu_h = lambda_min(A A') / L = (2 - 2 cos(pi/m)) / L.  Only valid when the
/// decision space is all of R^n; under box constraints the dual loses strong
/// convexity and the constant does not exist.
template <typename Scalar>
Scalar dual_strong_convexity_constant(const ConsensusProblem<Scalar>& problem) {
  if (problem.constraint().kind != ConstraintKind::Unconstrained)
    throw ConstantUnavailableError(
        "dual strong convexity constant exists only for unconstrained "
        "decision spaces");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar lam_min =
      Scalar(2) - Scalar(2) * std::cos(pi / Scalar(problem.subsystem_count()));
  return lam_min / problem.smoothness();
}

/// Consensus over several overlapping nets.  Net j carries a shared variable
/// of dimension n_j and an ordered member list; the k-th member holds the
/// k-th private copy, and copies are chained per net exactly as in the
/// single-net problem.  Subsystem costs act on the concatenation of that
/// subsystem's copies, ordered by net index.
template <typename Scalar = double>
class GeneralConsensusProblem {
 public:
  GeneralConsensusProblem(std::vector<Index> net_dims,
                          std::vector<std::vector<Index>> memberships,
                          std::vector<QuadraticCost<Scalar>> costs)
      : net_dims_(std::move(net_dims)),
        memberships_(std::move(memberships)),
        costs_(std::move(costs)) {
    if (net_dims_.empty()) throw InvalidTopologyError("at least one net required");
    if (net_dims_.size() != memberships_.size())
      throw InvalidTopologyError("one membership list required per net");
    if (costs_.empty()) throw InvalidTopologyError("at least one subsystem required");
    const Index subsystems = static_cast<Index>(costs_.size());
    copies_.resize(costs_.size());
    Index col = 0;
    Index row = 0;
    copy_offsets_.resize(memberships_.size());
    dual_offsets_.resize(memberships_.size());
    for (std::size_t j = 0; j < memberships_.size(); ++j) {
      const Index nj = net_dims_[j];
      if (nj < 1) throw InvalidTopologyError("net dimensions must be positive");
      const auto& members = memberships_[j];
      if (members.empty())
        throw InvalidTopologyError("net " + std::to_string(j) +
                                   " has no members");
      std::vector<Index> seen;
      copy_offsets_[j].reserve(members.size());
      for (std::size_t k = 0; k < members.size(); ++k) {
        const Index i = members[k];
        if (i < 0 || i >= subsystems)
          throw InvalidTopologyError("net " + std::to_string(j) +
                                     " references unknown subsystem " +
                                     std::to_string(i));
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
          throw InvalidTopologyError("net " + std::to_string(j) +
                                     " lists subsystem " + std::to_string(i) +
                                     " twice");
        seen.push_back(i);
        copies_[static_cast<std::size_t>(i)].push_back(
            {static_cast<Index>(j), static_cast<Index>(k)});
        copy_offsets_[j].push_back(col);
        col += nj;
      }
      dual_offsets_[j] = row;
      row += nj * (static_cast<Index>(members.size()) - 1);
    }
    stacked_dim_ = col;
    dual_dim_ = row;
    mu_ = std::numeric_limits<Scalar>::infinity();
    L_ = Scalar(0);
    llts_.reserve(costs_.size());
    for (std::size_t i = 0; i < costs_.size(); ++i) {
      if (copies_[i].empty())
        throw InvalidTopologyError("subsystem " + std::to_string(i) +
                                   " belongs to no net");
      Index di = 0;
      for (const auto& [j, k] : copies_[i]) di += net_dims_[static_cast<std::size_t>(j)];
      auto [lo, hi] = detail::validate_cost(costs_[i], di, static_cast<Index>(i));
      mu_ = std::min(mu_, Scalar(2) * lo);
      L_ = std::max(L_, Scalar(2) * hi);
      llts_.emplace_back(costs_[i].matrix);
    }
    hash_ = compute_hash();
  }

  Index net_count() const { return static_cast<Index>(net_dims_.size()); }
  Index subsystem_count() const { return static_cast<Index>(costs_.size()); }
  Index net_dim(Index j) const { return net_dims_[static_cast<std::size_t>(j)]; }
  const std::vector<Index>& members(Index j) const {
    return memberships_[static_cast<std::size_t>(j)];
  }
  Index member_count(Index j) const {
    return static_cast<Index>(memberships_[static_cast<std::size_t>(j)].size());
  }

  /// Total length of the stacked copy vector (sum over nets of n_j m_j).
  Index stacked_dimension() const { return stacked_dim_; }
  /// Total length of the stacked multiplier vector (sum of n_j (m_j - 1)).
  Index dual_dimension() const { return dual_dim_; }

  /// Column offset of copy k of net j inside the stacked vector.
  Index copy_offset(Index j, Index k) const {
    return copy_offsets_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
  }
  /// Row offset of net j's multiplier block inside the stacked multipliers.
  Index dual_offset(Index j) const {
    return dual_offsets_[static_cast<std::size_t>(j)];
  }
  /// The (net, member position) pairs of subsystem i, in net-index order;
  /// this order also fixes the layout of the subsystem's concatenated
  /// decision variable.
  const std::vector<std::pair<Index, Index>>& copies_of(Index i) const {
    return copies_[static_cast<std::size_t>(i)];
  }

  const QuadraticCost<Scalar>& cost(Index i) const {
    return costs_[static_cast<std::size_t>(i)];
  }

  Scalar strong_convexity() const { return mu_; }
  Scalar smoothness() const { return L_; }

  /// Unconstrained local solve over the subsystem's concatenated copies.
  Vector<Scalar> local_minimizer(Index i, const Vector<Scalar>& tilt) const {
    const auto& c = cost(i);
    Vector<Scalar> rhs = Scalar(-0.5) * (c.offset + tilt);
    return llts_[static_cast<std::size_t>(i)].solve(rhs);
  }

  std::uint64_t hash() const { return hash_; }

 private:
  std::uint64_t compute_hash() const {
    std::uint64_t h = detail::kFnvOffset;
    detail::hash_scalar(h, static_cast<std::int64_t>(net_dims_.size()));
    for (Index d : net_dims_) detail::hash_scalar(h, static_cast<std::int64_t>(d));
    for (const auto& members : memberships_) {
      detail::hash_scalar(h, static_cast<std::int64_t>(members.size()));
      for (Index i : members) detail::hash_scalar(h, static_cast<std::int64_t>(i));
    }
    for (const auto& c : costs_) {
      detail::hash_matrix(h, c.matrix);
      for (Index j = 0; j < c.offset.size(); ++j)
        detail::hash_scalar(h, c.offset(j));
    }
    return h;
  }

  std::vector<Index> net_dims_;
  std::vector<std::vector<Index>> memberships_;
  std::vector<QuadraticCost<Scalar>> costs_;
  std::vector<std::vector<std::pair<Index, Index>>> copies_;
  std::vector<std::vector<Index>> copy_offsets_;
  std::vector<Index> dual_offsets_;
  Index stacked_dim_ = 0;
  Index dual_dim_ = 0;
  Scalar mu_ = 0;
  Scalar L_ = 0;
  std::vector<Eigen::LLT<Matrix<Scalar>>> llts_;
  std::uint64_t hash_ = 0;
};

/// Block-diagonal coupling over all nets: one chain block per net, in net
/// order.  Nets with a single member contribute no rows.  A single net
/// containing every subsystem reproduces build_coupling_matrix exactly.
template <typename Scalar>
Matrix<Scalar> build_general_coupling(const GeneralConsensusProblem<Scalar>& gp) {
  Matrix<Scalar> a =
      Matrix<Scalar>::Zero(gp.dual_dimension(), gp.stacked_dimension());
  for (Index j = 0; j < gp.net_count(); ++j) {
    const Index nj = gp.net_dim(j);
    const Index mj = gp.member_count(j);
    const Index row0 = gp.dual_offset(j);
    for (Index k = 0; k < mj - 1; ++k) {
      a.block(row0 + k * nj, gp.copy_offset(j, k), nj, nj).setIdentity();
      a.block(row0 + k * nj, gp.copy_offset(j, k + 1), nj, nj) =
          -Matrix<Scalar>::Identity(nj, nj);
    }
  }
  return a;
}

namespace detail {

/// Extreme Gram eigenvalues over the coupled nets (those with >= 2 members).
template <typename Scalar>
std::pair<Scalar, Scalar> general_gram_extremes(
    const GeneralConsensusProblem<Scalar>& gp) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = Scalar(0);
  bool any = false;
  for (Index j = 0; j < gp.net_count(); ++j) {
    const Index mj = gp.member_count(j);
    if (mj < 2) continue;
    any = true;
    lo = std::min(lo, Scalar(2) - Scalar(2) * std::cos(pi / Scalar(mj)));
    hi = std::max(hi, Scalar(2) + Scalar(2) * std::cos(pi / Scalar(mj)));
  }
  if (!any)
    throw ConstantUnavailableError(
        "no net couples two or more subsystems; the dual space is empty");
  return {lo, hi};
}

}  // namespace detail

/// L_h for the multi-net dual: max_j lambda_max(A_j A_j') / mu.
template <typename Scalar>
Scalar general_dual_lipschitz_constant(const GeneralConsensusProblem<Scalar>& gp) {
  return detail::general_gram_extremes(gp).second / gp.strong_convexity();
}

/// mu_h for the multi-net dual: min_j lambda_min(A_j A_j') / L.
template <typename Scalar>
Scalar general_dual_strong_convexity_constant(
    const GeneralConsensusProblem<Scalar>& gp) {
  return detail::general_gram_extremes(gp).first / gp.smoothness();
}

}  // namespace dualdec
