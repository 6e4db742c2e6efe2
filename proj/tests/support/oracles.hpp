#pragma once

// Independent verification routes used by the test suites.  These
// deliberately avoid the library's closed forms: spectra come from a dense
// eigensolver on independently assembled matrices, gradients from central
// finite differences of the scalar dual value, and scalar minimizers from
// brute-force grid search.

#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <dualdec/problem.hpp>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Eigenvalues of a symmetric matrix, ascending.
inline VectorXd dense_eigenvalues(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// The Gram matrix A A' of the n = 1 chain coupling, assembled directly as
// the (2, -1) tridiagonal matrix of order m - 1 (row i: difference with
// neighbours), without going through the library's coupling builder.
inline MatrixXd chain_gram(int m) {
  MatrixXd g = MatrixXd::Zero(m - 1, m - 1);
  for (int i = 0; i < m - 1; ++i) {
    g(i, i) = 2.0;
    if (i > 0) g(i, i - 1) = -1.0;
    if (i + 1 < m - 1) g(i, i + 1) = -1.0;
  }
  return g;
}

// Central finite-difference gradient of a scalar function.
inline VectorXd finite_difference_gradient(
    const std::function<double(const VectorXd&)>& f, const VectorXd& x,
    double h = 1e-5) {
  VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Brute-force scalar minimizer over [lo, hi] with the given step.  The grid
// is indexed (not accumulated) so the endpoint hi is always sampled.
inline double grid_search_min(const std::function<double(double)>& f, double lo,
                              double hi, double step) {
  const long count = std::lround((hi - lo) / step);
  double best_x = lo;
  double best_v = f(lo);
  for (long i = 1; i <= count; ++i) {
    const double x = (i == count) ? hi : lo + static_cast<double>(i) * step;
    const double v = f(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  return best_x;
}

// Brute-force scalar maximum value over [lo, hi] with the given step.
inline double grid_search_max_value(const std::function<double(double)>& f,
                                    double lo, double hi, double step) {
  const long count = std::lround((hi - lo) / step);
  double best_v = f(lo);
  for (long i = 1; i <= count; ++i) {
    const double x = (i == count) ? hi : lo + static_cast<double>(i) * step;
    best_v = std::max(best_v, f(x));
  }
  return best_v;
}

// Random symmetric positive definite matrix with eigenvalues in
// [ev_lo, ev_hi], built from a random orthogonal basis.
inline MatrixXd random_spd(int n, std::mt19937_64& rng, double ev_lo = 0.5,
                           double ev_hi = 3.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd raw(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) raw(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(raw);
  MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> ev(ev_lo, ev_hi);
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = ev(rng);
  MatrixXd a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());  // kill roundoff asymmetry
}

// Random chain-consensus problem with the given shape.
inline dualdec::ConsensusProblem<double> random_problem(
    int m, int n, const dualdec::ConstraintSet<double>& constraint,
    std::mt19937_64& rng, bool diagonal_costs = false) {
  std::uniform_real_distribution<double> lin(-4.0, 4.0);
  std::uniform_real_distribution<double> diag(0.5, 2.0);
  std::vector<dualdec::QuadraticCost<double>> costs;
  costs.reserve(m);
  for (int i = 0; i < m; ++i) {
    dualdec::QuadraticCost<double> c;
    if (diagonal_costs || n == 1) {
      VectorXd d(n);
      for (int j = 0; j < n; ++j) d(j) = diag(rng);
      c.matrix = d.asDiagonal();
    } else {
      c.matrix = random_spd(n, rng);
    }
    c.offset = VectorXd(n);
    for (int j = 0; j < n; ++j) c.offset(j) = lin(rng);
    costs.push_back(std::move(c));
  }
  return dualdec::ConsensusProblem<double>(std::move(costs), constraint);
}

}  // namespace oracles
