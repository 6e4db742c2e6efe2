#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <dualdec/problem.hpp>

#include "support/oracles.hpp"

using dualdec::build_coupling_matrix;
using dualdec::build_general_coupling;
using dualdec::ConsensusProblem;
using dualdec::ConstraintSet;
using dualdec::coupling_spectrum;
using dualdec::dual_lipschitz_constant;
using dualdec::dual_strong_convexity_constant;
using dualdec::GeneralConsensusProblem;
using dualdec::Index;
using dualdec::QuadraticCost;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

QuadraticCost<double> scalar_cost(double a, double q) {
  QuadraticCost<double> c;
  c.matrix = MatrixXd::Constant(1, 1, a);
  c.offset = VectorXd::Constant(1, q);
  return c;
}

ConsensusProblem<double> uniform_scalar_problem(int m, double a,
                                                ConstraintSet<double> cs) {
  std::vector<QuadraticCost<double>> costs;
  for (int i = 0; i < m; ++i) costs.push_back(scalar_cost(a, 0.0));
  return ConsensusProblem<double>(std::move(costs), cs);
}

}  // namespace

TEST_CASE("coupling matrix: frozen small cases") {
  MatrixXd a31 = build_coupling_matrix(3, 1);
  MatrixXd expect31(2, 3);
  expect31 << 1, -1, 0, 0, 1, -1;
  CHECK(a31 == expect31);

  MatrixXd a22 = build_coupling_matrix(2, 2);
  MatrixXd expect22(2, 4);
  expect22 << 1, 0, -1, 0, 0, 1, 0, -1;
  CHECK(a22 == expect22);
}

TEST_CASE("coupling matrix: invalid shapes rejected") {
  CHECK_THROWS_AS(build_coupling_matrix(1, 1), dualdec::InvalidDimensionsError);
  CHECK_THROWS_AS(build_coupling_matrix(0, 1), dualdec::InvalidDimensionsError);
  CHECK_THROWS_AS(build_coupling_matrix(3, 0), dualdec::InvalidDimensionsError);
}

TEST_CASE("coupling matrix: consensus vectors lie in the null space") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int m : {2, 3, 5, 8, 13, 20}) {
    for (int n : {1, 2, 5, 8}) {
      MatrixXd a = build_coupling_matrix(m, n);
      VectorXd z(n);
      for (int j = 0; j < n; ++j) z(j) = gauss(rng);
      VectorXd y(m * n);
      for (int i = 0; i < m; ++i) y.segment(i * n, n) = z;
      // identical blocks difference to exactly zero
      CHECK((a * y).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
}

TEST_CASE("coupling spectrum: frozen values and eigensolver oracle") {
  VectorXd s2 = coupling_spectrum(2);
  REQUIRE(s2.size() == 1);
  CHECK(s2(0) == doctest::Approx(2.0).epsilon(1e-14));

  // m = 3: oracle eigensolve of the independently assembled Gram matrix
  // [[2, -1], [-1, 2]] gives {1, 3}.
  VectorXd s3 = coupling_spectrum(3);
  VectorXd oracle3 = oracles::dense_eigenvalues(oracles::chain_gram(3));
  REQUIRE(s3.size() == 2);
  CHECK(std::abs(s3(0) - 1.0) < 1e-12);
  CHECK(std::abs(s3(1) - 3.0) < 1e-12);
  CHECK((s3 - oracle3).lpNorm<Eigen::Infinity>() < 1e-12);

  VectorXd s5 = coupling_spectrum(5);
  CHECK(s5(s5.size() - 1) == doctest::Approx(3.6180339887498949).epsilon(1e-12));

  for (int m = 2; m <= 20; ++m) {
    VectorXd s = coupling_spectrum(m);
    VectorXd oracle = oracles::dense_eigenvalues(oracles::chain_gram(m));
    REQUIRE(s.size() == m - 1);
    CHECK((s - oracle).lpNorm<Eigen::Infinity>() < 1e-10);
    for (Index j = 0; j + 1 < s.size(); ++j) CHECK(s(j) < s(j + 1));
  }
}

TEST_CASE("coupling spectrum: Kronecker lift for n > 1") {
  const int m = 4, n = 3;
  MatrixXd a = build_coupling_matrix(m, n);
  VectorXd got = oracles::dense_eigenvalues(a * a.transpose());
  VectorXd base = coupling_spectrum(m);
  std::vector<double> lifted;
  for (Index j = 0; j < base.size(); ++j)
    for (int r = 0; r < n; ++r) lifted.push_back(base(j));
  std::sort(lifted.begin(), lifted.end());
  REQUIRE(got.size() == static_cast<Index>(lifted.size()));
  for (Index j = 0; j < got.size(); ++j)
    CHECK(std::abs(got(j) - lifted[static_cast<std::size_t>(j)]) < 1e-10);
}

TEST_CASE("dual constants: frozen values") {
  // uniform scalar costs a = 1 give mu = L = 2
  auto p2 = uniform_scalar_problem(2, 1.0, ConstraintSet<double>::unconstrained());
  CHECK(dual_lipschitz_constant(p2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dual_strong_convexity_constant(p2) == doctest::Approx(1.0).epsilon(1e-14));

  auto p5 = uniform_scalar_problem(5, 1.0, ConstraintSet<double>::unconstrained());
  CHECK(dual_lipschitz_constant(p5) ==
        doctest::Approx(1.8090169943749475).epsilon(1e-12));
  CHECK(dual_strong_convexity_constant(p5) ==
        doctest::Approx(0.19098300562505255).epsilon(1e-12));
}

TEST_CASE("dual constants: eigen identities for m = 2..20") {
  for (int m = 2; m <= 20; ++m) {
    auto p = uniform_scalar_problem(m, 1.0, ConstraintSet<double>::unconstrained());
    VectorXd oracle = oracles::dense_eigenvalues(oracles::chain_gram(m));
    const double lh = dual_lipschitz_constant(p);
    const double mh = dual_strong_convexity_constant(p);
    CHECK(std::abs(lh * p.strong_convexity() - oracle(oracle.size() - 1)) < 1e-10);
    CHECK(std::abs(mh * p.smoothness() - oracle(0)) < 1e-10);
    CHECK(mh <= lh);
  }
}

TEST_CASE("dual constants: mu_h unavailable under box constraints") {
  auto p = uniform_scalar_problem(5, 1.0, ConstraintSet<double>::symmetric_box(3.0));
  CHECK_THROWS_AS(dual_strong_convexity_constant(p),
                  dualdec::ConstantUnavailableError);
  CHECK(dual_lipschitz_constant(p) > 0.0);  // L_h exists regardless
}

TEST_CASE("dual constants: mu_h <= L_h on random instances") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    auto p = oracles::random_problem(2 + static_cast<int>(rng() % 7),
                                     1 + static_cast<int>(rng() % 4),
                                     ConstraintSet<double>::unconstrained(), rng);
    CHECK(dual_strong_convexity_constant(p) <= dual_lipschitz_constant(p));
  }
}

TEST_CASE("problem validation: rejects bad cost data") {
  // asymmetric quadratic term
  {
    QuadraticCost<double> bad;
    bad.matrix = MatrixXd(2, 2);
    bad.matrix << 1.0, 0.5, 0.2, 1.0;
    bad.offset = VectorXd::Zero(2);
    QuadraticCost<double> good;
    good.matrix = MatrixXd::Identity(2, 2);
    good.offset = VectorXd::Zero(2);
    CHECK_THROWS_AS(ConsensusProblem<double>({bad, good},
                                             ConstraintSet<double>::unconstrained()),
                    dualdec::DegenerateProblemError);
  }
  // indefinite quadratic term
  {
    QuadraticCost<double> bad;
    bad.matrix = MatrixXd(2, 2);
    bad.matrix << 1.0, 0.0, 0.0, -0.5;
    bad.offset = VectorXd::Zero(2);
    QuadraticCost<double> good;
    good.matrix = MatrixXd::Identity(2, 2);
    good.offset = VectorXd::Zero(2);
    CHECK_THROWS_AS(ConsensusProblem<double>({bad, good},
                                             ConstraintSet<double>::unconstrained()),
                    dualdec::DegenerateProblemError);
  }
  // mismatched block dimensions
  {
    QuadraticCost<double> a = scalar_cost(1.0, 0.0);
    QuadraticCost<double> b;
    b.matrix = MatrixXd::Identity(2, 2);
    b.offset = VectorXd::Zero(2);
    CHECK_THROWS_AS(ConsensusProblem<double>({a, b},
                                             ConstraintSet<double>::unconstrained()),
                    dualdec::InvalidDimensionsError);
  }
  // single subsystem is not a consensus problem
  CHECK_THROWS_AS(ConsensusProblem<double>({scalar_cost(1.0, 0.0)},
                                           ConstraintSet<double>::unconstrained()),
                  dualdec::InvalidDimensionsError);
}

TEST_CASE("problem validation: near-symmetric within tolerance accepted") {
  QuadraticCost<double> c;
  c.matrix = MatrixXd(2, 2);
  c.matrix << 1.0, 0.25, 0.25 + 1e-14, 1.0;
  c.offset = VectorXd::Zero(2);
  QuadraticCost<double> d;
  d.matrix = MatrixXd::Identity(2, 2);
  d.offset = VectorXd::Zero(2);
  CHECK_NOTHROW(ConsensusProblem<double>({c, d},
                                         ConstraintSet<double>::unconstrained()));
}

TEST_CASE("problem constants derive from the data") {
  std::vector<QuadraticCost<double>> costs{scalar_cost(0.75, 1.0),
                                           scalar_cost(2.0, -1.0),
                                           scalar_cost(1.25, 0.0)};
  ConsensusProblem<double> p(std::move(costs),
                             ConstraintSet<double>::unconstrained());
  CHECK(p.strong_convexity() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(p.smoothness() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(p.subsystem_count() == 3);
  CHECK(p.dimension() == 1);
  CHECK(p.dual_dimension() == 2);
}

TEST_CASE("problem hash: sensitive to content, stable under copies") {
  std::mt19937_64 rng(7);
  auto p = oracles::random_problem(4, 2, ConstraintSet<double>::unconstrained(), rng);
  auto q = p;  // copy
  CHECK(p.hash() == q.hash());
  std::mt19937_64 rng2(8);
  auto r = oracles::random_problem(4, 2, ConstraintSet<double>::unconstrained(), rng2);
  CHECK(p.hash() != r.hash());
}

TEST_CASE("general coupling: three-net demo layout") {
  // Three nets over five subsystems: net 0 couples {0, 1}, net 1 couples
  // {1, 2}, net 2 couples {2, 3, 4}; every net carries a scalar variable.
  std::vector<QuadraticCost<double>> costs;
  costs.push_back(scalar_cost(1.0, 0.0));  // subsystem 0: one copy (net 0)
  {
    QuadraticCost<double> c;  // subsystem 1: copies of nets 0, 1
    c.matrix = MatrixXd::Identity(2, 2);
    c.offset = VectorXd::Zero(2);
    costs.push_back(c);
    costs.push_back(c);  // subsystem 2: copies of nets 1, 2
  }
  costs.push_back(scalar_cost(1.0, 0.0));  // subsystem 3: net 2
  costs.push_back(scalar_cost(1.0, 0.0));  // subsystem 4: net 2
  GeneralConsensusProblem<double> gp({1, 1, 1}, {{0, 1}, {1, 2}, {2, 3, 4}},
                                     std::move(costs));
  CHECK(gp.stacked_dimension() == 7);
  CHECK(gp.dual_dimension() == 4);
  MatrixXd a = build_general_coupling(gp);
  MatrixXd expect = MatrixXd::Zero(4, 7);
  expect(0, 0) = 1;
  expect(0, 1) = -1;
  expect(1, 2) = 1;
  expect(1, 3) = -1;
  expect(2, 4) = 1;
  expect(2, 5) = -1;
  expect(3, 5) = 1;
  expect(3, 6) = -1;
  CHECK(a == expect);

  // Constants against the per-net Gram oracle: blocks have 2, 2, 3 members.
  double lam_max = 0.0, lam_min = std::numeric_limits<double>::infinity();
  for (int mj : {2, 2, 3}) {
    VectorXd ev = oracles::dense_eigenvalues(oracles::chain_gram(mj));
    lam_max = std::max(lam_max, ev(ev.size() - 1));
    lam_min = std::min(lam_min, ev(0));
  }
  CHECK(lam_max == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(lam_min == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(general_dual_lipschitz_constant(gp) * gp.strong_convexity() -
                 lam_max) < 1e-10);
  CHECK(std::abs(general_dual_strong_convexity_constant(gp) * gp.smoothness() -
                 lam_min) < 1e-10);
}

TEST_CASE("general coupling: single-member nets contribute no rows") {
  QuadraticCost<double> c1 = scalar_cost(1.0, 0.0);
  QuadraticCost<double> c2;
  c2.matrix = MatrixXd::Identity(2, 2);
  c2.offset = VectorXd::Zero(2);
  // net 0 has subsystem 0 alone; net 1 couples subsystems 0 and 1
  GeneralConsensusProblem<double> gp({1, 1}, {{0}, {0, 1}}, {c2, c1});
  MatrixXd a = build_general_coupling(gp);
  REQUIRE(a.rows() == 1);
  REQUIRE(a.cols() == 3);
  MatrixXd expect(1, 3);
  expect << 0, 1, -1;
  CHECK(a == expect);
}

TEST_CASE("general coupling: one net over all subsystems degenerates to the chain") {
  const int m = 6, n = 2;
  std::vector<QuadraticCost<double>> costs;
  std::vector<Index> members;
  for (int i = 0; i < m; ++i) {
    QuadraticCost<double> c;
    c.matrix = MatrixXd::Identity(n, n);
    c.offset = VectorXd::Zero(n);
    costs.push_back(c);
    members.push_back(i);
  }
  GeneralConsensusProblem<double> gp({n}, {members}, std::move(costs));
  CHECK(build_general_coupling(gp) == build_coupling_matrix(m, n));
}

TEST_CASE("general topology validation") {
  QuadraticCost<double> c = scalar_cost(1.0, 0.0);
  // duplicate member within a net
  CHECK_THROWS_AS(GeneralConsensusProblem<double>({1}, {{0, 0}}, {c, c}),
                  dualdec::InvalidTopologyError);
  // unknown subsystem id
  CHECK_THROWS_AS(GeneralConsensusProblem<double>({1}, {{0, 5}}, {c, c}),
                  dualdec::InvalidTopologyError);
  // subsystem in no net
  CHECK_THROWS_AS(GeneralConsensusProblem<double>({1}, {{0}}, {c, c}),
                  dualdec::InvalidTopologyError);
  // cost dimension must match the sum of touched net dimensions
  CHECK_THROWS_AS(GeneralConsensusProblem<double>({1, 1}, {{0, 1}, {0, 1}},
                                                  {c, c}),
                  dualdec::InvalidDimensionsError);
  // empty membership list
  CHECK_THROWS_AS(GeneralConsensusProblem<double>({1, 1}, {{}, {0, 1}}, {c, c}),
                  dualdec::InvalidTopologyError);
  // no coupled net: constants unavailable
  GeneralConsensusProblem<double> lonely({1, 1}, {{0}, {1}}, {c, c});
  CHECK_THROWS_AS(general_dual_lipschitz_constant(lonely),
                  dualdec::ConstantUnavailableError);
}

TEST_CASE("scalar template parameter: float instantiation matches double") {
  auto af = build_coupling_matrix<float>(3, 2);
  auto ad = build_coupling_matrix<double>(3, 2);
  CHECK(af.cast<double>() == ad);
  auto sf = coupling_spectrum<float>(5);
  auto sd = coupling_spectrum<double>(5);
  CHECK((sf.cast<double>() - sd).lpNorm<Eigen::Infinity>() < 1e-6);
}
