#include "harness/presets.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include <dualdec/errors.hpp>
#include <dualdec/rng.hpp>

namespace dualdec::harness {

namespace {

QuadraticCost<double> scalar_cost(double a, double q) {
  QuadraticCost<double> c;
  c.matrix = Matrix<double>::Constant(1, 1, a);
  c.offset = Vector<double>::Constant(1, q);
  return c;
}

/// Five random scalar subsystems: curvatures from [0.5, 2], linear terms
/// from [-4, 4], drawn from per-subsystem substreams of the seed.
std::vector<QuadraticCost<double>> five_scalar_costs(std::uint64_t seed) {
  std::vector<QuadraticCost<double>> costs;
  for (std::uint64_t i = 0; i < 5; ++i) {
    SplitMix64 rng(derive_stream(seed, i, 0));
    const double a = rng.uniform(0.5, 2.0);
    const double q = rng.uniform(-4.0, 4.0);
    costs.push_back(scalar_cost(a, q));
  }
  return costs;
}

/// 2x2 positive-definite cost with eigenvalues in [0.5, 2] from a rotation.
QuadraticCost<double> rotated_cost(SplitMix64& rng) {
  const double e1 = rng.uniform(0.5, 2.0);
  const double e2 = rng.uniform(0.5, 2.0);
  const double t = rng.uniform(0.0, 2.0 * EIGEN_PI);
  Matrix<double> v(2, 2);
  v << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Matrix<double> d = Matrix<double>::Zero(2, 2);
  d(0, 0) = e1;
  d(1, 1) = e2;
  QuadraticCost<double> c;
  c.matrix = v * d * v.transpose();
  c.matrix = ((c.matrix + c.matrix.transpose()) / 2.0).eval();
  c.offset = Vector<double>(2);
  c.offset << rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0);
  return c;
}

}  // namespace

std::uint64_t default_seed(const std::string& preset_name) {
  if (preset_name == "case1-quantizer") return 1;
  if (preset_name == "case2-noise") return 73;
  if (preset_name == "general-nets-demo") return 5;
  throw ConfigError("field 'preset': unknown preset '" + preset_name + "'");
}

Preset make_preset(const std::string& name, std::uint64_t seed, int bits,
                   double sigma) {
  Preset p;
  p.name = name;
  p.seed = seed;
  if (name == "case1-quantizer") {
    p.chain = ConsensusProblem<double>(five_scalar_costs(seed),
                                       ConstraintSet<double>::symmetric_box(3.0));
    p.default_algorithm = "full";
    p.default_metric = "running_min_grad";
    p.default_model = DistortionModel<double>::uniform_quantizer(3.0, bits);
  } else if (name == "case2-noise") {
    p.chain = ConsensusProblem<double>(five_scalar_costs(seed),
                                       ConstraintSet<double>::unconstrained());
    p.default_algorithm = "partial";
    p.default_metric = "dual_gap";
    p.default_model = DistortionModel<double>::bounded_noise(
        sigma, derive_stream(seed, 99, 0));
  } else if (name == "general-nets-demo") {
    SplitMix64 rng(derive_stream(seed, 7, 0));
    std::vector<QuadraticCost<double>> costs;
    costs.push_back(scalar_cost(rng.uniform(0.5, 2.0), rng.uniform(-4.0, 4.0)));
    costs.push_back(rotated_cost(rng));
    costs.push_back(rotated_cost(rng));
    costs.push_back(scalar_cost(rng.uniform(0.5, 2.0), rng.uniform(-4.0, 4.0)));
    costs.push_back(scalar_cost(rng.uniform(0.5, 2.0), rng.uniform(-4.0, 4.0)));
    p.general = GeneralConsensusProblem<double>(
        {1, 1, 1}, {{0, 1}, {1, 2}, {2, 3, 4}}, std::move(costs));
    p.default_algorithm = "exact";
    p.default_metric = "grad_norm";
    p.default_model = DistortionModel<double>::none();
    p.default_steps = 5000;
  } else {
    throw ConfigError("field 'preset': unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace dualdec::harness
