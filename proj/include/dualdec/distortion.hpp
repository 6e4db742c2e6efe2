#pragma once

/// Additive bounded distortions on transmitted subsystem values.
///
/// A distortion model maps a value y_i to a received value
/// y_hat_i = y_i + r_i with a certified per-node bound ||r_i|| <= eps_i.
/// Because the dual update consumes pairwise differences of received
/// values, the aggregate gradient error obeys
///
///     || d_hat - d || <= eps = sqrt( sum_{i=1}^{m-1} (eps_i + eps_{i+1})^2 ),
///
/// which is the single scalar the convergence envelopes consume.
/// Stochastic models draw from substreams keyed by (seed, node, iteration),
/// so a run replays bit-identically and every node's transmission in a
/// round is distorted exactly once no matter how many neighbours hear it.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace dualdec {

enum class DistortionKind { None, UniformQuantizer, BoundedNoise, CustomBounded };

inline const char* distortion_kind_name(DistortionKind k) {
  switch (k) {
    case DistortionKind::None: return "none";
    case DistortionKind::UniformQuantizer: return "uniform-quantizer";
    case DistortionKind::BoundedNoise: return "bounded-noise";
    case DistortionKind::CustomBounded: return "custom-bounded";
  }
  return "unknown";
}

/// Tagged union of the supported distortion channels.
///
///  - None: identity channel.
///  - UniformQuantizer: midpoint quantizer over [-a, a]^n with 2^b cells per
///    coordinate; cells are half-open [lo, lo + t) except the top cell,
///    which closes at +a.  Deterministic, and idempotent on centroids.
///  - BoundedNoise: i.i.d. uniform noise in [-sigma, sigma] per coordinate.
///  - CustomBounded: caller-specified per-node bounds eps_i realized by a
///    named generator: "constant-offset" adds the worst-case constant shift
///    (eps_i / sqrt(n) on every coordinate, every iteration), "uniform"
///    draws coordinates uniformly from the ball-inscribed cube.
template <typename Scalar = double>
struct DistortionModel {
  DistortionKind kind = DistortionKind::None;
  Scalar half_width = Scalar(0);      ///< quantizer box half-width a
  int bits = 0;                       ///< quantizer resolution b
  Scalar per_dim_bound = Scalar(0);   ///< noise level sigma
  std::uint64_t seed = 0;             ///< stream seed (noise / custom-uniform)
  std::vector<Scalar> node_bounds;    ///< custom per-node bounds eps_i
  std::string generator;              ///< custom generator tag

  static DistortionModel none() { return {}; }

  static DistortionModel uniform_quantizer(Scalar a, int b) {
    if (!(a > Scalar(0)))
      throw InvalidDistortionModelError("quantizer half-width must be positive");
    if (b < 1 || b > 62)
      throw InvalidDistortionModelError("quantizer bit count must be in [1, 62]");
    DistortionModel m;
    m.kind = DistortionKind::UniformQuantizer;
    m.half_width = a;
    m.bits = b;
    return m;
  }

  static DistortionModel bounded_noise(Scalar sigma, std::uint64_t seed) {
    if (!(sigma >= Scalar(0)))
      throw InvalidDistortionModelError("noise level must be nonnegative");
    DistortionModel m;
    m.kind = DistortionKind::BoundedNoise;
    m.per_dim_bound = sigma;
    m.seed = seed;
    return m;
  }

  static DistortionModel custom_bounded(std::vector<Scalar> bounds,
                                        std::string generator,
                                        std::uint64_t seed = 0) {
    if (bounds.empty())
      throw InvalidDistortionModelError("custom model needs per-node bounds");
    for (Scalar b : bounds)
      if (!(b >= Scalar(0)))
        throw InvalidDistortionModelError("per-node bounds must be nonnegative");
    if (generator != "constant-offset" && generator != "uniform")
      throw InvalidDistortionModelError("unknown custom generator '" + generator +
                                        "'");
    DistortionModel m;
    m.kind = DistortionKind::CustomBounded;
    m.node_bounds = std::move(bounds);
    m.generator = std::move(generator);
    m.seed = seed;
    return m;
  }
};

/// Certified bound on ||y_hat_i - y_i|| for node i (0-based) at dimension n.
template <typename Scalar>
Scalar per_node_bound(const DistortionModel<Scalar>& model, Index n,
                      Index node = 0) {
  const Scalar sqrt_n = std::sqrt(static_cast<Scalar>(n));
  switch (model.kind) {
    case DistortionKind::None:
      return Scalar(0);
    case DistortionKind::UniformQuantizer: {
      const Scalar t = Scalar(2) * model.half_width /
                       static_cast<Scalar>(std::uint64_t(1) << model.bits);
      return sqrt_n * t / Scalar(2);
    }
    case DistortionKind::BoundedNoise:
      return sqrt_n * model.per_dim_bound;
    case DistortionKind::CustomBounded: {
      if (node < 0 || node >= static_cast<Index>(model.node_bounds.size()))
        throw InvalidDimensionsError("custom model has no bound for this node");
      return model.node_bounds[static_cast<std::size_t>(node)];
    }
  }
  return Scalar(0);
}

/// Per-node bounds for all m nodes.
template <typename Scalar>
std::vector<Scalar> per_node_bounds(const DistortionModel<Scalar>& model, Index n,
                                    Index m) {
  if (model.kind == DistortionKind::CustomBounded &&
      static_cast<Index>(model.node_bounds.size()) != m)
    throw InvalidDimensionsError(
        "custom model bounds do not cover the subsystem count");
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) out.push_back(per_node_bound(model, n, i));
  return out;
}

/// Aggregate gradient-error bound from the per-node bounds.
template <typename Scalar>
Scalar total_bound(const std::vector<Scalar>& node_bounds) {
  if (node_bounds.size() < 2)
    throw InvalidDimensionsError("aggregate bound needs at least two nodes");
  Scalar s = Scalar(0);
  for (std::size_t i = 0; i + 1 < node_bounds.size(); ++i) {
    const Scalar pair = node_bounds[i] + node_bounds[i + 1];
    s += pair * pair;
  }
  return std::sqrt(s);
}

template <typename Scalar>
Scalar total_bound(const DistortionModel<Scalar>& model, Index n, Index m) {
  return total_bound(per_node_bounds(model, n, m));
}

/// Applies the channel to node `node`'s transmission in round `iteration`.
template <typename Scalar>
Vector<Scalar> distort(const Vector<Scalar>& y, Index node, Index iteration,
                       const DistortionModel<Scalar>& model) {
  const Index n = y.size();
  switch (model.kind) {
    case DistortionKind::None:
      return y;
    case DistortionKind::UniformQuantizer: {
      const Scalar a = model.half_width;
      const std::uint64_t cells = std::uint64_t(1) << model.bits;
      const Scalar t = Scalar(2) * a / static_cast<Scalar>(cells);
      Vector<Scalar> out(n);
      for (Index j = 0; j < n; ++j) {
        if (!(y(j) >= -a && y(j) <= a))
          throw OutOfDomainError("quantizer input outside [-a, a]");
        auto idx = static_cast<std::int64_t>(std::floor((y(j) + a) / t));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<std::int64_t>(cells))
          idx = static_cast<std::int64_t>(cells) - 1;  // +a joins the top cell
        out(j) = -a + (static_cast<Scalar>(idx) + Scalar(0.5)) * t;
      }
      return out;
    }
    case DistortionKind::BoundedNoise: {
      SplitMix64 rng(derive_stream(model.seed, static_cast<std::uint64_t>(node),
                                   static_cast<std::uint64_t>(iteration)));
      Vector<Scalar> out(n);
      for (Index j = 0; j < n; ++j)
        out(j) = y(j) + static_cast<Scalar>(
                            rng.uniform_symmetric(static_cast<double>(
                                model.per_dim_bound)));
      return out;
    }
    case DistortionKind::CustomBounded: {
      const Scalar eps = per_node_bound(model, n, node);
      const Scalar per_dim = eps / std::sqrt(static_cast<Scalar>(n));
      if (model.generator == "constant-offset")
        return y.array() + per_dim;
      SplitMix64 rng(derive_stream(model.seed, static_cast<std::uint64_t>(node),
                                   static_cast<std::uint64_t>(iteration)));
      Vector<Scalar> out(n);
      for (Index j = 0; j < n; ++j)
        out(j) = y(j) + static_cast<Scalar>(rng.uniform_symmetric(
                            static_cast<double>(per_dim)));
      return out;
    }
  }
  return y;
}

}  // namespace dualdec
