#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <dualdec/errors.hpp>
#include <dualdec/types.hpp>

namespace dualdec {

/// Families of admissible step-size schedules for the dual ascent.
enum class StepRuleKind { Constant, PowerDecay, ScaledPowerDecay, LogOverK };

/// A step-size rule gamma_k.  Rule-intrinsic ranges (positivity, exponent
/// ranges) are checked by the factories; the bounds that involve the dual
/// constants (gamma <= 1/L_h, c <= mu_h/L_h) are checked when the rule is
/// bound to a problem by StepSizeSchedule or step_size().
///
///   Constant:         gamma_k = gamma
///   PowerDecay:       gamma_k = gamma / (k+1)^p
///   ScaledPowerDecay: gamma_k = (c/mu_h) / (k+1)^p
///   LogOverK:         ScaledPowerDecay with p_k = ln(k)/k  (p_0 = p_1 = 1)
template <typename Scalar = double>
struct StepSizeRule {
  StepRuleKind kind = StepRuleKind::Constant;
  Scalar gamma = Scalar(0);  ///< Constant / PowerDecay base step
  Scalar c = Scalar(0);      ///< ScaledPowerDecay / LogOverK scale
  Scalar p = Scalar(0);      ///< decay exponent

  static StepSizeRule constant(Scalar gamma) {
    if (!(gamma > Scalar(0)))
      throw InvalidStepRuleError("constant step must be positive");
    StepSizeRule r;
    r.kind = StepRuleKind::Constant;
    r.gamma = gamma;
    return r;
  }

  static StepSizeRule power_decay(Scalar gamma, Scalar p) {
    if (!(gamma > Scalar(0)))
      throw InvalidStepRuleError("base step must be positive");
    if (!(p >= Scalar(0) && p <= Scalar(1)))
      throw InvalidStepRuleError("decay exponent must lie in [0, 1]");
    StepSizeRule r;
    r.kind = StepRuleKind::PowerDecay;
    r.gamma = gamma;
    r.p = p;
    return r;
  }

  static StepSizeRule scaled_power_decay(Scalar c, Scalar p) {
    if (!(c > Scalar(0)))
      throw InvalidStepRuleError("scale c must be positive");
    if (!(p > Scalar(0) && p <= Scalar(1)))
      throw InvalidStepRuleError("decay exponent must lie in (0, 1]");
    StepSizeRule r;
    r.kind = StepRuleKind::ScaledPowerDecay;
    r.c = c;
    r.p = p;
    return r;
  }

  static StepSizeRule log_over_k(Scalar c) {
    if (!(c > Scalar(0)))
      throw InvalidStepRuleError("scale c must be positive");
    StepSizeRule r;
    r.kind = StepRuleKind::LogOverK;
    r.c = c;
    return r;
  }
};

inline const char* step_rule_name(StepRuleKind kind) {
  switch (kind) {
    case StepRuleKind::Constant: return "constant";
    case StepRuleKind::PowerDecay: return "power-decay";
    case StepRuleKind::ScaledPowerDecay: return "scaled-power-decay";
    case StepRuleKind::LogOverK: return "log-over-k";
  }
  return "unknown";
}

namespace detail {

/// Admissibility against the dual constants; throws before any step is taken.
template <typename Scalar>
void validate_step_rule(const StepSizeRule<Scalar>& rule, Scalar dual_smoothness,
                        std::optional<Scalar> dual_strong_convexity) {
  if (!(dual_smoothness > Scalar(0)))
    throw InvalidStepRuleError("dual smoothness constant must be positive");
  const Scalar slack = Scalar(1) + Scalar(16) * Eigen::NumTraits<Scalar>::epsilon();
  switch (rule.kind) {
    case StepRuleKind::Constant:
    case StepRuleKind::PowerDecay:
      if (rule.gamma > slack / dual_smoothness)
        throw InvalidStepRuleError("step exceeds 1/L_h");
      break;
    case StepRuleKind::ScaledPowerDecay:
    case StepRuleKind::LogOverK: {
      if (!dual_strong_convexity || !(*dual_strong_convexity > Scalar(0)))
        throw InvalidStepRuleError(
            "scaled rules need the dual strong-convexity constant");
      if (rule.c > slack * (*dual_strong_convexity) / dual_smoothness)
        throw InvalidStepRuleError("scale c exceeds mu_h/L_h");
      break;
    }
  }
}

}  // namespace detail

/// Rule bound to a problem's constants; validated once at construction.
template <typename Scalar = double>
class StepSizeSchedule {
 public:
  StepSizeSchedule(StepSizeRule<Scalar> rule, Scalar dual_smoothness,
                   std::optional<Scalar> dual_strong_convexity = std::nullopt)
      : rule_(rule),
        dual_smoothness_(dual_smoothness),
        dual_strong_convexity_(dual_strong_convexity) {
    detail::validate_step_rule(rule_, dual_smoothness_, dual_strong_convexity_);
  }

  Scalar operator()(Index k) const {
    const Scalar kk = static_cast<Scalar>(k) + Scalar(1);
    switch (rule_.kind) {
      case StepRuleKind::Constant:
        return rule_.gamma;
      case StepRuleKind::PowerDecay:
        return rule_.gamma / std::pow(kk, rule_.p);
      case StepRuleKind::ScaledPowerDecay:
        return rule_.c / *dual_strong_convexity_ / std::pow(kk, rule_.p);
      case StepRuleKind::LogOverK: {
        const Scalar pk = k <= 1 ? Scalar(1)
                                 : std::log(static_cast<Scalar>(k)) /
                                       static_cast<Scalar>(k);
        return rule_.c / *dual_strong_convexity_ / std::pow(kk, pk);
      }
    }
    return Scalar(0);
  }

  const StepSizeRule<Scalar>& rule() const { return rule_; }
  Scalar dual_smoothness() const { return dual_smoothness_; }
  std::optional<Scalar> dual_strong_convexity() const {
    return dual_strong_convexity_;
  }

 private:
  StepSizeRule<Scalar> rule_;
  Scalar dual_smoothness_;
  std::optional<Scalar> dual_strong_convexity_;
};

/// One-shot evaluation with the same validation as StepSizeSchedule.
template <typename Scalar>
Scalar step_size(
    const StepSizeRule<Scalar>& rule, Index k,
    std::type_identity_t<Scalar> dual_smoothness,
    std::optional<std::type_identity_t<Scalar>> dual_strong_convexity =
        std::nullopt) {
  return StepSizeSchedule<Scalar>(rule, dual_smoothness,
                                  dual_strong_convexity)(k);
}

}  // namespace dualdec
