#include "aquanet/reactions.hpp"

#include <cmath>

#include "aquanet/errors.hpp"

namespace aquanet {

ReactionParams ReactionParams::from_field_units(double kb_per_day, double kw_m_per_day, double kf_m_per_day,
                                                double kr_L_per_mg_day) {
  for (double k : {kb_per_day, kw_m_per_day, kf_m_per_day, kr_L_per_mg_day}) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw Error(ErrorCategory::Validation, "reaction rate constants must be finite and nonnegative");
    }
  }
  ReactionParams p;
  p.kb = kb_per_day / kSecondsPerDay;
  p.kw = kw_m_per_day / kSecondsPerDay;
  p.kf = kf_m_per_day / kSecondsPerDay;
  p.kr = kr_L_per_mg_day / kSecondsPerDay;
  return p;
}

double pipe_decay_coefficient(double kb, double kw, double kf, double radius) noexcept {
  const double sum = kw + kf;
  if (sum == 0.0) return kb;
  return kb + 2.0 * kw * kf / (radius * sum);
}

double tank_decay_coefficient(double kb) noexcept { return kb; }

double decay_rate_term(double c, double k) noexcept { return -k * c; }

double mutual_rate_term(double c, double c_other, double kr) noexcept { return -kr * (c * c_other); }

DecayCoefficients decay_coefficients(const Network& net, const ReactionParams& params) {
  DecayCoefficients out;
  for (const auto& p : net.pipes()) out.pipe.push_back(pipe_decay_coefficient(params.kb, params.kw, params.kf, p.radius));
  out.tank.assign(net.tanks().size(), tank_decay_coefficient(params.kb));
  return out;
}

std::string_view to_string(BulkModel model) noexcept {
  switch (model) {
    case BulkModel::FirstOrder: return "first-order";
    case BulkModel::FirstOrderStable: return "first-order-with-stable";
    case BulkModel::NthOrder: return "nth-order";
    case BulkModel::NthOrderStable: return "nth-order-with-stable";
    case BulkModel::SecondOrderFictitious: return "second-order-fictitious";
  }
  return "unknown";
}

std::optional<BulkModel> parse_bulk_model(std::string_view name) noexcept {
  for (auto m : {BulkModel::FirstOrder, BulkModel::FirstOrderStable, BulkModel::NthOrder, BulkModel::NthOrderStable,
                 BulkModel::SecondOrderFictitious}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void validate_bulk_model(const BulkModelSpec& spec) {
  const auto& p = spec.params;
  const bool needs_limit = spec.model == BulkModel::FirstOrderStable || spec.model == BulkModel::NthOrderStable;
  const bool needs_order = spec.model == BulkModel::NthOrder || spec.model == BulkModel::NthOrderStable;
  if (needs_limit && (!p.limit || *p.limit < 0.0)) {
    throw Error(ErrorCategory::Validation,
                std::string(to_string(spec.model)) + " needs a nonnegative limiting concentration");
  }
  if (needs_order && (!p.order || *p.order < 1.0)) {
    throw Error(ErrorCategory::Validation, std::string(to_string(spec.model)) + " needs a reaction order n >= 1");
  }
}

std::array<double, 2> bulk_model_rate(const BulkModelSpec& spec, double c, double c_other) {
  validate_bulk_model(spec);
  const auto& p = spec.params;
  const double k = p.kb;
  auto power = [&](double base, double exponent) {
    if (base < 0.0 && exponent != std::floor(exponent)) {
      throw Error(ErrorCategory::Validation, "nth-order rate undefined for negative concentration with non-integer n");
    }
    return std::pow(base, exponent);
  };
  switch (spec.model) {
    case BulkModel::FirstOrder: return {-k * c, 0.0};
    case BulkModel::FirstOrderStable: return {-k * (c - *p.limit), 0.0};
    case BulkModel::NthOrder: return {-k * power(c, *p.order), 0.0};
    case BulkModel::NthOrderStable: return {-k * (c - *p.limit) * power(c, *p.order - 1.0), 0.0};
    case BulkModel::SecondOrderFictitious: {
      const double r = mutual_rate_term(c, c_other, p.kr);
      return {r, r};
    }
  }
  return {0.0, 0.0};
}

}  // namespace aquanet
