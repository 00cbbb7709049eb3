#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "aquanet/network.hpp"

namespace aquanet {

inline constexpr double kSecondsPerDay = 86400.0;

// All fields in SI seconds. Field files carry per-day values; use
// from_field_units to convert.
struct ReactionParams {
  double kb = 0.0;  // 1/s
  double kw = 0.0;  // m/s
  double kf = 0.0;  // m/s
  double kr = 0.0;  // L/(mg s)
  std::optional<double> limit;  // c_L, mg/L
  std::optional<double> order;  // n

  static ReactionParams from_field_units(double kb_per_day, double kw_m_per_day, double kf_m_per_day,
                                         double kr_L_per_mg_day);
  bool operator==(const ReactionParams&) const = default;
};

double pipe_decay_coefficient(double kb, double kw, double kf, double radius) noexcept;
double tank_decay_coefficient(double kb) noexcept;
double decay_rate_term(double c, double k) noexcept;
// Rate contributed by the mutual reaction; identical for both species.
double mutual_rate_term(double c, double c_other, double kr) noexcept;

struct DecayCoefficients {
  std::vector<double> pipe;  // k^P per pipe
  std::vector<double> tank;  // k^TK per tank
};
DecayCoefficients decay_coefficients(const Network& net, const ReactionParams& params);

enum class BulkModel {
  FirstOrder,
  FirstOrderStable,
  NthOrder,
  NthOrderStable,
  SecondOrderFictitious,
};
std::string_view to_string(BulkModel model) noexcept;
std::optional<BulkModel> parse_bulk_model(std::string_view name) noexcept;

struct BulkModelSpec {
  BulkModel model = BulkModel::SecondOrderFictitious;
  ReactionParams params;
};

// Throws Error(Validation) when the model's parameters are missing.
void validate_bulk_model(const BulkModelSpec& spec);

// Per-species bulk rates {chlorine, reactant} in mg/L/s. The single-state
// models use k_b as their rate constant and return zero for the reactant.
std::array<double, 2> bulk_model_rate(const BulkModelSpec& spec, double c, double c_other);

}  // namespace aquanet
