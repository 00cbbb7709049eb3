#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aquanet/hydraulics.hpp"
#include "aquanet/layout.hpp"
#include "aquanet/network.hpp"
#include "aquanet/reactions.hpp"
#include "aquanet/sparse.hpp"

namespace aquanet {

enum class Scheme { LaxWendroff, BackwardEuler, CrankNicolson, Characteristics, Lagrangian };
std::string_view to_string(Scheme scheme) noexcept;  // lw, be, cn, moc, ltd
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct LwWeights {
  double lower = 0.0;   // on the upstream neighbour
  double center = 1.0;
  double upper = 0.0;   // on the downstream neighbour
};

// Throws Error(Cfl) outside [0, 1].
LwWeights lw_weights(double courant);

// A term evaluating to coefficient * x1[index] * x2[index] in row `row`.
struct MutualTerm {
  std::size_t row = 0;
  double coefficient = 0.0;
  std::size_t index = 0;
  bool operator==(const MutualTerm&) const = default;
};

// A term evaluating to coefficient * bulk_model_rate(x1[index], x2[index])
// for the system's species; only used for the single-state bulk models.
struct BulkTerm {
  std::size_t row = 0;
  double coefficient = 0.0;
  std::size_t index = 0;
};

// E x(t+dt) = A x(t) + B u + f(x1(t), x2(t)) for one species and one step.
struct StateSpaceSystem {
  Scheme scheme = Scheme::LaxWendroff;
  Species species = Species::Chlorine;
  bool e_identity = true;
  CsrMatrix E;
  CsrMatrix A;
  CsrMatrix B;  // n_x by n_boosters
  std::vector<MutualTerm> mutual;
  std::vector<BulkTerm> bulk;
  std::optional<BulkModelSpec> bulk_model;
  std::vector<std::size_t> stagnant_junctions;

  // rhs += f(x1, x2)
  void add_nonlinear(std::span<const double> x1, std::span<const double> x2, std::span<double> rhs) const;
};

// Everything that parametrises one quality step's assembly. Pointers are
// borrowed and must outlive the call.
struct StepContext {
  const Network* net = nullptr;
  const StateLayout* layout = nullptr;
  const HydraulicStep* hydraulics = nullptr;
  std::span<const double> courant;      // per pipe, this hydraulic step
  std::span<const int> orientation;     // per pipe: +1 segment 0 at `from`, -1 at `to`
  const DecayCoefficients* decay = nullptr;
  double kr = 0.0;                      // L/(mg s)
  double dt = 0.0;                      // s
  double t = 0.0;                       // start of the quality step, s
  // Single-state bulk model; when set, k_b leaves the linear part and is
  // evaluated through the model instead.
  std::optional<BulkModelSpec> bulk_model;
};

struct JunctionRow {
  std::vector<std::pair<std::size_t, double>> inflow;   // (state index, weight)
  std::vector<std::pair<std::size_t, double>> booster;  // (booster index, weight)
  bool stagnant = false;
};
JunctionRow junction_row(const StepContext& ctx, std::size_t junction);

struct TankRow {
  double self = 1.0;
  std::vector<std::pair<std::size_t, double>> inflow;
  std::vector<std::pair<std::size_t, double>> booster;
  double mutual = 0.0;  // coefficient on c * c_other
  double volume_ratio = 1.0;  // V(t) / V(t+dt)
};
// Throws Error(MassBalance) when V(t+dt) <= 0 or the self coefficient is negative.
TankRow tank_row(const StepContext& ctx, std::size_t tank, Species species);

// State-independent schemes.
void assemble_lw(const StepContext& ctx, Species species, StateSpaceSystem& out);
void assemble_be(const StepContext& ctx, Species species, StateSpaceSystem& out);
void assemble_cn(const StepContext& ctx, Species species, StateSpaceSystem& out);
// The characteristics scheme folds the other species' previous values into A.
void assemble_moc(const StepContext& ctx, Species species, std::span<const double> x1, std::span<const double> x2,
                  StateSpaceSystem& out);

void assemble(Scheme scheme, const StepContext& ctx, Species species, std::span<const double> x1,
              std::span<const double> x2, StateSpaceSystem& out);

StateSpaceSystem assemble_lw(const StepContext& ctx, Species species);
StateSpaceSystem assemble_be(const StepContext& ctx, Species species);
StateSpaceSystem assemble_cn(const StepContext& ctx, Species species);
StateSpaceSystem assemble_moc(const StepContext& ctx, Species species, std::span<const double> x1,
                              std::span<const double> x2);

}  // namespace aquanet
