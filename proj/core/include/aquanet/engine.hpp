#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aquanet/analysis.hpp"
#include "aquanet/hydraulics.hpp"
#include "aquanet/layout.hpp"
#include "aquanet/network.hpp"
#include "aquanet/scenario.hpp"
#include "aquanet/schemes.hpp"

namespace aquanet {

struct SpeciesState {
  std::shared_ptr<const StateLayout> layout;
  std::vector<double> x1;  // chlorine, mg/L
  std::vector<double> x2;  // reactant, mg/L
  double t = 0.0;
  std::vector<int> orientation;  // per pipe: +1 segment 0 at `from`, -1 at `to`

  std::vector<double>& values(Species s) noexcept { return s == Species::Chlorine ? x1 : x2; }
  const std::vector<double>& values(Species s) const noexcept { return s == Species::Chlorine ? x1 : x2; }
};

struct InputVector {
  std::vector<double> u1;
  std::vector<double> u2;
};

// Booster values at time t, routed to the species each booster injects.
InputVector input_vector(const Scenario& scenario, const Network& net, double t);

// Solves E x(t+dt) = A x(t) + B u + f for each non-null system, evaluating f
// on the pre-step state. A null system leaves that species untouched.
// Reports the largest residual |E x - rhs|_inf through `residual`.
SpeciesState advance_step(const StateSpaceSystem* chlorine, const StateSpaceSystem* reactant,
                          const SpeciesState& state, const InputVector& u, double dt, double* residual = nullptr);

// Reverses the segment block of every pipe whose direction flips; a zero
// entry in `new_directions` means stagnant and keeps the current order.
SpeciesState apply_flow_reversal(const SpeciesState& state, std::span<const int> old_directions,
                                 std::span<const int> new_directions);

struct MeasurementMap {
  struct Entry {
    std::string sensor;
    Species species = Species::Chlorine;
    std::size_t index = 0;
  };
  std::vector<Entry> entries;
};

// Pipe sensors read a segment counted from the pipe's `from` end (1-based,
// default the `to` end); segments beyond the grid clamp to the last one.
MeasurementMap build_measurement_map(const Network& net, const StateLayout& layout, std::span<const int> orientation,
                                     std::span<const SensorSpec> sensors, std::vector<std::string>* warnings = nullptr);

struct Measurements {
  std::vector<double> y1;
  std::vector<double> y2;
};
Measurements measure_outputs(const SpeciesState& state, const MeasurementMap& map);

struct RunOptions {
  std::optional<std::filesystem::path> dump_matrices;  // directory for triplet dumps
  std::function<void(const SpeciesState&)> observer;  // called after every quality step
};

// Initial state for a layout: sources at reservoirs, [INITIAL] overrides,
// zero elsewhere. Pipes start in file orientation.
SpeciesState initial_state(const Network& net, std::shared_ptr<const StateLayout> layout, const Scenario& scenario);

// Runs the scenario's scheme; `ltd` dispatches to the Lagrangian oracle.
SimulationResult run_simulation(const Network& net, const HydraulicSchedule& schedule, const Scenario& scenario,
                                const RunOptions& options = {});

}  // namespace aquanet
