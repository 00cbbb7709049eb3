#pragma once

// Lagrangian time-driven reference solver: each pipe holds a list of
// variable-volume segments that move with the flow. Used to cross-check the
// fixed-grid schemes.

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>

#include "aquanet/analysis.hpp"
#include "aquanet/engine.hpp"
#include "aquanet/hydraulics.hpp"
#include "aquanet/network.hpp"
#include "aquanet/reactions.hpp"
#include "aquanet/scenario.hpp"

namespace aquanet {

using Concentrations = std::array<double, 2>;  // {chlorine, reactant}, mg/L

struct LtdSegment {
  double volume = 0.0;  // m3, > 0
  Concentrations c{0.0, 0.0};
};

// Segments ordered upstream first for the current flow direction.
struct LtdPipeState {
  std::deque<LtdSegment> segments;

  double volume() const noexcept;
  Concentrations mass() const noexcept;  // mg/L * m3
  Concentrations mean() const noexcept;  // volume-weighted
};

struct LtdReaction {
  double kp = 0.0;  // pipe decay of chlorine, 1/s
  double kr = 0.0;  // mutual rate, L/(mg s)
  double dt = 0.0;  // s
  // Single-state bulk model; when set, kp holds only the wall part.
  std::optional<BulkModelSpec> bulk_model;
};

// Forward-Euler reaction of every segment over one step.
void ltd_react(LtdPipeState& pipe, const LtdReaction& reaction);

// Removes `volume` from the downstream end and returns the mass it carried.
// Throws Error(Cfl) when `volume` exceeds the pipe content.
Concentrations ltd_emit(LtdPipeState& pipe, double volume, std::string_view pipe_id = {});

// Adds `volume` at the upstream end. The first segment absorbs it when both
// species are within `tau_adj`; otherwise a new segment is created. When the
// count exceeds `max_segments` the adjacent pair with the smallest combined
// volume is merged.
void ltd_admit(LtdPipeState& pipe, double volume, const Concentrations& upstream, double tau_adj,
               std::size_t max_segments = 1000);

struct LtdStepResult {
  LtdPipeState pipe;
  Concentrations outflow_mass{0.0, 0.0};
};

// react, emit, admit.
LtdStepResult ltd_pipe_step(LtdPipeState pipe, double inflow_volume, const Concentrations& upstream, double tau_adj,
                            const LtdReaction& reaction, std::size_t max_segments = 1000,
                            std::string_view pipe_id = {});

// Full network run. Pipe series report the volume-weighted mean; pipe
// sensors read the segment at the `to` end, or the pipe mean when a segment
// number is given (the oracle has no fixed grid).
SimulationResult ltd_run(const Network& net, const HydraulicSchedule& schedule, const Scenario& scenario,
                         const RunOptions& options = {});

}  // namespace aquanet
