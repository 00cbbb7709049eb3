#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aquanet/network.hpp"

namespace aquanet {

// Piecewise-constant hydraulic state over [start, start + duration).
// Flows are signed: positive means from -> to in file direction.
struct HydraulicStep {
  double start = 0.0;     // s
  double duration = 0.0;  // s
  std::vector<double> pipe_flow;        // m3/s
  std::vector<double> pump_flow;        // m3/s
  std::vector<double> valve_flow;       // m3/s
  std::vector<double> junction_demand;  // m3/s, >= 0
  std::vector<double> tank_volume;      // m3 at step start, recomputed from flows
  std::vector<double> tank_demand;      // m3/s drawn out of the network at the tank
  std::vector<double> booster_flow;     // m3/s injected by each booster
};

struct HydraulicSchedule {
  std::vector<HydraulicStep> steps;
  std::vector<std::string> warnings;

  double end_time() const noexcept;
  // Index of the step containing t; the final step owns its right end.
  std::size_t step_index_at(double t) const;
};

// CSV `time_s,element_id,quantity,value`. Quantities: flow_m3s (pipes,
// pumps, valves, boosters), demand_m3s (junctions, tanks), tank_volume_m3.
// A row `<t>,*,duration_s,<d>` fixes a step's duration explicitly; otherwise
// it is the distance to the next step start, and the last step repeats the
// previous duration. An element omitted from a step keeps its prior value.
HydraulicSchedule load_hydraulics(std::string_view text, const Network& net);

double mean_velocity(double q, double radius) noexcept;

// Net volumetric inflow into a tank over a step, boosters included.
double tank_net_inflow(const Network& net, const HydraulicStep& step, std::size_t tank);
// Tank volume at absolute time t within `step`.
double tank_volume_at(const Network& net, const HydraulicStep& step, std::size_t tank, double t);

// Throws Error(Hydraulics) naming the step when dt does not divide a duration.
void check_step_divisibility(const HydraulicSchedule& schedule, double dt);

struct DiscretizationGrid {
  double dt = 0.0;
  std::vector<std::size_t> segments;      // s_i >= 1
  std::vector<double> segment_length;     // L_i / s_i
  std::size_t total_segments = 0;
  std::vector<std::string> warnings;
};

DiscretizationGrid build_fixed_grid(const Network& net, std::span<const HydraulicStep> steps, double dt);
DiscretizationGrid build_fixed_grid(const Network& net, const HydraulicSchedule& schedule, double dt);

struct CourantField {
  // [step][pipe]
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<int>> direction;  // +1 file direction, -1 reversed, 0 stagnant
};

// Courant numbers within 1e-9 above one are rounding artefacts of the grid
// construction and are snapped to exactly one.
CourantField courant_numbers(const Network& net, const DiscretizationGrid& grid,
                             std::span<const HydraulicStep> steps);
CourantField courant_numbers(const Network& net, const DiscretizationGrid& grid, const HydraulicSchedule& schedule);

struct CflEntry {
  std::size_t pipe = 0;
  std::size_t step = 0;
  double lambda = 0.0;
  bool operator==(const CflEntry&) const = default;
};

struct CflReport {
  bool pass = true;
  std::vector<CflEntry> violations;  // lambda > 1
  std::vector<CflEntry> stagnant;    // lambda == 0
};

CflReport cfl_report(const CourantField& field);

}  // namespace aquanet
