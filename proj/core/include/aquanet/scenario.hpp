#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aquanet/network.hpp"
#include "aquanet/reactions.hpp"
#include "aquanet/schemes.hpp"

namespace aquanet {

struct SourceSpec {
  std::string node;  // reservoir id
  Species species = Species::Chlorine;
  double concentration = 0.0;
};

struct InitialSpec {
  std::string element;  // node, pump, valve or pipe (all segments)
  Species species = Species::Chlorine;
  double concentration = 0.0;
};

// Step function: the booster injects `value` from `time` on.
struct BoosterEvent {
  double time = 0.0;
  std::string booster;
  double value = 0.0;
};

struct SensorSpec {
  std::string id;
  std::string element;
  Species species = Species::Chlorine;
  std::optional<std::size_t> segment;  // 1-based, pipes only; defaults to the last segment
};

enum class SpeciesMode { Both, Chlorine, Reactant };
std::string_view to_string(SpeciesMode mode) noexcept;
bool simulates(SpeciesMode mode, Species species) noexcept;

enum class RecordMode { Hydraulic, All };

struct SimulationSettings {
  double dt = 1.0;
  std::optional<double> duration;  // defaults to the hydraulic schedule end
  Scheme scheme = Scheme::LaxWendroff;
  SpeciesMode species = SpeciesMode::Both;
  double tau_adj = 0.01;        // mg/L, LTD merge tolerance
  std::size_t ltd_max_segments = 1000;
  std::vector<double> regrid_at;  // phase boundaries, s
  bool clamp_negative = false;
  RecordMode record = RecordMode::Hydraulic;
};

struct Scenario {
  std::vector<SourceSpec> sources;
  std::vector<InitialSpec> initial;
  std::vector<BoosterEvent> booster_schedule;
  std::vector<SensorSpec> sensors;
  ReactionParams reactions;  // SI
  BulkModel bulk_model = BulkModel::SecondOrderFictitious;
  bool hybrid = true;  // decay + mutual; false selects a single-state bulk model
  SimulationSettings sim;
};

// Sections: [SOURCES] node species conc; [INITIAL] element species conc;
// [BOOSTERS-SCHEDULE] time booster value; [SENSORS] id element species
// [segment]; [REACTIONS] kb kw kf kr (per day) then optional `model`,
// `order`, `limit_mg_L` lines; [SIMULATION] key value lines.
Scenario parse_scenario(std::string_view text);

// Cross-references the scenario against a network; throws Error(Validation).
void validate_scenario(const Scenario& scenario, const Network& net);

// Booster injection values at time t: the latest event at or before t.
std::vector<double> booster_values(const Scenario& scenario, const Network& net, double t);

}  // namespace aquanet
