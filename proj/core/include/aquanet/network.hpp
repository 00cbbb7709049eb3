#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aquanet {

enum class ElementKind { Reservoir, Junction, Tank, Pump, Pipe, Valve, Booster };
std::string_view to_string(ElementKind kind) noexcept;

enum class Species { Chlorine = 0, Reactant = 1 };
inline constexpr std::size_t kSpeciesCount = 2;
inline constexpr std::size_t index_of(Species s) noexcept { return static_cast<std::size_t>(s); }

struct ElementRef {
  ElementKind kind = ElementKind::Junction;
  std::size_t index = 0;
  bool operator==(const ElementRef&) const = default;
};

struct ReservoirSpec {
  std::string id;
  bool operator==(const ReservoirSpec&) const = default;
};

struct JunctionSpec {
  std::string id;
  bool operator==(const JunctionSpec&) const = default;
};

struct TankSpec {
  std::string id;
  double initial_volume = 0.0;  // m3
  double min_volume = 0.0;
  double max_volume = 0.0;
  bool operator==(const TankSpec&) const = default;
};

struct PipeSpec {
  std::string id;
  std::string from;
  std::string to;
  double length = 0.0;  // m
  double radius = 0.0;  // m
  bool operator==(const PipeSpec&) const = default;
};

// Pumps and valves are storage-free links; their quality equals the upstream node.
struct LinkSpec {
  std::string id;
  std::string from;
  std::string to;
  bool operator==(const LinkSpec&) const = default;
};
using PumpSpec = LinkSpec;
using ValveSpec = LinkSpec;

enum class BoosterKind { FlowPaced, VolumeBased };
std::string_view to_string(BoosterKind kind) noexcept;

struct BoosterSpec {
  std::string id;
  std::string node;
  BoosterKind kind = BoosterKind::FlowPaced;
  Species species = Species::Chlorine;
  bool operator==(const BoosterSpec&) const = default;
};

struct NetworkTopology {
  std::vector<ReservoirSpec> reservoirs;
  std::vector<JunctionSpec> junctions;
  std::vector<TankSpec> tanks;
  std::vector<PipeSpec> pipes;
  std::vector<PumpSpec> pumps;
  std::vector<ValveSpec> valves;
  std::vector<BoosterSpec> boosters;
  bool operator==(const NetworkTopology&) const = default;
};

enum class FindingKind {
  DuplicateId,
  DanglingEndpoint,
  NonpositiveGeometry,
  TankVolumeBounds,
  InvalidBoosterTarget,
  TooFewNodes,
  SelfLoop,
};
std::string_view to_string(FindingKind kind) noexcept;

struct Finding {
  FindingKind kind;
  std::string element;
  std::string reason;
  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const noexcept { return findings.empty(); }
  bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_topology(const NetworkTopology& net);

// Throws Error(Parse) on syntax problems and Error(Validation) carrying the
// first finding when the parsed topology is structurally invalid.
NetworkTopology parse_network(std::string_view text);
std::string serialize_network(const NetworkTopology& net);

// Validated topology with id lookup and adjacency. Immutable once built.
class Network {
 public:
  explicit Network(NetworkTopology topology);

  const NetworkTopology& topology() const noexcept { return topo_; }
  const std::vector<ReservoirSpec>& reservoirs() const noexcept { return topo_.reservoirs; }
  const std::vector<JunctionSpec>& junctions() const noexcept { return topo_.junctions; }
  const std::vector<TankSpec>& tanks() const noexcept { return topo_.tanks; }
  const std::vector<PipeSpec>& pipes() const noexcept { return topo_.pipes; }
  const std::vector<PumpSpec>& pumps() const noexcept { return topo_.pumps; }
  const std::vector<ValveSpec>& valves() const noexcept { return topo_.valves; }
  const std::vector<BoosterSpec>& boosters() const noexcept { return topo_.boosters; }

  std::optional<ElementRef> find(std::string_view id) const;
  // Throws Error(Validation) naming the id when it is unknown.
  ElementRef at(std::string_view id) const;
  const std::string& id_of(ElementRef ref) const;

  // Nominal endpoints (file direction) of a pipe, pump or valve.
  ElementRef link_from(ElementRef link) const;
  ElementRef link_to(ElementRef link) const;

  // Links touching a node, in canonical kind order (pumps, pipes, valves).
  const std::vector<ElementRef>& incident_links(ElementRef node) const;
  // Booster indices attached to a node.
  const std::vector<std::size_t>& boosters_at(ElementRef node) const;

  std::size_t node_count() const noexcept;

 private:
  std::size_t node_slot(ElementRef node) const;

  NetworkTopology topo_;
  std::unordered_map<std::string, ElementRef> by_id_;
  std::vector<ElementRef> pipe_from_, pipe_to_, pump_from_, pump_to_, valve_from_, valve_to_;
  std::vector<std::vector<ElementRef>> incident_;
  std::vector<std::vector<std::size_t>> boosters_at_;
};

bool is_node(ElementKind kind) noexcept;
bool is_link(ElementKind kind) noexcept;

}  // namespace aquanet
