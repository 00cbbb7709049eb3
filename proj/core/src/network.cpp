#include "aquanet/network.hpp"

#include <set>
#include <sstream>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::Reservoir: return "reservoir";
    case ElementKind::Junction: return "junction";
    case ElementKind::Tank: return "tank";
    case ElementKind::Pump: return "pump";
    case ElementKind::Pipe: return "pipe";
    case ElementKind::Valve: return "valve";
    case ElementKind::Booster: return "booster";
  }
  return "unknown";
}

std::string_view to_string(BoosterKind kind) noexcept {
  return kind == BoosterKind::FlowPaced ? "flow-paced" : "volume-based";
}

std::string_view to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::DuplicateId: return "duplicate-id";
    case FindingKind::DanglingEndpoint: return "dangling-endpoint";
    case FindingKind::NonpositiveGeometry: return "nonpositive-geometry";
    case FindingKind::TankVolumeBounds: return "tank-volume-bounds";
    case FindingKind::InvalidBoosterTarget: return "invalid-booster-target";
    case FindingKind::TooFewNodes: return "too-few-nodes";
    case FindingKind::SelfLoop: return "self-loop";
  }
  return "unknown";
}

bool is_node(ElementKind kind) noexcept {
  return kind == ElementKind::Reservoir || kind == ElementKind::Junction || kind == ElementKind::Tank;
}

bool is_link(ElementKind kind) noexcept {
  return kind == ElementKind::Pipe || kind == ElementKind::Pump || kind == ElementKind::Valve;
}

ValidationReport validate_topology(const NetworkTopology& net) {
  ValidationReport report;
  auto add = [&](FindingKind kind, const std::string& id, std::string reason) {
    report.findings.push_back(Finding{kind, id, std::move(reason)});
  };

  std::set<std::string> seen;
  std::unordered_map<std::string, ElementKind> node_kind;
  auto claim = [&](const std::string& id, ElementKind kind) {
    if (!seen.insert(id).second) add(FindingKind::DuplicateId, id, "id '" + id + "' is used more than once");
    if (is_node(kind)) node_kind.emplace(id, kind);
  };
  for (const auto& r : net.reservoirs) claim(r.id, ElementKind::Reservoir);
  for (const auto& j : net.junctions) claim(j.id, ElementKind::Junction);
  for (const auto& t : net.tanks) claim(t.id, ElementKind::Tank);
  for (const auto& p : net.pipes) claim(p.id, ElementKind::Pipe);
  for (const auto& m : net.pumps) claim(m.id, ElementKind::Pump);
  for (const auto& v : net.valves) claim(v.id, ElementKind::Valve);
  for (const auto& b : net.boosters) claim(b.id, ElementKind::Booster);

  if (net.reservoirs.size() + net.junctions.size() + net.tanks.size() < 2) {
    add(FindingKind::TooFewNodes, {}, "a network needs at least two nodes");
  }

  for (const auto& t : net.tanks) {
    if (!(t.min_volume <= t.initial_volume && t.initial_volume <= t.max_volume) || t.initial_volume <= 0.0) {
      add(FindingKind::TankVolumeBounds, t.id, "initial volume must be positive and within [v_min, v_max]");
    }
  }

  auto check_link = [&](const std::string& id, const std::string& from, const std::string& to) {
    for (const auto* end : {&from, &to}) {
      if (!node_kind.contains(*end)) {
        add(FindingKind::DanglingEndpoint, *end, "link '" + id + "' references unknown node '" + *end + "'");
      }
    }
    if (from == to) add(FindingKind::SelfLoop, id, "link '" + id + "' starts and ends at the same node");
  };
  for (const auto& p : net.pipes) {
    check_link(p.id, p.from, p.to);
    if (!(p.length > 0.0)) add(FindingKind::NonpositiveGeometry, p.id, "pipe length must be positive");
    if (!(p.radius > 0.0)) add(FindingKind::NonpositiveGeometry, p.id, "pipe radius must be positive");
  }
  for (const auto& m : net.pumps) check_link(m.id, m.from, m.to);
  for (const auto& v : net.valves) check_link(v.id, v.from, v.to);

  for (const auto& b : net.boosters) {
    const auto it = node_kind.find(b.node);
    const ElementKind want = b.kind == BoosterKind::FlowPaced ? ElementKind::Junction : ElementKind::Tank;
    if (it == node_kind.end() || it->second != want) {
      add(FindingKind::InvalidBoosterTarget, b.id,
          "booster '" + b.id + "' of kind " + std::string(to_string(b.kind)) + " must target a " +
              std::string(to_string(want)));
    }
  }
  return report;
}

namespace {

void expect_fields(const detail::Record& rec, std::size_t n, const char* layout) {
  if (rec.fields.size() != n) {
    detail::throw_parse(rec.line, "[" + rec.section + "] expects '" + layout + "', got " +
                                      std::to_string(rec.fields.size()) + " fields");
  }
}

}  // namespace

NetworkTopology parse_network(std::string_view text) {
  using detail::parse_double;
  const auto records = detail::read_sections(
      text, {"RESERVOIRS", "JUNCTIONS", "TANKS", "PIPES", "PUMPS", "VALVES", "BOOSTERS"}, "network");

  NetworkTopology net;
  for (const auto& rec : records) {
    const auto& f = rec.fields;
    if (rec.section == "RESERVOIRS") {
      expect_fields(rec, 1, "id");
      net.reservoirs.push_back({f[0]});
    } else if (rec.section == "JUNCTIONS") {
      expect_fields(rec, 1, "id");
      net.junctions.push_back({f[0]});
    } else if (rec.section == "TANKS") {
      expect_fields(rec, 4, "id v_init_m3 v_min_m3 v_max_m3");
      net.tanks.push_back({f[0], parse_double(f[1], rec.line, "v_init_m3"),
                           parse_double(f[2], rec.line, "v_min_m3"), parse_double(f[3], rec.line, "v_max_m3")});
    } else if (rec.section == "PIPES") {
      expect_fields(rec, 5, "id from to length_m radius_m");
      net.pipes.push_back({f[0], f[1], f[2], parse_double(f[3], rec.line, "length_m"),
                           parse_double(f[4], rec.line, "radius_m")});
    } else if (rec.section == "PUMPS") {
      expect_fields(rec, 3, "id from to");
      net.pumps.push_back({f[0], f[1], f[2]});
    } else if (rec.section == "VALVES") {
      expect_fields(rec, 3, "id from to");
      net.valves.push_back({f[0], f[1], f[2]});
    } else {  // BOOSTERS
      expect_fields(rec, 4, "id node kind species");
      BoosterSpec b{f[0], f[1], BoosterKind::FlowPaced, Species::Chlorine};
      if (f[2] == "flow-paced") {
        b.kind = BoosterKind::FlowPaced;
      } else if (f[2] == "volume-based") {
        b.kind = BoosterKind::VolumeBased;
      } else {
        detail::throw_parse(rec.line, "booster kind must be flow-paced or volume-based, got '" + f[2] + "'", f[0]);
      }
      if (f[3] == "1") {
        b.species = Species::Chlorine;
      } else if (f[3] == "2") {
        b.species = Species::Reactant;
      } else {
        detail::throw_parse(rec.line, "booster species must be 1 or 2, got '" + f[3] + "'", f[0]);
      }
      net.boosters.push_back(std::move(b));
    }
  }

  const auto report = validate_topology(net);
  if (!report.ok()) {
    const auto& first = report.findings.front();
    throw Error(ErrorCategory::Validation, std::string(to_string(first.kind)) + ": " + first.reason, first.element);
  }
  return net;
}

std::string serialize_network(const NetworkTopology& net) {
  using detail::format_double;
  std::ostringstream out;
  out << "[RESERVOIRS]\n";
  for (const auto& r : net.reservoirs) out << r.id << '\n';
  out << "\n[JUNCTIONS]\n";
  for (const auto& j : net.junctions) out << j.id << '\n';
  out << "\n[TANKS]\n";
  for (const auto& t : net.tanks) {
    out << t.id << ' ' << format_double(t.initial_volume) << ' ' << format_double(t.min_volume) << ' '
        << format_double(t.max_volume) << '\n';
  }
  out << "\n[PIPES]\n";
  for (const auto& p : net.pipes) {
    out << p.id << ' ' << p.from << ' ' << p.to << ' ' << format_double(p.length) << ' ' << format_double(p.radius)
        << '\n';
  }
  out << "\n[PUMPS]\n";
  for (const auto& m : net.pumps) out << m.id << ' ' << m.from << ' ' << m.to << '\n';
  out << "\n[VALVES]\n";
  for (const auto& v : net.valves) out << v.id << ' ' << v.from << ' ' << v.to << '\n';
  out << "\n[BOOSTERS]\n";
  for (const auto& b : net.boosters) {
    out << b.id << ' ' << b.node << ' ' << to_string(b.kind) << ' ' << (index_of(b.species) + 1) << '\n';
  }
  return out.str();
}

Network::Network(NetworkTopology topology) : topo_(std::move(topology)) {
  const auto report = validate_topology(topo_);
  if (!report.ok()) {
    const auto& first = report.findings.front();
    throw Error(ErrorCategory::Validation, std::string(to_string(first.kind)) + ": " + first.reason, first.element);
  }
  auto index = [&](const auto& items, ElementKind kind) {
    for (std::size_t i = 0; i < items.size(); ++i) by_id_.emplace(items[i].id, ElementRef{kind, i});
  };
  index(topo_.reservoirs, ElementKind::Reservoir);
  index(topo_.junctions, ElementKind::Junction);
  index(topo_.tanks, ElementKind::Tank);
  index(topo_.pipes, ElementKind::Pipe);
  index(topo_.pumps, ElementKind::Pump);
  index(topo_.valves, ElementKind::Valve);
  index(topo_.boosters, ElementKind::Booster);

  incident_.resize(node_count());
  boosters_at_.resize(node_count());
  auto wire = [&](const auto& links, ElementKind kind, std::vector<ElementRef>& from, std::vector<ElementRef>& to) {
    for (std::size_t i = 0; i < links.size(); ++i) {
      from.push_back(at(links[i].from));
      to.push_back(at(links[i].to));
      incident_[node_slot(from.back())].push_back({kind, i});
      incident_[node_slot(to.back())].push_back({kind, i});
    }
  };
  wire(topo_.pumps, ElementKind::Pump, pump_from_, pump_to_);
  wire(topo_.pipes, ElementKind::Pipe, pipe_from_, pipe_to_);
  wire(topo_.valves, ElementKind::Valve, valve_from_, valve_to_);
  for (std::size_t b = 0; b < topo_.boosters.size(); ++b) boosters_at_[node_slot(at(topo_.boosters[b].node))].push_back(b);
}

std::size_t Network::node_count() const noexcept {
  return topo_.reservoirs.size() + topo_.junctions.size() + topo_.tanks.size();
}

std::size_t Network::node_slot(ElementRef node) const {
  switch (node.kind) {
    case ElementKind::Reservoir: return node.index;
    case ElementKind::Junction: return topo_.reservoirs.size() + node.index;
    case ElementKind::Tank: return topo_.reservoirs.size() + topo_.junctions.size() + node.index;
    default: throw Error(ErrorCategory::Validation, "element is not a node", id_of(node));
  }
}

std::optional<ElementRef> Network::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

ElementRef Network::at(std::string_view id) const {
  if (auto ref = find(id)) return *ref;
  throw Error(ErrorCategory::Validation, "unknown element '" + std::string(id) + "'", std::string(id));
}

const std::string& Network::id_of(ElementRef ref) const {
  switch (ref.kind) {
    case ElementKind::Reservoir: return topo_.reservoirs.at(ref.index).id;
    case ElementKind::Junction: return topo_.junctions.at(ref.index).id;
    case ElementKind::Tank: return topo_.tanks.at(ref.index).id;
    case ElementKind::Pump: return topo_.pumps.at(ref.index).id;
    case ElementKind::Pipe: return topo_.pipes.at(ref.index).id;
    case ElementKind::Valve: return topo_.valves.at(ref.index).id;
    case ElementKind::Booster: return topo_.boosters.at(ref.index).id;
  }
  throw Error(ErrorCategory::Validation, "invalid element reference");
}

ElementRef Network::link_from(ElementRef link) const {
  switch (link.kind) {
    case ElementKind::Pipe: return pipe_from_.at(link.index);
    case ElementKind::Pump: return pump_from_.at(link.index);
    case ElementKind::Valve: return valve_from_.at(link.index);
    default: throw Error(ErrorCategory::Validation, "element is not a link", id_of(link));
  }
}

ElementRef Network::link_to(ElementRef link) const {
  switch (link.kind) {
    case ElementKind::Pipe: return pipe_to_.at(link.index);
    case ElementKind::Pump: return pump_to_.at(link.index);
    case ElementKind::Valve: return valve_to_.at(link.index);
    default: throw Error(ErrorCategory::Validation, "element is not a link", id_of(link));
  }
}

const std::vector<ElementRef>& Network::incident_links(ElementRef node) const { return incident_[node_slot(node)]; }

const std::vector<std::size_t>& Network::boosters_at(ElementRef node) const { return boosters_at_[node_slot(node)]; }

}  // namespace aquanet
