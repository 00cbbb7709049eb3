#pragma once

// Collects element series for both the grid engine and the Lagrangian oracle
// so the two produce identically shaped results.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "aquanet/analysis.hpp"
#include "aquanet/network.hpp"

namespace aquanet::detail {

class Recorder {
 public:
  Recorder(const Network& net, Scheme scheme, SpeciesMode mode, bool keep_profiles)
      : keep_profiles_(keep_profiles) {
    result_.scheme = scheme;
    result_.species = mode;
    auto add = [&](const auto& items, ElementKind kind) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        refs_.push_back({kind, i});
        result_.elements.push_back(ElementSeries{items[i].id, kind, {}, {}});
      }
    };
    add(net.reservoirs(), ElementKind::Reservoir);
    add(net.junctions(), ElementKind::Junction);
    add(net.tanks(), ElementKind::Tank);
    add(net.pumps(), ElementKind::Pump);
    add(net.pipes(), ElementKind::Pipe);
    add(net.valves(), ElementKind::Valve);
    result_.diagnostics.min_value = {INFINITY, INFINITY};
    result_.diagnostics.max_value = {-INFINITY, -INFINITY};
  }

  bool keep_profiles() const noexcept { return keep_profiles_; }

  // `value(ref, species)` gives node/link values and pipe means; `profile`
  // is consulted for pipes only when profiles are kept.
  void record(double t, const std::function<double(ElementRef, Species)>& value,
              const std::function<PipeProfile(std::size_t)>& profile) {
    result_.time.push_back(t);
    for (std::size_t e = 0; e < refs_.size(); ++e) {
      auto& series = result_.elements[e];
      for (auto s : {Species::Chlorine, Species::Reactant}) {
        series.values[index_of(s)].push_back(simulates(result_.species, s) ? value(refs_[e], s) : 0.0);
      }
      if (keep_profiles_ && refs_[e].kind == ElementKind::Pipe) series.profiles.push_back(profile(refs_[e].index));
    }
  }

  void observe_range(Species s, double lo, double hi) {
    auto& d = result_.diagnostics;
    d.min_value[index_of(s)] = std::min(d.min_value[index_of(s)], lo);
    d.max_value[index_of(s)] = std::max(d.max_value[index_of(s)], hi);
  }

  void warn(const std::string& message) {
    if (seen_.insert(message).second) result_.diagnostics.warnings.push_back(message);
  }

  SimulationResult& result() noexcept { return result_; }

  SimulationResult take() {
    auto& d = result_.diagnostics;
    for (std::size_t s = 0; s < 2; ++s) {
      if (!std::isfinite(d.min_value[s])) d.min_value[s] = 0.0;
      if (!std::isfinite(d.max_value[s])) d.max_value[s] = 0.0;
    }
    return std::move(result_);
  }

 private:
  bool keep_profiles_;
  std::vector<ElementRef> refs_;
  std::set<std::string> seen_;
  SimulationResult result_;
};

}  // namespace aquanet::detail
