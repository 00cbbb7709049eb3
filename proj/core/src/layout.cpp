#include "aquanet/layout.hpp"

#include "aquanet/errors.hpp"

namespace aquanet {

StateLayout::StateLayout(const Network& net, const DiscretizationGrid& grid) {
  if (grid.segments.size() != net.pipes().size()) {
    throw Error(ErrorCategory::Grid, "grid does not match the network's pipe count");
  }
  std::size_t at = 0;
  reservoir_begin_ = at;
  at += net.reservoirs().size();
  junction_begin_ = at;
  at += net.junctions().size();
  tank_begin_ = at;
  at += net.tanks().size();
  pump_begin_ = at;
  at += net.pumps().size();
  pipes_begin_ = at;
  for (std::size_t s : grid.segments) {
    pipe_begin_.push_back(at);
    segments_.push_back(s);
    at += s;
  }
  valves_begin_ = at;
  at += net.valves().size();
  size_ = at;
}

std::size_t StateLayout::index_of(ElementRef ref) const {
  switch (ref.kind) {
    case ElementKind::Reservoir: return reservoir(ref.index);
    case ElementKind::Junction: return junction(ref.index);
    case ElementKind::Tank: return tank(ref.index);
    case ElementKind::Pump: return pump(ref.index);
    case ElementKind::Valve: return valve(ref.index);
    default: throw Error(ErrorCategory::Grid, "element has no single state index");
  }
}

}  // namespace aquanet
