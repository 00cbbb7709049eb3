#pragma once

#include <cstddef>
#include <vector>

#include "aquanet/hydraulics.hpp"
#include "aquanet/network.hpp"

namespace aquanet {

// State vector ordering: [reservoirs | junctions | tanks | pumps | pipe
// segments | valves], file order within each block. Segments are pipe-major
// with segment 0 at the current upstream end.
class StateLayout {
 public:
  StateLayout(const Network& net, const DiscretizationGrid& grid);

  std::size_t size() const noexcept { return size_; }

  std::size_t reservoir(std::size_t i) const noexcept { return reservoir_begin_ + i; }
  std::size_t junction(std::size_t i) const noexcept { return junction_begin_ + i; }
  std::size_t tank(std::size_t i) const noexcept { return tank_begin_ + i; }
  std::size_t pump(std::size_t i) const noexcept { return pump_begin_ + i; }
  std::size_t valve(std::size_t i) const noexcept { return valves_begin_ + i; }
  std::size_t segment(std::size_t pipe, std::size_t s) const noexcept { return pipe_begin_[pipe] + s; }
  std::size_t first_segment(std::size_t pipe) const noexcept { return pipe_begin_[pipe]; }
  std::size_t last_segment(std::size_t pipe) const noexcept { return pipe_begin_[pipe] + segments_[pipe] - 1; }
  std::size_t segments(std::size_t pipe) const noexcept { return segments_[pipe]; }
  std::size_t pipe_count() const noexcept { return segments_.size(); }

  // State index of a node, pump or valve. Pipes have no single index.
  std::size_t index_of(ElementRef ref) const;

  std::size_t pipes_begin() const noexcept { return pipes_begin_; }
  std::size_t pipes_end() const noexcept { return valves_begin_; }
  std::size_t valves_begin() const noexcept { return valves_begin_; }

  bool operator==(const StateLayout&) const = default;

 private:
  std::size_t reservoir_begin_ = 0;
  std::size_t junction_begin_ = 0;
  std::size_t tank_begin_ = 0;
  std::size_t pump_begin_ = 0;
  std::size_t pipes_begin_ = 0;
  std::size_t valves_begin_ = 0;
  std::size_t size_ = 0;
  std::vector<std::size_t> pipe_begin_;
  std::vector<std::size_t> segments_;
};

}  // namespace aquanet
