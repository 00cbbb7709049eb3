#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aquanet/analysis.hpp"

namespace aquanet {

struct PlotSpec {
  std::vector<std::string> elements;
  std::filesystem::path out_dir;
  double width = 800.0;   // px
  double height = 480.0;  // px
};

// Writes `<out_dir>/<element>.svg` per requested element with one polyline
// per (scheme, simulated species). Returns the written paths.
// Throws Error(Validation) for an element missing from any result.
std::vector<std::filesystem::path> render_plots(std::span<const SimulationResult> results, const PlotSpec& spec);

// SVG text for one element; exposed for tests.
std::string render_svg(std::span<const SimulationResult> results, const std::string& element, double width,
                       double height);

}  // namespace aquanet
