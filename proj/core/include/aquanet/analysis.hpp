#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aquanet/hydraulics.hpp"
#include "aquanet/network.hpp"
#include "aquanet/scenario.hpp"
#include "aquanet/schemes.hpp"

namespace aquanet {

// Concentrations along one pipe at one recorded time, upstream first.
struct PipeProfile {
  std::array<std::vector<double>, 2> concentration;
  std::vector<double> volume;  // m3 per segment
};

struct ElementSeries {
  std::string id;
  ElementKind kind = ElementKind::Junction;
  std::array<std::vector<double>, 2> values;  // [species][record]; pipes hold their mean
  std::vector<PipeProfile> profiles;          // pipes only, when profiles were recorded
};

struct SensorSeries {
  std::string id;
  std::string element;
  Species species = Species::Chlorine;
  std::vector<double> time;
  std::vector<double> values;
};

struct Diagnostics {
  std::array<double, 2> min_value{0.0, 0.0};
  std::array<double, 2> max_value{0.0, 0.0};
  double max_residual = 0.0;  // implicit schemes only
  std::size_t quality_steps = 0;
  std::vector<std::string> warnings;
  CflReport cfl;
  std::vector<std::size_t> segments;  // final grid
};

struct SimulationResult {
  Scheme scheme = Scheme::LaxWendroff;
  SpeciesMode species = SpeciesMode::Both;
  std::vector<double> time;
  std::vector<ElementSeries> elements;  // reservoirs, junctions, tanks, pumps, pipes, valves
  std::vector<SensorSeries> sensors;
  Diagnostics diagnostics;

  // Throws Error(Validation) for an unknown id.
  const ElementSeries& element(std::string_view id) const;
};

double segment_average(std::span<const double> values);
double volume_weighted_average(std::span<const double> values, std::span<const double> volumes);

// Mean over the pipe's segments at each recorded time; arithmetic for fixed
// grids, volume-weighted for Lagrangian segments.
std::vector<double> pipe_average_series(const SimulationResult& result, std::string_view pipe_id, Species species);

inline constexpr double kRelativeDifferenceFloor = 1e-6;  // mg/L

// (ref - model) / ref per point; nullopt where ref < floor.
std::vector<std::optional<double>> relative_difference(std::span<const double> reference, std::span<const double> model,
                                                       double floor = kRelativeDifferenceFloor);
std::optional<double> max_abs(std::span<const std::optional<double>> values);

// Outlet of a plug-flow pipe with first-order decay: c0 exp(-k L / v) once
// the front has arrived, `before` until then.
double analytic_plug_flow_decay(double c0, double k, double length, double velocity, double t, double before = 0.0);

// CSV `time_s,element_id,species,concentration_mg_L`; time-major, then
// element order, then species. Values use 17 significant digits.
void write_timeseries(std::ostream& out, const SimulationResult& result);
void export_timeseries(const SimulationResult& result, const std::filesystem::path& path);

struct TimeseriesTable {
  std::vector<double> time;
  std::vector<std::string> ids;
  std::vector<std::array<std::vector<double>, 2>> values;  // [element][species][time]
  std::array<bool, 2> present{false, false};
};
TimeseriesTable read_timeseries(std::string_view text);
TimeseriesTable import_timeseries(const std::filesystem::path& path);

struct ComparisonRow {
  std::string element;
  Species species = Species::Chlorine;
  Scheme scheme = Scheme::LaxWendroff;
  std::optional<double> max_rd;
};
// Max |RD| of every model against the reference, per element and species.
std::vector<ComparisonRow> compare_results(const SimulationResult& reference, std::span<const SimulationResult> models);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace aquanet
