#include "aquanet/analysis.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

const ElementSeries& SimulationResult::element(std::string_view id) const {
  for (const auto& e : elements) {
    if (e.id == id) return e;
  }
  throw Error(ErrorCategory::Validation, "no series for element '" + std::string(id) + "'", std::string(id));
}

double segment_average(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double volume_weighted_average(std::span<const double> values, std::span<const double> volumes) {
  double mass = 0.0;
  double vol = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mass += values[i] * volumes[i];
    vol += volumes[i];
  }
  return vol > 0.0 ? mass / vol : 0.0;
}

std::vector<double> pipe_average_series(const SimulationResult& result, std::string_view pipe_id, Species species) {
  const auto& series = result.element(pipe_id);
  if (series.kind != ElementKind::Pipe) {
    throw Error(ErrorCategory::Validation, "'" + std::string(pipe_id) + "' is not a pipe", std::string(pipe_id));
  }
  if (series.profiles.empty()) return series.values[index_of(species)];
  std::vector<double> out;
  out.reserve(series.profiles.size());
  const bool weighted = result.scheme == Scheme::Lagrangian;
  for (const auto& p : series.profiles) {
    const auto& c = p.concentration[index_of(species)];
    out.push_back(weighted ? volume_weighted_average(c, p.volume) : segment_average(c));
  }
  return out;
}

std::vector<std::optional<double>> relative_difference(std::span<const double> reference, std::span<const double> model,
                                                       double floor) {
  if (reference.size() != model.size()) {
    throw Error(ErrorCategory::Validation, "relative difference needs series on the same time axis (" +
                                               std::to_string(reference.size()) + " vs " +
                                               std::to_string(model.size()) + " points)");
  }
  std::vector<std::optional<double>> out(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] >= floor) out[i] = (reference[i] - model[i]) / reference[i];
  }
  return out;
}

std::optional<double> max_abs(std::span<const std::optional<double>> values) {
  std::optional<double> best;
  for (const auto& v : values) {
    if (v && (!best || std::abs(*v) > *best)) best = std::abs(*v);
  }
  return best;
}

double analytic_plug_flow_decay(double c0, double k, double length, double velocity, double t, double before) {
  const double travel = length / velocity;
  return t >= travel ? c0 * std::exp(-k * travel) : before;
}

void write_timeseries(std::ostream& out, const SimulationResult& result) {
  out << "time_s,element_id,species,concentration_mg_L\n";
  for (std::size_t k = 0; k < result.time.size(); ++k) {
    const std::string t = detail::format_double(result.time[k]);
    for (const auto& e : result.elements) {
      for (auto s : {Species::Chlorine, Species::Reactant}) {
        if (!simulates(result.species, s)) continue;
        out << t << ',' << e.id << ',' << (index_of(s) + 1) << ','
            << detail::format_double(e.values[index_of(s)][k]) << '\n';
      }
    }
  }
}

void export_timeseries(const SimulationResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
  write_timeseries(out, result);
  out.flush();
  if (!out) throw Error(ErrorCategory::Io, "failed writing '" + path.string() + "'");
}

TimeseriesTable read_timeseries(std::string_view text) {
  TimeseriesTable table;
  std::map<std::string, std::size_t> slot;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = false;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view line =
        detail::trim(text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos));
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto cols = detail::split_csv(line);
    if (!header) {
      if (line != "time_s,element_id,species,concentration_mg_L") {
        detail::throw_parse(line_no, "unexpected time-series header");
      }
      header = true;
      continue;
    }
    if (cols.size() != 4) detail::throw_parse(line_no, "expected 4 columns");
    const double t = detail::parse_double(cols[0], line_no, "time_s");
    if (table.time.empty() || table.time.back() != t) table.time.push_back(t);
    const std::size_t k = table.time.size() - 1;
    auto [it, fresh] = slot.try_emplace(cols[1], table.ids.size());
    if (fresh) {
      table.ids.push_back(cols[1]);
      table.values.emplace_back();
    }
    const auto species = detail::parse_integer(cols[2], line_no, "species");
    if (species != 1 && species != 2) detail::throw_parse(line_no, "species must be 1 or 2");
    const std::size_t s = static_cast<std::size_t>(species - 1);
    table.present[s] = true;
    auto& series = table.values[it->second][s];
    if (series.size() != k) detail::throw_parse(line_no, "rows are not time-major", cols[1]);
    series.push_back(detail::parse_double(cols[3], line_no, "concentration"));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TimeseriesTable import_timeseries(const std::filesystem::path& path) { return read_timeseries(read_text_file(path)); }

std::vector<ComparisonRow> compare_results(const SimulationResult& reference, std::span<const SimulationResult> models) {
  std::vector<ComparisonRow> rows;
  for (const auto& model : models) {
    for (const auto& ref_series : reference.elements) {
      const auto& series = model.element(ref_series.id);
      for (auto s : {Species::Chlorine, Species::Reactant}) {
        if (!simulates(reference.species, s) || !simulates(model.species, s)) continue;
        const auto rd = relative_difference(ref_series.values[index_of(s)], series.values[index_of(s)]);
        rows.push_back({ref_series.id, s, model.scheme, max_abs(rd)});
      }
    }
  }
  return rows;
}

}  // namespace aquanet
