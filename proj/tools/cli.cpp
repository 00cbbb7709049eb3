#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "aquanet/analysis.hpp"
#include "aquanet/engine.hpp"
#include "aquanet/errors.hpp"
#include "aquanet/hydraulics.hpp"
#include "aquanet/network.hpp"
#include "aquanet/plot.hpp"
#include "aquanet/scenario.hpp"

namespace aquanet::cli {

namespace fs = std::filesystem;

int exit_code_for(int category_index) noexcept { return 2 + category_index; }

namespace {

struct CommonOptions {
  std::string network;
  std::string hydraulics;
  std::string scenario;
  std::optional<double> dt;
  std::optional<double> duration;
  std::string out = "aquanet-out";
  bool clamp_negative = false;
  bool record_all = false;
  std::vector<std::string> plot;
};

struct Inputs {
  Network net;
  HydraulicSchedule schedule;
  Scenario scenario;
};

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("aquanet");
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("AQUANET_LOG")) logger->set_level(spdlog::level::from_str(env));
  spdlog::set_default_logger(logger);
}

Network load_network(const std::string& path) { return Network(parse_network(read_text_file(path))); }

Inputs load_inputs(const CommonOptions& o, bool need_scenario) {
  Inputs in{load_network(o.network), {}, {}};
  in.schedule = load_hydraulics(read_text_file(o.hydraulics), in.net);
  for (const auto& w : in.schedule.warnings) spdlog::warn("{}", w);
  if (!o.scenario.empty()) {
    in.scenario = parse_scenario(read_text_file(o.scenario));
  } else if (need_scenario) {
    throw Error(ErrorCategory::Usage, "--scenario is required");
  }
  if (o.dt) in.scenario.sim.dt = *o.dt;
  if (o.duration) in.scenario.sim.duration = *o.duration;
  if (o.clamp_negative) in.scenario.sim.clamp_negative = true;
  if (o.record_all) in.scenario.sim.record = RecordMode::All;
  validate_scenario(in.scenario, in.net);
  return in;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCategory::Io, "failed writing '" + path.string() + "'");
}

std::string diagnostics_json(const Network& net, const SimulationResult& r) {
  const auto& d = r.diagnostics;
  nlohmann::ordered_json j;
  j["scheme"] = to_string(r.scheme);
  j["species"] = to_string(r.species);
  j["quality_steps"] = d.quality_steps;
  j["min_value"] = {d.min_value[0], d.min_value[1]};
  j["max_value"] = {d.max_value[0], d.max_value[1]};
  j["max_residual"] = d.max_residual;
  j["cfl_pass"] = d.cfl.pass;
  auto entries = [&](const std::vector<CflEntry>& v) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : v) arr.push_back({{"pipe", net.pipes()[e.pipe].id}, {"step", e.step}, {"courant", e.lambda}});
    return arr;
  };
  j["cfl_violations"] = entries(d.cfl.violations);
  j["stagnant"] = entries(d.cfl.stagnant);
  nlohmann::ordered_json segs = nlohmann::ordered_json::object();
  for (std::size_t p = 0; p < d.segments.size() && p < net.pipes().size(); ++p) segs[net.pipes()[p].id] = d.segments[p];
  j["segments"] = segs;
  j["warnings"] = d.warnings;
  return j.dump(2) + "\n";
}

std::string sensors_csv(const SimulationResult& r) {
  std::ostringstream ss;
  ss << "time_s,sensor_id,element_id,species,concentration_mg_L\n";
  ss << std::setprecision(17);
  for (const auto& s : r.sensors) {
    for (std::size_t k = 0; k < s.time.size(); ++k) {
      ss << s.time[k] << ',' << s.id << ',' << s.element << ',' << (index_of(s.species) + 1) << ',' << s.values[k]
         << '\n';
    }
  }
  return ss.str();
}

void write_run(const fs::path& dir, const Network& net, const SimulationResult& r) {
  const std::string stem(to_string(r.scheme));
  export_timeseries(r, dir / (stem + ".csv"));
  write_file(dir / (stem + "_diagnostics.json"), diagnostics_json(net, r));
  if (!r.sensors.empty()) write_file(dir / (stem + "_sensors.csv"), sensors_csv(r));
  for (const auto& w : r.diagnostics.warnings) spdlog::warn("{}: {}", stem, w);
}

std::vector<std::string> default_plot_elements(const Network& net) {
  std::vector<std::string> ids;
  for (const auto& t : net.tanks()) ids.push_back(t.id);
  for (const auto& j : net.junctions()) ids.push_back(j.id);
  return ids;
}

Scheme scheme_from(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) throw Error(ErrorCategory::Usage, "unknown scheme '" + name + "'; expected lw, be, cn, moc or ltd");
  return *s;
}

int run_simulate(const CommonOptions& o, const std::string& scheme, bool dump, std::ostream& out) {
  auto in = load_inputs(o, true);
  if (!scheme.empty()) in.scenario.sim.scheme = scheme_from(scheme);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  RunOptions ro;
  if (dump) ro.dump_matrices = dir / "matrices";
  spdlog::info("simulating with {} at dt = {} s", to_string(in.scenario.sim.scheme), in.scenario.sim.dt);
  const auto result = run_simulation(in.net, in.schedule, in.scenario, ro);
  write_run(dir, in.net, result);
  if (!o.plot.empty()) render_plots(std::span(&result, 1), {o.plot, dir / "plots"});
  out << "wrote " << (dir / (std::string(to_string(result.scheme)) + ".csv")).string() << " ("
      << result.time.size() << " records, " << result.diagnostics.quality_steps << " quality steps)\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int run_compare(const CommonOptions& o, const std::string& schemes_text, std::ostream& out) {
  auto in = load_inputs(o, true);
  std::vector<Scheme> schemes;
  for (const auto& name : split_list(schemes_text)) {
    const Scheme s = scheme_from(name);
    if (s != Scheme::Lagrangian && std::find(schemes.begin(), schemes.end(), s) == schemes.end()) schemes.push_back(s);
  }
  if (schemes.empty()) throw Error(ErrorCategory::Usage, "--schemes needs at least one grid scheme besides ltd");
  const fs::path dir(o.out);
  fs::create_directories(dir);

  auto launch = [&](Scheme s) {
    return std::async(std::launch::async, [&in, s]() {
      Scenario sc = in.scenario;
      sc.sim.scheme = s;
      return run_simulation(in.net, in.schedule, sc);
    });
  };
  auto reference_future = launch(Scheme::Lagrangian);
  std::vector<std::future<SimulationResult>> futures;
  for (auto s : schemes) futures.push_back(launch(s));
  const SimulationResult reference = reference_future.get();
  std::vector<SimulationResult> models;
  for (auto& f : futures) models.push_back(f.get());

  write_run(dir, in.net, reference);
  for (const auto& m : models) write_run(dir, in.net, m);

  const auto rows = compare_results(reference, models);
  std::ostringstream csv;
  csv << "element_id,species,scheme,max_abs_rd\n" << std::setprecision(17);
  out << std::left << std::setw(12) << "element" << std::setw(9) << "species" << std::setw(8) << "scheme"
      << "max |RD|\n";
  for (const auto& r : rows) {
    csv << r.element << ',' << (index_of(r.species) + 1) << ',' << to_string(r.scheme) << ',';
    if (r.max_rd) csv << *r.max_rd;
    csv << '\n';
    std::ostringstream pct;
    if (r.max_rd) {
      pct << std::fixed << std::setprecision(2) << 100.0 * *r.max_rd << " %";
    } else {
      pct << "undefined";
    }
    out << std::left << std::setw(12) << r.element << std::setw(9) << (index_of(r.species) + 1) << std::setw(8)
        << to_string(r.scheme) << pct.str() << '\n';
  }
  write_file(dir / "rd_summary.csv", csv.str());

  std::vector<SimulationResult> all = models;
  all.push_back(reference);
  render_plots(all, {o.plot.empty() ? default_plot_elements(in.net) : o.plot, dir / "plots"});
  return 0;
}

int run_grid_info(const CommonOptions& o, std::ostream& out) {
  const auto net = load_network(o.network);
  const auto schedule = load_hydraulics(read_text_file(o.hydraulics), net);
  double dt = 0.0;
  if (o.dt) {
    dt = *o.dt;
  } else if (!o.scenario.empty()) {
    dt = parse_scenario(read_text_file(o.scenario)).sim.dt;
  } else {
    throw Error(ErrorCategory::Usage, "grid-info needs --dt or --scenario");
  }
  const auto grid = build_fixed_grid(net, schedule, dt);
  const auto field = courant_numbers(net, grid, schedule);
  const auto cfl = cfl_report(field);
  for (const auto& w : grid.warnings) spdlog::warn("{}", w);

  out << "dt = " << dt << " s, " << grid.total_segments << " pipe segments\n";
  out << std::left << std::setw(10) << "pipe" << std::setw(8) << "s" << std::setw(14) << "dx_m" << std::setw(14)
      << "courant_min" << "courant_max\n";
  for (std::size_t p = 0; p < net.pipes().size(); ++p) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& step : field.lambda) {
      if (step[p] > 0.0) lo = std::min(lo, step[p]);
      hi = std::max(hi, step[p]);
    }
    if (!std::isfinite(lo)) lo = 0.0;
    out << std::left << std::setw(10) << net.pipes()[p].id << std::setw(8) << grid.segments[p] << std::setw(14)
        << grid.segment_length[p] << std::setw(14) << lo << hi << '\n';
  }
  out << "CFL " << (cfl.pass ? "pass" : "FAIL") << ": " << cfl.violations.size() << " violations, "
      << cfl.stagnant.size() << " stagnant pipe-steps\n";
  for (const auto& v : cfl.violations) {
    out << "  violation: pipe " << net.pipes()[v.pipe].id << " step " << v.step << " courant " << v.lambda << '\n';
  }
  for (const auto& w : grid.warnings) out << "warning: " << w << '\n';
  return cfl.pass ? 0 : exit_code_for(static_cast<int>(ErrorCategory::Cfl));
}

int run_validate(const CommonOptions& o, std::ostream& out) {
  const auto net = load_network(o.network);
  out << "network: " << net.reservoirs().size() << " reservoirs, " << net.junctions().size() << " junctions, "
      << net.tanks().size() << " tanks, " << net.pipes().size() << " pipes, " << net.pumps().size() << " pumps, "
      << net.valves().size() << " valves, " << net.boosters().size() << " boosters\n";
  if (!o.hydraulics.empty()) {
    const auto schedule = load_hydraulics(read_text_file(o.hydraulics), net);
    out << "hydraulics: " << schedule.steps.size() << " steps, " << schedule.end_time() << " s\n";
    for (const auto& w : schedule.warnings) out << "warning: " << w << '\n';
  }
  if (!o.scenario.empty()) {
    const auto sc = parse_scenario(read_text_file(o.scenario));
    validate_scenario(sc, net);
    out << "scenario: ok\n";
  }
  out << "valid\n";
  return 0;
}

void add_io_options(CLI::App& cmd, CommonOptions& o, bool hydraulics_required) {
  cmd.add_option("--network", o.network, "Network file")->required()->check(CLI::ExistingFile);
  auto* h = cmd.add_option("--hydraulics", o.hydraulics, "Hydraulic time-series CSV")->check(CLI::ExistingFile);
  if (hydraulics_required) h->required();
  cmd.add_option("--scenario", o.scenario, "Scenario file")->check(CLI::ExistingFile);
  cmd.add_option("--dt", o.dt, "Quality time step, s (overrides the scenario)")->check(CLI::PositiveNumber);
}

void add_run_options(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--duration", o.duration, "Simulated duration, s")->check(CLI::PositiveNumber);
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_flag("--clamp-negative", o.clamp_negative, "Clamp negative concentrations to zero after each step");
  cmd.add_flag("--record-all", o.record_all, "Record every quality step instead of hydraulic boundaries");
  cmd.add_option("--plot", o.plot, "Elements to plot as SVG")->delimiter(',');
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (!spdlog::get("aquanet")) configure_logging();

  CLI::App app{"Multi-species water quality simulation on pipe networks", "aquanet"};
  app.require_subcommand(1);
  CommonOptions o;
  std::string scheme;
  std::string schemes = "lw,moc,ltd";
  bool dump = false;

  auto* simulate = app.add_subcommand("simulate", "Run one scheme and write CSV plus diagnostics");
  add_io_options(*simulate, o, true);
  add_run_options(*simulate, o);
  simulate->add_option("--scheme", scheme, "lw, be, cn, moc or ltd (overrides the scenario)");
  simulate->add_flag("--dump-matrices", dump, "Write E, A, B triplets per hydraulic step");

  auto* compare = app.add_subcommand("compare", "Run several schemes against the Lagrangian reference");
  add_io_options(*compare, o, true);
  add_run_options(*compare, o);
  compare->add_option("--schemes", schemes, "Comma-separated schemes; ltd is always the reference")->capture_default_str();

  auto* grid = app.add_subcommand("grid-info", "Print the segmentation and Courant numbers");
  add_io_options(*grid, o, true);

  auto* validate = app.add_subcommand("validate", "Check network, hydraulics and scenario files");
  add_io_options(*validate, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out, help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? 0 : exit_code_for(static_cast<int>(ErrorCategory::Usage));
  }

  try {
    if (*simulate) return run_simulate(o, scheme, dump, out);
    if (*compare) return run_compare(o, schemes, out);
    if (*grid) return run_grid_info(o, out);
    return run_validate(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.category()) << "]";
    if (!e.element().empty()) err << " element '" << e.element() << "'";
    err << ": " << e.what() << '\n';
    return exit_code_for(static_cast<int>(e.category()));
  } catch (const std::exception& e) {
    err << "error [internal]: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace aquanet::cli
