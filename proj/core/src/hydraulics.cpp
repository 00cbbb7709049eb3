#include "aquanet/hydraulics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

namespace {

constexpr double kTimeTolerance = 1e-9;
constexpr double kCourantSnap = 1e-9;

struct PendingStep {
  double start = 0.0;
  std::optional<double> duration;
  HydraulicStep values;
  std::vector<std::optional<double>> tank_volume_given;
};

std::string fmt_time(double t) { return detail::format_double(t) + " s"; }

}  // namespace

double HydraulicSchedule::end_time() const noexcept {
  return steps.empty() ? 0.0 : steps.back().start + steps.back().duration;
}

std::size_t HydraulicSchedule::step_index_at(double t) const {
  if (steps.empty()) throw Error(ErrorCategory::Hydraulics, "empty hydraulic schedule");
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    if (t < steps[k + 1].start - kTimeTolerance) return k;
  }
  return steps.size() - 1;
}

double mean_velocity(double q, double radius) noexcept { return q / (std::numbers::pi * radius * radius); }

double tank_net_inflow(const Network& net, const HydraulicStep& step, std::size_t tank) {
  const ElementRef node{ElementKind::Tank, tank};
  double net_in = -step.tank_demand[tank];
  for (const auto& link : net.incident_links(node)) {
    double q = 0.0;
    switch (link.kind) {
      case ElementKind::Pipe: q = step.pipe_flow[link.index]; break;
      case ElementKind::Pump: q = step.pump_flow[link.index]; break;
      case ElementKind::Valve: q = step.valve_flow[link.index]; break;
      default: break;
    }
    net_in += net.link_to(link) == node ? q : -q;
  }
  for (std::size_t b : net.boosters_at(node)) net_in += step.booster_flow[b];
  return net_in;
}

double tank_volume_at(const Network& net, const HydraulicStep& step, std::size_t tank, double t) {
  return step.tank_volume[tank] + tank_net_inflow(net, step, tank) * (t - step.start);
}

HydraulicSchedule load_hydraulics(std::string_view text, const Network& net) {
  HydraulicSchedule schedule;
  std::vector<PendingStep> pending;

  auto blank_step = [&]() {
    PendingStep p;
    if (!pending.empty()) {
      p.values = pending.back().values;  // piecewise-constant carry-forward
    } else {
      p.values.pipe_flow.assign(net.pipes().size(), 0.0);
      p.values.pump_flow.assign(net.pumps().size(), 0.0);
      p.values.valve_flow.assign(net.valves().size(), 0.0);
      p.values.junction_demand.assign(net.junctions().size(), 0.0);
      p.values.tank_volume.assign(net.tanks().size(), 0.0);
      p.values.tank_demand.assign(net.tanks().size(), 0.0);
      p.values.booster_flow.assign(net.boosters().size(), 0.0);
    }
    p.tank_volume_given.assign(net.tanks().size(), std::nullopt);
    return p;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto cols = detail::split_csv(line);
    if (!header_seen) {
      if (cols.size() != 4 || cols[0] != "time_s" || cols[1] != "element_id" || cols[2] != "quantity" ||
          cols[3] != "value") {
        detail::throw_parse(line_no, "hydraulics header must be 'time_s,element_id,quantity,value'");
      }
      header_seen = true;
      continue;
    }
    if (cols.size() != 4) detail::throw_parse(line_no, "expected 4 columns");

    const double t = detail::parse_double(cols[0], line_no, "time_s");
    if (pending.empty() || std::abs(pending.back().start - t) > kTimeTolerance) {
      if (!pending.empty() && t < pending.back().start) {
        detail::throw_parse(line_no, "step start " + fmt_time(t) + " precedes the previous step; rows must be grouped by increasing time");
      }
      pending.push_back(blank_step());
      pending.back().start = t;
    }
    auto& step = pending.back();
    const std::string& id = cols[1];
    const std::string& quantity = cols[2];
    const double value = detail::parse_double(cols[3], line_no, "value");

    if (id == "*") {
      if (quantity != "duration_s") detail::throw_parse(line_no, "only duration_s may target '*'");
      if (!(value > 0.0)) {
        throw Error(ErrorCategory::Hydraulics, "step at " + fmt_time(t) + " has nonpositive duration");
      }
      step.duration = value;
      continue;
    }

    const auto ref = net.find(id);
    if (!ref) {
      throw Error(ErrorCategory::Hydraulics, "line " + std::to_string(line_no) + ": unknown element '" + id + "'", id);
    }
    auto bad_quantity = [&]() {
      throw Error(ErrorCategory::Hydraulics,
                  "line " + std::to_string(line_no) + ": quantity '" + quantity + "' does not apply to " +
                      std::string(to_string(ref->kind)) + " '" + id + "'",
                  id);
    };
    if (!std::isfinite(value)) bad_quantity();

    if (quantity == "flow_m3s") {
      switch (ref->kind) {
        case ElementKind::Pipe: step.values.pipe_flow[ref->index] = value; break;
        case ElementKind::Pump: step.values.pump_flow[ref->index] = value; break;
        case ElementKind::Valve: step.values.valve_flow[ref->index] = value; break;
        case ElementKind::Booster:
          if (value < 0.0) throw Error(ErrorCategory::Hydraulics, "booster flow must be nonnegative", id);
          step.values.booster_flow[ref->index] = value;
          break;
        default: bad_quantity();
      }
    } else if (quantity == "demand_m3s") {
      if (value < 0.0) throw Error(ErrorCategory::Hydraulics, "demand must be nonnegative", id);
      if (ref->kind == ElementKind::Junction) {
        step.values.junction_demand[ref->index] = value;
      } else if (ref->kind == ElementKind::Tank) {
        step.values.tank_demand[ref->index] = value;
      } else {
        bad_quantity();
      }
    } else if (quantity == "tank_volume_m3") {
      if (ref->kind != ElementKind::Tank) bad_quantity();
      step.tank_volume_given[ref->index] = value;
    } else {
      detail::throw_parse(line_no, "unknown quantity '" + quantity + "'", id);
    }
  }

  if (pending.empty()) throw Error(ErrorCategory::Hydraulics, "hydraulics file contains no steps");
  if (std::abs(pending.front().start) > kTimeTolerance) {
    throw Error(ErrorCategory::Hydraulics, "first hydraulic step must start at 0 s, found " + fmt_time(pending.front().start));
  }

  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto& p = pending[k];
    const bool last = k + 1 == pending.size();
    if (!last) {
      const double next = pending[k + 1].start;
      if (p.duration) {
        const double end = p.start + *p.duration;
        if (end < next - kTimeTolerance) {
          throw Error(ErrorCategory::Hydraulics,
                      "time gap between " + fmt_time(end) + " and " + fmt_time(next) + " at step boundary " + fmt_time(end));
        }
        if (end > next + kTimeTolerance) {
          throw Error(ErrorCategory::Hydraulics,
                      "step starting at " + fmt_time(p.start) + " overlaps the next step at boundary " + fmt_time(next));
        }
      }
      p.duration = next - p.start;
    } else if (!p.duration) {
      if (k == 0) {
        throw Error(ErrorCategory::Hydraulics, "a single hydraulic step needs an explicit '*,duration_s' row");
      }
      p.duration = pending[k - 1].duration;
    }
    p.values.start = p.start;
    p.values.duration = *p.duration;
  }

  // Tank volumes: initial value from the file (or the topology), the rest
  // recomputed so that every step is exactly mass-consistent.
  for (std::size_t i = 0; i < net.tanks().size(); ++i) {
    const auto& tank = net.tanks()[i];
    double v = pending.front().tank_volume_given[i].value_or(tank.initial_volume);
    for (std::size_t k = 0; k < pending.size(); ++k) {
      auto& step = pending[k].values;
      if (const auto given = pending[k].tank_volume_given[i]; given && k > 0) {
        if (std::abs(*given - v) > 0.01 * std::max(std::abs(v), 1e-12)) {
          schedule.warnings.push_back("tank '" + tank.id + "' volume at " + fmt_time(step.start) + " given as " +
                                      detail::format_double(*given) + " m3 but flows imply " + detail::format_double(v) +
                                      " m3");
        }
      }
      step.tank_volume[i] = v;
      const double v_end = v + tank_net_inflow(net, step, i) * step.duration;
      for (double probe : {v, v_end}) {
        if (probe < tank.min_volume - 1e-9 * tank.max_volume || probe > tank.max_volume + 1e-9 * tank.max_volume) {
          throw Error(ErrorCategory::Hydraulics,
                      "tank '" + tank.id + "' volume " + detail::format_double(probe) + " m3 leaves [" +
                          detail::format_double(tank.min_volume) + ", " + detail::format_double(tank.max_volume) +
                          "] during the step starting at " + fmt_time(step.start),
                      tank.id);
        }
      }
      v = v_end;
    }
  }

  schedule.steps.reserve(pending.size());
  for (auto& p : pending) schedule.steps.push_back(std::move(p.values));
  return schedule;
}

void check_step_divisibility(const HydraulicSchedule& schedule, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCategory::Grid, "quality time step must be positive");
  for (const auto& step : schedule.steps) {
    const double n = step.duration / dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0) {
      throw Error(ErrorCategory::Hydraulics, "quality step " + detail::format_double(dt) +
                                                 " s does not divide the hydraulic step starting at " +
                                                 fmt_time(step.start) + " (duration " + fmt_time(step.duration) + ")");
    }
  }
}

DiscretizationGrid build_fixed_grid(const Network& net, std::span<const HydraulicStep> steps, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCategory::Grid, "quality time step must be positive, got " + detail::format_double(dt));
  DiscretizationGrid grid;
  grid.dt = dt;
  for (std::size_t i = 0; i < net.pipes().size(); ++i) {
    const auto& pipe = net.pipes()[i];
    double vmax = 0.0;
    for (const auto& step : steps) vmax = std::max(vmax, std::abs(mean_velocity(step.pipe_flow[i], pipe.radius)));
    std::size_t s = 1;
    if (vmax == 0.0) {
      grid.warnings.push_back("pipe '" + pipe.id + "' is stagnant over every step; using one segment");
    } else {
      // Guard so that exact ratios like 100 / (1 * 5) do not floor to 19.
      const double ratio = pipe.length / (vmax * dt);
      const double n = std::floor(ratio * (1.0 + 1e-12));
      if (n < 1.0) {
        grid.warnings.push_back("pipe '" + pipe.id + "' is shorter than one quality step of travel (L/(v dt) = " +
                                detail::format_double(ratio) + "); clamped to one segment");
      } else {
        s = static_cast<std::size_t>(n);
      }
    }
    grid.segments.push_back(s);
    grid.segment_length.push_back(pipe.length / static_cast<double>(s));
    grid.total_segments += s;
  }
  return grid;
}

DiscretizationGrid build_fixed_grid(const Network& net, const HydraulicSchedule& schedule, double dt) {
  return build_fixed_grid(net, std::span<const HydraulicStep>(schedule.steps), dt);
}

CourantField courant_numbers(const Network& net, const DiscretizationGrid& grid, std::span<const HydraulicStep> steps) {
  CourantField field;
  for (const auto& step : steps) {
    auto& lam = field.lambda.emplace_back(net.pipes().size(), 0.0);
    auto& dir = field.direction.emplace_back(net.pipes().size(), 0);
    for (std::size_t i = 0; i < net.pipes().size(); ++i) {
      const double v = mean_velocity(step.pipe_flow[i], net.pipes()[i].radius);
      double l = std::abs(v) * grid.dt / grid.segment_length[i];
      if (l > 1.0 && l <= 1.0 + kCourantSnap) l = 1.0;
      lam[i] = l;
      dir[i] = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    }
  }
  return field;
}

CourantField courant_numbers(const Network& net, const DiscretizationGrid& grid, const HydraulicSchedule& schedule) {
  return courant_numbers(net, grid, std::span<const HydraulicStep>(schedule.steps));
}

CflReport cfl_report(const CourantField& field) {
  CflReport report;
  for (std::size_t k = 0; k < field.lambda.size(); ++k) {
    for (std::size_t i = 0; i < field.lambda[k].size(); ++i) {
      const double l = field.lambda[k][i];
      if (l > 1.0) report.violations.push_back({i, k, l});
      if (l == 0.0) report.stagnant.push_back({i, k, l});
    }
  }
  report.pass = report.violations.empty();
  return report;
}

}  // namespace aquanet
