#include "aquanet/ltd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aquanet/errors.hpp"
#include "recorder.hpp"
#include "run_plan.hpp"
#include "text.hpp"

namespace aquanet {

double LtdPipeState::volume() const noexcept {
  double v = 0.0;
  for (const auto& s : segments) v += s.volume;
  return v;
}

Concentrations LtdPipeState::mass() const noexcept {
  Concentrations m{0.0, 0.0};
  for (const auto& s : segments) {
    m[0] += s.c[0] * s.volume;
    m[1] += s.c[1] * s.volume;
  }
  return m;
}

Concentrations LtdPipeState::mean() const noexcept {
  const double v = volume();
  if (v <= 0.0) return {0.0, 0.0};
  auto m = mass();
  return {m[0] / v, m[1] / v};
}

void ltd_react(LtdPipeState& pipe, const LtdReaction& r) {
  for (auto& s : pipe.segments) {
    const double c1 = s.c[0];
    const double c2 = s.c[1];
    double r1 = decay_rate_term(c1, r.kp) + mutual_rate_term(c1, c2, r.kr);
    double r2 = mutual_rate_term(c2, c1, r.kr);
    if (r.bulk_model) {
      const auto b = bulk_model_rate(*r.bulk_model, c1, c2);
      r1 += b[0];
      r2 += b[1];
    }
    s.c[0] = c1 + r.dt * r1;
    s.c[1] = c2 + r.dt * r2;
  }
}

Concentrations ltd_emit(LtdPipeState& pipe, double volume, std::string_view pipe_id) {
  Concentrations mass{0.0, 0.0};
  const double total = pipe.volume();
  if (volume > total * (1.0 + 1e-9)) {
    throw Error(ErrorCategory::Cfl,
                "flow through pipe '" + std::string(pipe_id) + "' in one step (" + detail::format_double(volume) +
                    " m3) exceeds its volume (" + detail::format_double(total) + " m3); reduce the time step",
                std::string(pipe_id));
  }
  double remaining = volume;
  while (remaining > 0.0 && !pipe.segments.empty()) {
    auto& last = pipe.segments.back();
    const double take = std::min(remaining, last.volume);
    mass[0] += last.c[0] * take;
    mass[1] += last.c[1] * take;
    remaining -= take;
    if (take >= last.volume) {
      pipe.segments.pop_back();
    } else {
      last.volume -= take;
    }
  }
  return mass;
}

namespace {

void absorb(LtdSegment& into, double volume, const Concentrations& c) {
  const double v = into.volume + volume;
  for (std::size_t s = 0; s < 2; ++s) into.c[s] = (into.c[s] * into.volume + c[s] * volume) / v;
  into.volume = v;
}

}  // namespace

void ltd_admit(LtdPipeState& pipe, double volume, const Concentrations& upstream, double tau_adj,
               std::size_t max_segments) {
  if (volume <= 0.0) return;
  if (!pipe.segments.empty()) {
    auto& first = pipe.segments.front();
    if (std::abs(first.c[0] - upstream[0]) <= tau_adj && std::abs(first.c[1] - upstream[1]) <= tau_adj) {
      absorb(first, volume, upstream);
      return;
    }
  }
  pipe.segments.push_front({volume, upstream});
  while (pipe.segments.size() > std::max<std::size_t>(max_segments, 1)) {
    std::size_t best = 0;
    double best_volume = INFINITY;
    for (std::size_t i = 0; i + 1 < pipe.segments.size(); ++i) {
      const double v = pipe.segments[i].volume + pipe.segments[i + 1].volume;
      if (v < best_volume) {
        best_volume = v;
        best = i;
      }
    }
    const auto next = pipe.segments[best + 1];
    absorb(pipe.segments[best], next.volume, next.c);
    pipe.segments.erase(pipe.segments.begin() + static_cast<std::ptrdiff_t>(best + 1));
  }
}

LtdStepResult ltd_pipe_step(LtdPipeState pipe, double inflow_volume, const Concentrations& upstream, double tau_adj,
                            const LtdReaction& reaction, std::size_t max_segments, std::string_view pipe_id) {
  LtdStepResult out;
  ltd_react(pipe, reaction);
  out.outflow_mass = ltd_emit(pipe, inflow_volume, pipe_id);
  ltd_admit(pipe, inflow_volume, upstream, tau_adj, max_segments);
  out.pipe = std::move(pipe);
  return out;
}

namespace {

double flow_of(const HydraulicStep& step, ElementRef link) {
  switch (link.kind) {
    case ElementKind::Pipe: return step.pipe_flow[link.index];
    case ElementKind::Pump: return step.pump_flow[link.index];
    case ElementKind::Valve: return step.valve_flow[link.index];
    default: return 0.0;
  }
}

struct NodeValues {
  std::vector<Concentrations> reservoir, junction, tank, pump, valve;

  std::vector<Concentrations>& of(ElementKind kind) {
    switch (kind) {
      case ElementKind::Reservoir: return reservoir;
      case ElementKind::Junction: return junction;
      case ElementKind::Tank: return tank;
      case ElementKind::Pump: return pump;
      default: return valve;
    }
  }
  const Concentrations& at(ElementRef ref) { return of(ref.kind)[ref.index]; }
};

}  // namespace

SimulationResult ltd_run(const Network& net, const HydraulicSchedule& schedule, const Scenario& scenario,
                         const RunOptions&) {
  validate_scenario(scenario, net);
  const auto plan = detail::plan_run(schedule, scenario);
  const double dt = plan.dt;
  const bool record_all = scenario.sim.record == RecordMode::All;
  const bool active[2] = {simulates(scenario.sim.species, Species::Chlorine),
                          simulates(scenario.sim.species, Species::Reactant)};
  const ReactionParams& params = scenario.reactions;
  std::optional<BulkModelSpec> bulk;
  if (!scenario.hybrid) bulk = BulkModelSpec{scenario.bulk_model, params};
  const DecayCoefficients decay = decay_coefficients(net, params);

  // Initial values.
  NodeValues nodes;
  nodes.reservoir.assign(net.reservoirs().size(), {0.0, 0.0});
  nodes.junction.assign(net.junctions().size(), {0.0, 0.0});
  nodes.tank.assign(net.tanks().size(), {0.0, 0.0});
  nodes.pump.assign(net.pumps().size(), {0.0, 0.0});
  nodes.valve.assign(net.valves().size(), {0.0, 0.0});
  std::vector<Concentrations> pipe_init(net.pipes().size(), {0.0, 0.0});
  for (const auto& init : scenario.initial) {
    if (!active[index_of(init.species)]) continue;
    const auto ref = net.at(init.element);
    auto& target = ref.kind == ElementKind::Pipe ? pipe_init[ref.index] : nodes.of(ref.kind)[ref.index];
    target[index_of(init.species)] = init.concentration;
  }
  for (const auto& src : scenario.sources) {
    if (active[index_of(src.species)]) nodes.reservoir[net.at(src.node).index][index_of(src.species)] = src.concentration;
  }
  std::vector<LtdPipeState> pipes(net.pipes().size());
  std::vector<double> pipe_volume(net.pipes().size());
  std::vector<int> orientation(net.pipes().size(), 1);
  for (std::size_t p = 0; p < pipes.size(); ++p) {
    const auto& spec = net.pipes()[p];
    pipe_volume[p] = std::numbers::pi * spec.radius * spec.radius * spec.length;
    pipes[p].segments.push_back({pipe_volume[p], pipe_init[p]});
  }

  detail::Recorder rec(net, Scheme::Lagrangian, scenario.sim.species, !record_all);
  auto& diag = rec.result().diagnostics;
  std::vector<SensorSeries> sensors;
  for (const auto& s : scenario.sensors) sensors.push_back({s.id, s.element, s.species, {}, {}});

  double t = 0.0;
  auto pipe_segment_at_to = [&](std::size_t p) -> const LtdSegment& {
    return orientation[p] >= 0 ? pipes[p].segments.back() : pipes[p].segments.front();
  };
  auto observe = [&]() {
    auto see = [&](const Concentrations& c) {
      for (auto s : {Species::Chlorine, Species::Reactant}) {
        if (active[index_of(s)]) rec.observe_range(s, c[index_of(s)], c[index_of(s)]);
      }
    };
    for (auto* v : {&nodes.reservoir, &nodes.junction, &nodes.tank, &nodes.pump, &nodes.valve}) {
      for (const auto& c : *v) see(c);
    }
    for (const auto& p : pipes) {
      for (const auto& seg : p.segments) see(seg.c);
    }
  };
  auto record = [&]() {
    rec.record(
        t,
        [&](ElementRef ref, Species s) {
          if (ref.kind == ElementKind::Pipe) return pipes[ref.index].mean()[index_of(s)];
          return nodes.at(ref)[index_of(s)];
        },
        [&](std::size_t p) {
          PipeProfile prof;
          for (const auto& seg : pipes[p].segments) {
            prof.concentration[0].push_back(seg.c[0]);
            prof.concentration[1].push_back(seg.c[1]);
            prof.volume.push_back(seg.volume);
          }
          return prof;
        });
  };
  auto sense = [&]() {
    for (std::size_t k = 0; k < scenario.sensors.size(); ++k) {
      const auto& spec = scenario.sensors[k];
      const auto ref = net.at(spec.element);
      const std::size_t s = index_of(spec.species);
      double v = 0.0;
      if (ref.kind == ElementKind::Pipe) {
        v = spec.segment ? pipes[ref.index].mean()[s] : pipe_segment_at_to(ref.index).c[s];
      } else {
        v = nodes.at(ref)[s];
      }
      sensors[k].time.push_back(t);
      sensors[k].values.push_back(v);
    }
  };

  observe();
  record();
  sense();

  std::vector<Concentrations> inflow_mass_j(net.junctions().size());
  std::vector<Concentrations> inflow_mass_k(net.tanks().size());
  for (std::size_t h = 0; h < schedule.steps.size(); ++h) {
    const std::size_t nq = plan.quality_steps[h];
    if (nq == 0) break;
    const auto& step = schedule.steps[h];

    // Orientation follows the flow sign; stagnant pipes keep theirs.
    for (std::size_t p = 0; p < pipes.size(); ++p) {
      const double q = step.pipe_flow[p];
      const int dir = q > 0.0 ? 1 : (q < 0.0 ? -1 : 0);
      if (dir != 0 && dir != orientation[p]) {
        std::reverse(pipes[p].segments.begin(), pipes[p].segments.end());
        orientation[p] = dir;
      }
    }

    for (std::size_t q = 0; q < nq; ++q) {
      const double t0 = step.start + static_cast<double>(q) * dt;
      const double t1 = step.start + static_cast<double>(q + 1) * dt;
      const auto booster = booster_values(scenario, net, t1);
      std::fill(inflow_mass_j.begin(), inflow_mass_j.end(), Concentrations{0.0, 0.0});
      std::fill(inflow_mass_k.begin(), inflow_mass_k.end(), Concentrations{0.0, 0.0});

      // React and emit.
      for (std::size_t p = 0; p < pipes.size(); ++p) {
        const double kp = decay.pipe[p] - (bulk ? params.kb : 0.0);
        ltd_react(pipes[p], {active[0] ? kp : 0.0, params.kr, dt, bulk});
        const double flow = step.pipe_flow[p];
        if (flow == 0.0) continue;
        const auto mass = ltd_emit(pipes[p], std::abs(flow) * dt, net.pipes()[p].id);
        const ElementRef link{ElementKind::Pipe, p};
        const ElementRef down = flow > 0.0 ? net.link_to(link) : net.link_from(link);
        auto* sink = down.kind == ElementKind::Junction ? &inflow_mass_j[down.index]
                     : down.kind == ElementKind::Tank   ? &inflow_mass_k[down.index]
                                                        : nullptr;
        if (sink) {
          (*sink)[0] += mass[0];
          (*sink)[1] += mass[1];
        }
      }

      // Mix nodes. Pump and valve values are those of time t0.
      NodeValues next = nodes;
      auto add_link_inflows = [&](ElementRef node, Concentrations& mass, double& outflow) {
        for (const auto& link : net.incident_links(node)) {
          const double flow = flow_of(step, link);
          if (flow == 0.0) continue;
          const bool into = (flow > 0.0) == (net.link_to(link) == node);
          if (!into) {
            outflow += std::abs(flow);
          } else if (link.kind != ElementKind::Pipe) {
            const auto& c = nodes.at(link);
            mass[0] += std::abs(flow) * dt * c[0];
            mass[1] += std::abs(flow) * dt * c[1];
          }
        }
        for (std::size_t b : net.boosters_at(node)) {
          mass[index_of(net.boosters()[b].species)] += step.booster_flow[b] * dt * booster[b];
        }
      };
      for (std::size_t j = 0; j < net.junctions().size(); ++j) {
        const ElementRef node{ElementKind::Junction, j};
        Concentrations mass = inflow_mass_j[j];
        double outflow = 0.0;
        add_link_inflows(node, mass, outflow);
        const double denom = (step.junction_demand[j] + outflow) * dt;
        if (denom <= 0.0) {
          rec.warn("junction '" + net.junctions()[j].id + "' has no outflow during the step starting at " +
                   detail::format_double(step.start) + " s; holding its concentration");
          continue;
        }
        for (std::size_t s = 0; s < 2; ++s) next.junction[j][s] = active[s] ? mass[s] / denom : 0.0;
      }
      for (std::size_t k = 0; k < net.tanks().size(); ++k) {
        const ElementRef node{ElementKind::Tank, k};
        Concentrations mass = inflow_mass_k[k];
        double outflow = 0.0;
        add_link_inflows(node, mass, outflow);
        outflow += step.tank_demand[k];
        const double v0 = tank_volume_at(net, step, k, t0);
        const double v1 = tank_volume_at(net, step, k, t1);
        const std::string& id = net.tanks()[k].id;
        if (!(v1 > 0.0)) throw Error(ErrorCategory::MassBalance, "tank '" + id + "' volume is not positive", id);
        if (v0 - outflow * dt < 0.0) {
          throw Error(ErrorCategory::MassBalance,
                      "tank '" + id + "' drains more than its content in one quality step; reduce the time step", id);
        }
        const auto& c = nodes.tank[k];
        double r1 = -decay.tank[k] * c[0] + mutual_rate_term(c[0], c[1], params.kr);
        double r2 = mutual_rate_term(c[1], c[0], params.kr);
        if (bulk) {
          const auto b = bulk_model_rate(*bulk, c[0], c[1]);
          r1 = b[0];
          r2 = b[1];
        }
        const Concentrations rate{r1, r2};
        for (std::size_t s = 0; s < 2; ++s) {
          next.tank[k][s] = active[s] ? (v0 * c[s] + dt * v0 * rate[s] - outflow * dt * c[s] + mass[s]) / v1 : 0.0;
        }
      }
      for (std::size_t m = 0; m < net.pumps().size(); ++m) {
        const ElementRef link{ElementKind::Pump, m};
        next.pump[m] = nodes.at(step.pump_flow[m] >= 0.0 ? net.link_from(link) : net.link_to(link));
      }
      for (std::size_t v = 0; v < net.valves().size(); ++v) {
        const ElementRef link{ElementKind::Valve, v};
        next.valve[v] = nodes.at(step.valve_flow[v] >= 0.0 ? net.link_from(link) : net.link_to(link));
      }
      nodes = std::move(next);

      // Admit at the upstream end with the freshly mixed node value.
      for (std::size_t p = 0; p < pipes.size(); ++p) {
        const double flow = step.pipe_flow[p];
        if (flow == 0.0) continue;
        const ElementRef link{ElementKind::Pipe, p};
        const ElementRef up = flow > 0.0 ? net.link_from(link) : net.link_to(link);
        ltd_admit(pipes[p], std::abs(flow) * dt, nodes.at(up), scenario.sim.tau_adj, scenario.sim.ltd_max_segments);
      }

      if (scenario.sim.clamp_negative) {
        for (auto* v : {&nodes.junction, &nodes.tank, &nodes.pump, &nodes.valve}) {
          for (auto& c : *v) c = {std::max(c[0], 0.0), std::max(c[1], 0.0)};
        }
        for (auto& p : pipes) {
          for (auto& seg : p.segments) seg.c = {std::max(seg.c[0], 0.0), std::max(seg.c[1], 0.0)};
        }
      }
      t = t1;
      ++diag.quality_steps;
      observe();
      sense();
      if (record_all || q + 1 == nq) record();
    }
  }

  diag.segments.clear();
  for (const auto& p : pipes) diag.segments.push_back(p.segments.size());
  auto result = rec.take();
  result.sensors = std::move(sensors);
  return result;
}

}  // namespace aquanet
