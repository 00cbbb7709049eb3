#include "aquanet/engine.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>

#include "aquanet/errors.hpp"
#include "aquanet/ltd.hpp"
#include "recorder.hpp"
#include "run_plan.hpp"
#include "text.hpp"

namespace aquanet {

namespace {

class ImplicitSolver {
 public:
  void factorize(const CsrMatrix& E) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(E.nnz());
    const auto rp = E.row_ptr();
    const auto ci = E.col_index();
    const auto v = E.values();
    for (std::size_t r = 0; r < E.rows(); ++r) {
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) {
        trip.emplace_back(static_cast<int>(r), static_cast<int>(ci[k]), v[k]);
      }
    }
    matrix_.resize(static_cast<Eigen::Index>(E.rows()), static_cast<Eigen::Index>(E.cols()));
    matrix_.setFromTriplets(trip.begin(), trip.end());
    matrix_.makeCompressed();
    lu_.analyzePattern(matrix_);
    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success) {
      throw Error(ErrorCategory::Solver, "E is singular: " + lu_.lastErrorMessage());
    }
  }

  void solve(std::span<const double> rhs, std::span<double> x) {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::VectorXd sol = lu_.solve(b);
    if (lu_.info() != Eigen::Success) throw Error(ErrorCategory::Solver, "sparse solve failed");
    std::copy(sol.data(), sol.data() + sol.size(), x.begin());
  }

 private:
  Eigen::SparseMatrix<double, Eigen::ColMajor> matrix_;
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>> lu_;
};

// rhs = A x + B u + f(x1, x2); then x_new = E^-1 rhs. Returns the residual.
double step_species(const StateSpaceSystem& sys, ImplicitSolver* solver, std::span<const double> x1,
                    std::span<const double> x2, std::span<const double> u, std::vector<double>& rhs,
                    std::vector<double>& x_new) {
  const auto& x = sys.species == Species::Chlorine ? x1 : x2;
  rhs.assign(x.size(), 0.0);
  sys.A.multiply_add(x, rhs);
  if (sys.B.cols() > 0) sys.B.multiply_add(u, rhs);
  sys.add_nonlinear(x1, x2, rhs);
  x_new.resize(x.size());
  if (sys.e_identity) {
    std::copy(rhs.begin(), rhs.end(), x_new.begin());
    return 0.0;
  }
  solver->solve(rhs, x_new);
  std::vector<double> check(x.size(), 0.0);
  sys.E.multiply_add(x_new, check);
  double residual = 0.0;
  for (std::size_t i = 0; i < check.size(); ++i) residual = std::max(residual, std::abs(check[i] - rhs[i]));
  if (!std::isfinite(residual)) throw Error(ErrorCategory::Solver, "linear solve produced non-finite values");
  return residual;
}

std::vector<double> reservoir_sources(const Network& net, const Scenario& sc, Species s) {
  std::vector<double> v(net.reservoirs().size(), 0.0);
  for (const auto& src : sc.sources) {
    if (src.species == s) v[net.at(src.node).index] = src.concentration;
  }
  return v;
}

SpeciesState regrid_state(const Network& net, const SpeciesState& old, std::shared_ptr<const StateLayout> layout) {
  SpeciesState next;
  next.layout = layout;
  next.t = old.t;
  next.orientation = old.orientation;
  const auto& from = *old.layout;
  const auto& to = *layout;
  for (auto s : {Species::Chlorine, Species::Reactant}) {
    const auto& src = old.values(s);
    auto& dst = next.values(s);
    dst.assign(to.size(), 0.0);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(from.pipes_begin()), dst.begin());
    for (std::size_t v = 0; v < net.valves().size(); ++v) dst[to.valve(v)] = src[from.valve(v)];
    for (std::size_t p = 0; p < to.pipe_count(); ++p) {
      const double mean = segment_average(std::span<const double>(src).subspan(from.first_segment(p), from.segments(p)));
      std::fill_n(dst.begin() + static_cast<std::ptrdiff_t>(to.first_segment(p)), to.segments(p), mean);
    }
  }
  return next;
}

void dump_system(const std::filesystem::path& dir, const StateSpaceSystem& sys, std::size_t phase, std::size_t step) {
  std::filesystem::create_directories(dir);
  const std::string stem = std::string(to_string(sys.scheme)) + "_p" + std::to_string(phase) + "_h" +
                           std::to_string(step) + "_s" + std::to_string(index_of(sys.species) + 1);
  for (const auto& [name, m] : {std::pair{"E", &sys.E}, std::pair{"A", &sys.A}, std::pair{"B", &sys.B}}) {
    std::ofstream out(dir / (stem + "_" + name + ".txt"));
    if (!out) throw Error(ErrorCategory::Io, "cannot write matrix dump into '" + dir.string() + "'");
    write_triplets(out, *m);
  }
}

}  // namespace

InputVector input_vector(const Scenario& scenario, const Network& net, double t) {
  const auto values = booster_values(scenario, net, t);
  InputVector u{std::vector<double>(values.size(), 0.0), std::vector<double>(values.size(), 0.0)};
  for (std::size_t b = 0; b < values.size(); ++b) {
    (net.boosters()[b].species == Species::Chlorine ? u.u1 : u.u2)[b] = values[b];
  }
  return u;
}

SpeciesState advance_step(const StateSpaceSystem* chlorine, const StateSpaceSystem* reactant,
                          const SpeciesState& state, const InputVector& u, double dt, double* residual) {
  SpeciesState next = state;
  next.t = state.t + dt;
  double worst = 0.0;
  std::vector<double> rhs;
  for (const auto* sys : {chlorine, reactant}) {
    if (!sys) continue;
    ImplicitSolver solver;
    if (!sys->e_identity) solver.factorize(sys->E);
    const auto& us = sys->species == Species::Chlorine ? u.u1 : u.u2;
    worst = std::max(worst, step_species(*sys, &solver, state.x1, state.x2, us, rhs, next.values(sys->species)));
  }
  if (residual) *residual = worst;
  return next;
}

SpeciesState apply_flow_reversal(const SpeciesState& state, std::span<const int> old_directions,
                                 std::span<const int> new_directions) {
  SpeciesState next = state;
  const auto& L = *state.layout;
  for (std::size_t p = 0; p < L.pipe_count(); ++p) {
    const int was = old_directions[p];
    const int now = new_directions[p];
    if (now == 0 || was == 0 || now == was) {
      if (now != 0) next.orientation[p] = now;
      continue;
    }
    for (auto* x : {&next.x1, &next.x2}) {
      const auto first = x->begin() + static_cast<std::ptrdiff_t>(L.first_segment(p));
      std::reverse(first, first + static_cast<std::ptrdiff_t>(L.segments(p)));
    }
    next.orientation[p] = now;
  }
  return next;
}

MeasurementMap build_measurement_map(const Network& net, const StateLayout& layout, std::span<const int> orientation,
                                     std::span<const SensorSpec> sensors, std::vector<std::string>* warnings) {
  MeasurementMap map;
  for (const auto& s : sensors) {
    const auto ref = net.at(s.element);
    std::size_t index = 0;
    if (ref.kind == ElementKind::Pipe) {
      const std::size_t n = layout.segments(ref.index);
      std::size_t k = s.segment.value_or(n);  // 1-based from the `from` end
      if (k > n) {
        if (warnings) {
          warnings->push_back("sensor '" + s.id + "' segment " + std::to_string(k) + " clamped to " +
                              std::to_string(n) + " on pipe '" + s.element + "'");
        }
        k = n;
      }
      const std::size_t offset = orientation[ref.index] >= 0 ? k - 1 : n - k;
      index = layout.segment(ref.index, offset);
    } else {
      index = layout.index_of(ref);
    }
    map.entries.push_back({s.id, s.species, index});
  }
  return map;
}

Measurements measure_outputs(const SpeciesState& state, const MeasurementMap& map) {
  Measurements y;
  for (const auto& e : map.entries) {
    (e.species == Species::Chlorine ? y.y1 : y.y2).push_back(state.values(e.species)[e.index]);
  }
  return y;
}

SpeciesState initial_state(const Network& net, std::shared_ptr<const StateLayout> layout, const Scenario& sc) {
  SpeciesState st;
  st.layout = layout;
  st.orientation.assign(net.pipes().size(), 1);
  const auto& L = *layout;
  for (auto s : {Species::Chlorine, Species::Reactant}) {
    auto& x = st.values(s);
    x.assign(L.size(), 0.0);
    if (!simulates(sc.sim.species, s)) continue;
    for (const auto& init : sc.initial) {
      if (init.species != s) continue;
      const auto ref = net.at(init.element);
      if (ref.kind == ElementKind::Pipe) {
        std::fill_n(x.begin() + static_cast<std::ptrdiff_t>(L.first_segment(ref.index)), L.segments(ref.index),
                    init.concentration);
      } else {
        x[L.index_of(ref)] = init.concentration;
      }
    }
    const auto src = reservoir_sources(net, sc, s);
    for (const auto& source : sc.sources) {
      if (source.species == s) x[L.reservoir(net.at(source.node).index)] = src[net.at(source.node).index];
    }
  }
  return st;
}

SimulationResult run_simulation(const Network& net, const HydraulicSchedule& schedule, const Scenario& scenario,
                                const RunOptions& options) {
  if (scenario.sim.scheme == Scheme::Lagrangian) return ltd_run(net, schedule, scenario, options);
  validate_scenario(scenario, net);
  const auto plan = detail::plan_run(schedule, scenario);
  const Scheme scheme = scenario.sim.scheme;
  const double dt = plan.dt;
  const bool record_all = scenario.sim.record == RecordMode::All;

  // Phase boundaries as hydraulic step indices.
  std::vector<std::size_t> cuts{0};
  for (double t : scenario.sim.regrid_at) {
    if (t <= 0.0 || t >= plan.end) continue;
    const auto it = std::find_if(schedule.steps.begin(), schedule.steps.end(),
                                 [&](const HydraulicStep& s) { return std::abs(s.start - t) <= 1e-9; });
    if (it == schedule.steps.end()) {
      throw Error(ErrorCategory::Usage, "regrid time " + detail::format_double(t) +
                                            " s is not a hydraulic step boundary");
    }
    cuts.push_back(static_cast<std::size_t>(it - schedule.steps.begin()));
  }
  std::size_t last_step = 0;
  while (last_step < plan.quality_steps.size() && plan.quality_steps[last_step] > 0) ++last_step;
  cuts.push_back(last_step);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Effective reaction model.
  ReactionParams params = scenario.reactions;
  std::optional<BulkModelSpec> bulk;
  if (!scenario.hybrid) bulk = BulkModelSpec{scenario.bulk_model, params};
  const DecayCoefficients decay = decay_coefficients(net, params);

  detail::Recorder rec(net, scheme, scenario.sim.species, !record_all);
  std::vector<SensorSeries> sensors;
  for (const auto& s : scenario.sensors) sensors.push_back({s.id, s.element, s.species, {}, {}});

  std::array<StateSpaceSystem, 2> systems;
  ImplicitSolver solver;
  std::vector<double> rhs;
  std::array<std::vector<double>, 2> x_new;
  SpeciesState state;
  std::shared_ptr<const StateLayout> layout;
  auto& diag = rec.result().diagnostics;
  const bool active[2] = {simulates(scenario.sim.species, Species::Chlorine),
                          simulates(scenario.sim.species, Species::Reactant)};

  auto observe = [&]() {
    for (auto s : {Species::Chlorine, Species::Reactant}) {
      if (!active[index_of(s)]) continue;
      const auto& x = state.values(s);
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      rec.observe_range(s, *lo, *hi);
    }
  };
  auto record = [&]() {
    const auto& L = *layout;
    rec.record(
        state.t,
        [&](ElementRef ref, Species s) {
          const auto& x = state.values(s);
          if (ref.kind != ElementKind::Pipe) return x[L.index_of(ref)];
          return segment_average(std::span<const double>(x).subspan(L.first_segment(ref.index), L.segments(ref.index)));
        },
        [&](std::size_t p) {
          PipeProfile prof;
          const double seg_len = net.pipes()[p].length / static_cast<double>(L.segments(p));
          const double vol = seg_len * std::acos(-1.0) * net.pipes()[p].radius * net.pipes()[p].radius;
          for (auto s : {Species::Chlorine, Species::Reactant}) {
            const auto& x = state.values(s);
            const auto first = x.begin() + static_cast<std::ptrdiff_t>(L.first_segment(p));
            prof.concentration[index_of(s)].assign(first, first + static_cast<std::ptrdiff_t>(L.segments(p)));
          }
          prof.volume.assign(L.segments(p), vol);
          return prof;
        });
  };
  MeasurementMap map;
  auto sense = [&]() {
    const auto y = measure_outputs(state, map);
    std::size_t i1 = 0, i2 = 0;
    for (std::size_t k = 0; k < map.entries.size(); ++k) {
      const double v = map.entries[k].species == Species::Chlorine ? y.y1[i1++] : y.y2[i2++];
      sensors[k].time.push_back(state.t);
      sensors[k].values.push_back(v);
    }
  };

  for (std::size_t phase = 0; phase + 1 < cuts.size(); ++phase) {
    const std::span<const HydraulicStep> steps(schedule.steps.data() + cuts[phase], cuts[phase + 1] - cuts[phase]);
    const auto grid = build_fixed_grid(net, steps, dt);
    for (const auto& w : grid.warnings) rec.warn(w);
    const auto field = courant_numbers(net, grid, steps);
    const auto cfl = cfl_report(field);
    for (auto v : cfl.violations) diag.cfl.violations.push_back({v.pipe, v.step + cuts[phase], v.lambda});
    for (auto v : cfl.stagnant) diag.cfl.stagnant.push_back({v.pipe, v.step + cuts[phase], v.lambda});
    diag.cfl.pass = diag.cfl.violations.empty();
    diag.segments = grid.segments;

    auto next_layout = std::make_shared<const StateLayout>(net, grid);
    if (phase == 0) {
      layout = next_layout;
      state = initial_state(net, layout, scenario);
      std::vector<std::string> warnings;
      map = build_measurement_map(net, *layout, state.orientation, scenario.sensors, &warnings);
      for (const auto& w : warnings) rec.warn(w);
      observe();
      record();
      sense();
    } else {
      state = regrid_state(net, state, next_layout);
      layout = next_layout;
      rec.warn("regridded at t = " + detail::format_double(state.t) + " s; pipe averages carried over");
    }

    for (std::size_t k = 0; k < steps.size(); ++k) {
      const std::size_t global_k = cuts[phase] + k;
      const auto& hyd = steps[k];
      state = apply_flow_reversal(state, state.orientation, field.direction[k]);
      {
        std::vector<std::string> warnings;
        map = build_measurement_map(net, *layout, state.orientation, scenario.sensors, &warnings);
        for (const auto& w : warnings) rec.warn(w);
      }
      StepContext ctx;
      ctx.net = &net;
      ctx.layout = layout.get();
      ctx.hydraulics = &hyd;
      ctx.courant = field.lambda[k];
      ctx.orientation = state.orientation;
      ctx.decay = &decay;
      ctx.kr = params.kr;
      ctx.dt = dt;
      ctx.bulk_model = bulk;

      const std::size_t nq = plan.quality_steps[global_k];
      for (std::size_t q = 0; q < nq; ++q) {
        ctx.t = hyd.start + static_cast<double>(q) * dt;
        const double t_next = hyd.start + static_cast<double>(q + 1) * dt;
        const auto u = input_vector(scenario, net, t_next);
        for (auto s : {Species::Chlorine, Species::Reactant}) {
          if (!active[index_of(s)]) continue;
          auto& sys = systems[index_of(s)];
          assemble(scheme, ctx, s, state.x1, state.x2, sys);
          for (std::size_t j : sys.stagnant_junctions) {
            rec.warn("junction '" + net.junctions()[j].id + "' has no outflow during the step starting at " +
                     detail::format_double(hyd.start) + " s; holding its concentration");
          }
          if (q == 0 && !sys.e_identity && s == (active[0] ? Species::Chlorine : Species::Reactant)) {
            solver.factorize(sys.E);  // E depends only on Courant numbers
          }
          if (q == 0 && options.dump_matrices) dump_system(*options.dump_matrices, sys, phase, global_k);
        }
        for (auto s : {Species::Chlorine, Species::Reactant}) {
          if (!active[index_of(s)]) continue;
          const auto& us = s == Species::Chlorine ? u.u1 : u.u2;
          const double res =
              step_species(systems[index_of(s)], &solver, state.x1, state.x2, us, rhs, x_new[index_of(s)]);
          diag.max_residual = std::max(diag.max_residual, res);
        }
        for (auto s : {Species::Chlorine, Species::Reactant}) {
          if (!active[index_of(s)]) continue;
          auto& x = state.values(s);
          x.swap(x_new[index_of(s)]);
          if (scenario.sim.clamp_negative) {
            for (double& v : x) v = std::max(v, 0.0);
          }
        }
        state.t = t_next;
        ++diag.quality_steps;
        observe();
        sense();
        if (options.observer) options.observer(state);
        if (record_all || q + 1 == nq) record();
      }
    }
  }

  auto result = rec.take();
  result.sensors = std::move(sensors);
  return result;
}

}  // namespace aquanet
