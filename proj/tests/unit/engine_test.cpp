#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "aquanet/analysis.hpp"
#include "aquanet/engine.hpp"
#include "aquanet/errors.hpp"
#include "test_support.hpp"

using namespace aquanet;

namespace {

struct Fixture {
  Network net;
  HydraulicSchedule schedule;
  Scenario scenario;
};

Fixture three_node_fixture() {
  Network net(parse_network(read_text_file(fixtures::data_path("three_node.net"))));
  auto sched = load_hydraulics(read_text_file(fixtures::data_path("three_node.hyd.csv")), net);
  auto sc = parse_scenario(read_text_file(fixtures::data_path("three_node.scn")));
  return {std::move(net), std::move(sched), std::move(sc)};
}

Scenario single_pipe_scenario(double source, double initial) {
  Scenario sc;
  sc.sources.push_back({"R", Species::Chlorine, source});
  sc.initial.push_back({"P", Species::Chlorine, initial});
  sc.initial.push_back({"J", Species::Chlorine, initial});
  sc.sim.species = SpeciesMode::Chlorine;
  return sc;
}

}  // namespace

TEST(InitialState, SourcesAndOverrides) {
  const auto f = three_node_fixture();
  const auto grid = build_fixed_grid(f.net, f.schedule, 100.0);
  auto layout = std::make_shared<const StateLayout>(f.net, grid);
  const auto st = initial_state(f.net, layout, f.scenario);
  EXPECT_EQ(st.x1[layout->reservoir(0)], 1.5);
  EXPECT_EQ(st.x2[layout->reservoir(0)], 0.2);
  EXPECT_EQ(st.x1[layout->pump(0)], 1.5);
  EXPECT_EQ(st.x1[layout->tank(0)], 1.0);
  for (std::size_t s = 0; s < layout->segments(0); ++s) {
    EXPECT_EQ(st.x1[layout->segment(0, s)], 1.0);
    EXPECT_EQ(st.x2[layout->segment(0, s)], 0.0);
  }
  EXPECT_EQ(st.orientation, std::vector<int>{1});
}

TEST(InputVector, RoutesBoostersBySpecies) {
  const auto f = three_node_fixture();
  const auto u = input_vector(f.scenario, f.net, 0.0);
  EXPECT_EQ(u.u1, std::vector<double>{2.0});
  EXPECT_EQ(u.u2, std::vector<double>{0.0});
  EXPECT_EQ(input_vector(f.scenario, f.net, 3600.0).u1, std::vector<double>{1.0});
}

TEST(AdvanceStep, JunctionTakesTheMixedInflow) {
  const auto f = three_node_fixture();
  const auto grid = build_fixed_grid(f.net, f.schedule, 100.0);
  auto layout = std::make_shared<const StateLayout>(f.net, grid);
  const auto field = courant_numbers(f.net, grid, f.schedule);
  const auto decay = decay_coefficients(f.net, f.scenario.reactions);
  auto st = initial_state(f.net, layout, f.scenario);
  StepContext ctx;
  ctx.net = &f.net;
  ctx.layout = layout.get();
  ctx.hydraulics = &f.schedule.steps[0];
  ctx.courant = field.lambda[0];
  ctx.orientation = st.orientation;
  ctx.decay = &decay;
  ctx.kr = f.scenario.reactions.kr;
  ctx.dt = 100.0;
  for (auto scheme : {Scheme::LaxWendroff, Scheme::BackwardEuler, Scheme::CrankNicolson, Scheme::Characteristics}) {
    StateSpaceSystem s1, s2;
    assemble(scheme, ctx, Species::Chlorine, st.x1, st.x2, s1);
    assemble(scheme, ctx, Species::Reactant, st.x1, st.x2, s2);
    double residual = -1.0;
    const auto next = advance_step(&s1, &s2, st, input_vector(f.scenario, f.net, 100.0), 100.0, &residual);
    // Pump inflow 0.03 carrying 1.5 leaves as demand 0.005 plus pipe 0.025.
    EXPECT_DOUBLE_EQ(next.x1[layout->junction(0)], 0.03 * 1.5 / (0.005 + 0.025)) << to_string(scheme);
    EXPECT_DOUBLE_EQ(next.x1[layout->pump(0)], 1.5);
    EXPECT_EQ(next.x1[layout->reservoir(0)], 1.5);
    EXPECT_DOUBLE_EQ(next.t, 100.0);
    EXPECT_LT(residual, 1e-10);
    EXPECT_GE(residual, 0.0);
  }
  // A null system leaves that species untouched.
  StateSpaceSystem s1;
  assemble_lw(ctx, Species::Chlorine, s1);
  const auto next = advance_step(&s1, nullptr, st, input_vector(f.scenario, f.net, 100.0), 100.0);
  EXPECT_EQ(next.x2, st.x2);
}

TEST(FlowReversal, ReversesOnlyFlippedPipes) {
  NetworkTopology t;
  t.reservoirs.push_back({"R"});
  t.junctions.push_back({"J"});
  t.pipes.push_back({"A", "R", "J", 30.0, 0.1});
  t.pipes.push_back({"B", "R", "J", 30.0, 0.1});
  const Network net(t);
  DiscretizationGrid grid;
  grid.segments = {3, 3};
  auto layout = std::make_shared<const StateLayout>(net, grid);
  SpeciesState st;
  st.layout = layout;
  st.orientation = {1, 1};
  st.x1 = {0, 0, 1, 2, 3, 4, 5, 6};
  st.x2 = st.x1;
  const std::vector<int> before{1, 1};
  const auto flipped = apply_flow_reversal(st, before, std::vector<int>{-1, 1});
  EXPECT_EQ(flipped.x1, (std::vector<double>{0, 0, 3, 2, 1, 4, 5, 6}));
  EXPECT_EQ(flipped.x2, flipped.x1);
  EXPECT_EQ(flipped.orientation, (std::vector<int>{-1, 1}));
  const auto stagnant = apply_flow_reversal(st, before, std::vector<int>{0, 0});
  EXPECT_EQ(stagnant.x1, st.x1);
  EXPECT_EQ(stagnant.orientation, (std::vector<int>{1, 1}));
  // Reversing twice restores the state.
  const auto back = apply_flow_reversal(flipped, flipped.orientation, before);
  EXPECT_EQ(back.x1, st.x1);
}

TEST(MeasurementMap, SegmentsCountFromTheFromEnd) {
  const auto fixture = fixtures::single_pipe(100.0, 0.1, 1.0, 100.0);
  DiscretizationGrid grid;
  grid.segments = {4};
  const StateLayout layout(fixture.net, grid);
  const std::vector<SensorSpec> sensors{{"a", "P", Species::Chlorine, std::nullopt},
                                        {"b", "P", Species::Reactant, 2},
                                        {"c", "P", Species::Chlorine, 9},
                                        {"d", "J", Species::Chlorine, std::nullopt}};
  std::vector<std::string> warnings;
  auto map = build_measurement_map(fixture.net, layout, std::vector<int>{1}, sensors, &warnings);
  EXPECT_EQ(map.entries[0].index, layout.segment(0, 3));
  EXPECT_EQ(map.entries[1].index, layout.segment(0, 1));
  EXPECT_EQ(map.entries[2].index, layout.segment(0, 3));
  EXPECT_EQ(map.entries[3].index, layout.junction(0));
  EXPECT_EQ(warnings.size(), 1u);
  map = build_measurement_map(fixture.net, layout, std::vector<int>{-1}, sensors);
  EXPECT_EQ(map.entries[0].index, layout.segment(0, 0));
  EXPECT_EQ(map.entries[1].index, layout.segment(0, 2));

  SpeciesState st;
  st.layout = std::make_shared<const StateLayout>(layout);
  st.x1 = {9, 8, 1, 2, 3, 4};
  st.x2 = {0, 0, 5, 6, 7, 8};
  const auto y = measure_outputs(st, map);
  EXPECT_EQ(y.y1, (std::vector<double>{1, 1, 8}));
  EXPECT_EQ(y.y2, (std::vector<double>{7}));
}

TEST(RunSimulation, ThreeNodeLwProducesFiniteSeries) {
  const auto f = three_node_fixture();
  const auto r = run_simulation(f.net, f.schedule, f.scenario);
  EXPECT_EQ(r.scheme, Scheme::LaxWendroff);
  ASSERT_EQ(r.time.size(), f.schedule.steps.size() + 1);
  EXPECT_EQ(r.time.front(), 0.0);
  EXPECT_DOUBLE_EQ(r.time.back(), f.schedule.end_time());
  EXPECT_EQ(r.diagnostics.quality_steps, static_cast<std::size_t>(f.schedule.end_time() / 100.0));
  EXPECT_TRUE(r.diagnostics.cfl.pass);
  EXPECT_EQ(r.diagnostics.max_residual, 0.0);
  ASSERT_EQ(r.sensors.size(), 2u);
  EXPECT_EQ(r.sensors[0].values.size(), r.diagnostics.quality_steps + 1);
  for (const auto& e : r.elements) {
    for (const auto& series : e.values) {
      for (double v : series) EXPECT_TRUE(std::isfinite(v));
    }
  }
  EXPECT_EQ(r.element("J1").kind, ElementKind::Junction);
  EXPECT_THROW((void)r.element("nope"), Error);
}

TEST(RunSimulation, ImplicitSchemesSolveAccurately) {
  auto f = three_node_fixture();
  for (auto scheme : {Scheme::BackwardEuler, Scheme::CrankNicolson}) {
    f.scenario.sim.scheme = scheme;
    const auto r = run_simulation(f.net, f.schedule, f.scenario);
    EXPECT_LT(r.diagnostics.max_residual, 1e-10) << to_string(scheme);
  }
}

TEST(RunSimulation, RecordAllAndDuration) {
  auto f = three_node_fixture();
  f.scenario.sim.record = RecordMode::All;
  f.scenario.sim.duration = 1000.0;
  const auto r = run_simulation(f.net, f.schedule, f.scenario);
  EXPECT_EQ(r.time.size(), 11u);
  EXPECT_DOUBLE_EQ(r.time.back(), 1000.0);
  EXPECT_TRUE(r.elements[0].profiles.empty());
}

TEST(RunSimulation, UsageErrors) {
  auto f = three_node_fixture();
  f.scenario.sim.dt = 7.0;
  EXPECT_THROW((void)run_simulation(f.net, f.schedule, f.scenario), Error);
  f.scenario.sim.dt = 100.0;
  f.scenario.sim.regrid_at = {1000.0};
  try {
    (void)run_simulation(f.net, f.schedule, f.scenario);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Usage);
  }
}

TEST(RunSimulation, RegridCarriesPipeAverages) {
  auto f = three_node_fixture();
  f.scenario.sim.regrid_at = {3600.0};
  const auto r = run_simulation(f.net, f.schedule, f.scenario);
  bool noted = false;
  for (const auto& w : r.diagnostics.warnings) noted |= w.find("regridded") != std::string::npos;
  EXPECT_TRUE(noted);
  EXPECT_EQ(r.diagnostics.segments.size(), 1u);
}

TEST(RunSimulation, DumpsMatrices) {
  const auto f = three_node_fixture();
  const auto dir = std::filesystem::temp_directory_path() / "aquanet_engine_dump";
  std::filesystem::remove_all(dir);
  RunOptions opt;
  opt.dump_matrices = dir;
  auto sc = f.scenario;
  sc.sim.scheme = Scheme::CrankNicolson;
  sc.sim.duration = 200.0;
  (void)run_simulation(f.net, f.schedule, sc, opt);
  EXPECT_TRUE(std::filesystem::exists(dir / "cn_p0_h0_s1_E.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cn_p0_h0_s2_A.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "cn_p0_h0_s1_B.txt"));
  std::filesystem::remove_all(dir);
}

TEST(RunSimulation, ObserverSeesEveryStep) {
  auto f = three_node_fixture();
  f.scenario.sim.duration = 500.0;
  std::size_t calls = 0;
  RunOptions opt;
  opt.observer = [&](const SpeciesState& s) {
    ++calls;
    EXPECT_DOUBLE_EQ(s.t, 100.0 * static_cast<double>(calls));
  };
  (void)run_simulation(f.net, f.schedule, f.scenario, opt);
  EXPECT_EQ(calls, 5u);
}

TEST(RunSimulation, ClampNegativeKeepsStatesNonnegative) {
  auto f = three_node_fixture();
  f.scenario.sim.scheme = Scheme::CrankNicolson;
  f.scenario.sim.clamp_negative = true;
  const auto r = run_simulation(f.net, f.schedule, f.scenario);
  EXPECT_GE(r.diagnostics.min_value[0], 0.0);
  EXPECT_GE(r.diagnostics.min_value[1], 0.0);
}

TEST(EngineProperties, ConstantStateIsPreservedWithoutReaction) {
  // With a source equal to the initial value and no reaction every explicit
  // and implicit scheme keeps the pipe at that value for any Courant number.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> vel(0.05, 2.0), len(10.0, 400.0);
  for (int trial = 0; trial < 12; ++trial) {
    const auto fixture = fixtures::single_pipe(len(rng), 0.1, vel(rng), 600.0);
    auto sc = single_pipe_scenario(1.7, 1.7);
    sc.sim.dt = 5.0;
    for (auto scheme : {Scheme::LaxWendroff, Scheme::BackwardEuler, Scheme::CrankNicolson, Scheme::Characteristics}) {
      sc.sim.scheme = scheme;
      const auto r = run_simulation(fixture.net, fixture.schedule, sc);
      EXPECT_NEAR(r.diagnostics.min_value[0], 1.7, 1e-12) << to_string(scheme);
      EXPECT_NEAR(r.diagnostics.max_value[0], 1.7, 1e-12) << to_string(scheme);
    }
  }
}

TEST(EngineProperties, DecouplingWithoutMutualReaction) {
  auto f = three_node_fixture();
  f.scenario.reactions.kr = 0.0;
  for (auto scheme : {Scheme::LaxWendroff, Scheme::BackwardEuler, Scheme::Characteristics}) {
    f.scenario.sim.scheme = scheme;
    f.scenario.sim.species = SpeciesMode::Both;
    const auto both = run_simulation(f.net, f.schedule, f.scenario);
    f.scenario.sim.species = SpeciesMode::Chlorine;
    const auto c1 = run_simulation(f.net, f.schedule, f.scenario);
    f.scenario.sim.species = SpeciesMode::Reactant;
    const auto c2 = run_simulation(f.net, f.schedule, f.scenario);
    for (std::size_t e = 0; e < both.elements.size(); ++e) {
      EXPECT_EQ(both.elements[e].values[0], c1.elements[e].values[0]);
      EXPECT_EQ(both.elements[e].values[1], c2.elements[e].values[1]);
    }
  }
}
