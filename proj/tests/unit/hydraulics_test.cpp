#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "aquanet/errors.hpp"
#include "aquanet/hydraulics.hpp"
#include "test_support.hpp"

using namespace aquanet;

namespace {

const Network& three_node() {
  static const Network net(fixtures::three_node_topology());
  return net;
}

std::string hourly_rows(int hours) {
  std::string text = "time_s,element_id,quantity,value\n";
  for (int h = 0; h < hours; ++h) {
    const double scale = 1.0 + 0.1 * (h % 4);
    const std::string t = std::to_string(h * 3600);
    text += t + ",M1,flow_m3s," + std::to_string(0.02 * scale) + "\n";
    text += t + ",P1,flow_m3s," + std::to_string(0.015 * scale) + "\n";
    text += t + ",J1,demand_m3s," + std::to_string(0.005 * scale) + "\n";
    text += t + ",TK1,demand_m3s," + std::to_string(0.015 * scale) + "\n";
  }
  return text;
}

std::string error_message(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(LoadHydraulics, SingleStaticStep) {
  const auto s = load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0.01\n0,M1,flow_m3s,0.01\n"
                                 "0,TK1,demand_m3s,0.01\n0,*,duration_s,86400\n",
                                 three_node());
  ASSERT_EQ(s.steps.size(), 1u);
  EXPECT_DOUBLE_EQ(s.steps[0].duration, 86400.0);
  EXPECT_DOUBLE_EQ(s.end_time(), 86400.0);
}

TEST(LoadHydraulics, HourlyPattern) {
  const auto s = load_hydraulics(hourly_rows(24), three_node());
  ASSERT_EQ(s.steps.size(), 24u);
  for (const auto& step : s.steps) EXPECT_DOUBLE_EQ(step.duration, 3600.0);
  EXPECT_DOUBLE_EQ(s.end_time(), 86400.0);
  EXPECT_EQ(s.step_index_at(3599.0), 0u);
  EXPECT_EQ(s.step_index_at(3600.0), 1u);
  EXPECT_EQ(s.step_index_at(86400.0), 23u);
}

TEST(LoadHydraulics, GapNamesTheBoundary) {
  const auto msg = error_message([] {
    (void)load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0.01\n0,*,duration_s,3600\n"
                          "3630,P1,flow_m3s,0.01\n",
                          three_node());
  });
  EXPECT_NE(msg.find("gap"), std::string::npos) << msg;
  EXPECT_NE(msg.find("3600"), std::string::npos) << msg;
}

TEST(LoadHydraulics, OverlapAndOrderingErrors) {
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity,value\n0,*,duration_s,4000\n3600,P1,flow_m3s,0\n",
                                     three_node()),
               Error);
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity,value\n60,P1,flow_m3s,0\n120,P1,flow_m3s,0\n",
                                     three_node()),
               Error);
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0\n", three_node()), Error);
}

TEST(LoadHydraulics, UnknownElementAndQuantity) {
  try {
    (void)load_hydraulics("time_s,element_id,quantity,value\n0,P9,flow_m3s,0.01\n0,*,duration_s,60\n", three_node());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Hydraulics);
    EXPECT_EQ(e.element(), "P9");
  }
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity,value\n0,J1,flow_m3s,0.01\n0,*,duration_s,60\n",
                                     three_node()),
               Error);
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity\n", three_node()), Error);
}

TEST(LoadHydraulics, OmittedElementsCarryForward) {
  const auto s = load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0.01\n0,M1,flow_m3s,0.02\n"
                                 "0,TK1,demand_m3s,0.01\n60,M1,flow_m3s,0.03\n",
                                 three_node());
  ASSERT_EQ(s.steps.size(), 2u);
  EXPECT_DOUBLE_EQ(s.steps[1].pipe_flow[0], 0.01);
  EXPECT_DOUBLE_EQ(s.steps[1].pump_flow[0], 0.03);
  EXPECT_DOUBLE_EQ(s.steps[1].duration, 60.0);
}

TEST(LoadHydraulics, TankVolumesRecomputedFromFlows) {
  // Inflow 0.02, outflow 0.01: +36 m3 per hour; the given 900 m3 disagrees.
  const auto s = load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0.02\n0,TK1,demand_m3s,0.01\n"
                                 "0,TK1,tank_volume_m3,400\n3600,TK1,tank_volume_m3,900\n",
                                 three_node());
  EXPECT_DOUBLE_EQ(s.steps[0].tank_volume[0], 400.0);
  EXPECT_NEAR(s.steps[1].tank_volume[0], 436.0, 1e-9);
  ASSERT_EQ(s.warnings.size(), 1u);
  const auto& net = three_node();
  for (double t : {0.0, 1.0, 1800.0, 3600.0}) {
    EXPECT_NEAR(tank_volume_at(net, s.steps[0], 0, t + 1.0) - tank_volume_at(net, s.steps[0], 0, t), 0.01, 1e-12);
  }
}

TEST(LoadHydraulics, TankBoundViolation) {
  EXPECT_THROW((void)load_hydraulics("time_s,element_id,quantity,value\n0,P1,flow_m3s,0.2\n0,*,duration_s,3600\n",
                                     three_node()),
               Error);
}

TEST(MeanVelocity, Examples) {
  EXPECT_NEAR(mean_velocity(0.0314159, 0.1), 1.0, 1e-5);
  EXPECT_EQ(mean_velocity(0.0, 0.1), 0.0);
  EXPECT_NEAR(mean_velocity(-0.0314159, 0.1), -1.0, 1e-5);
}

TEST(BuildFixedGrid, Examples) {
  const auto fixture = fixtures::single_pipe(100.0, 0.1, 1.0, 60.0);
  const auto g = build_fixed_grid(fixture.net, fixture.schedule, 5.0);
  EXPECT_EQ(g.segments[0], 20u);
  EXPECT_DOUBLE_EQ(g.segment_length[0], 5.0);
  EXPECT_TRUE(g.warnings.empty());

  const auto clamped = build_fixed_grid(fixture.net, fixture.schedule, 200.0);
  EXPECT_EQ(clamped.segments[0], 1u);
  EXPECT_DOUBLE_EQ(clamped.segment_length[0], 100.0);
  EXPECT_EQ(clamped.warnings.size(), 1u);

  EXPECT_THROW((void)build_fixed_grid(fixture.net, fixture.schedule, 0.0), Error);
}

TEST(BuildFixedGrid, StagnantPipeGetsOneSegment) {
  const auto fixture = fixtures::single_pipe(100.0, 0.1, 0.0, 60.0);
  const auto g = build_fixed_grid(fixture.net, fixture.schedule, 1.0);
  EXPECT_EQ(g.segments[0], 1u);
  EXPECT_EQ(g.warnings.size(), 1u);
}

TEST(CourantNumbers, Examples) {
  const auto fixture = fixtures::single_pipe(100.0, 0.1, 1.0, 60.0);
  const auto grid = build_fixed_grid(fixture.net, fixture.schedule, 5.0);
  auto sched = fixture.schedule;
  sched.steps[0].pipe_flow[0] = 0.5 * fixtures::pipe_area(0.1);
  auto f = courant_numbers(fixture.net, grid, sched);
  EXPECT_NEAR(f.lambda[0][0], 0.5, 1e-12);
  EXPECT_EQ(f.direction[0][0], 1);
  sched.steps[0].pipe_flow[0] = 0.0;
  f = courant_numbers(fixture.net, grid, sched);
  EXPECT_EQ(f.lambda[0][0], 0.0);
  EXPECT_EQ(f.direction[0][0], 0);
  sched.steps[0].pipe_flow[0] = -fixtures::pipe_area(0.1);
  f = courant_numbers(fixture.net, grid, sched);
  EXPECT_NEAR(f.lambda[0][0], 1.0, 1e-12);
  EXPECT_EQ(f.direction[0][0], -1);
}

TEST(CflReport, Flags) {
  CourantField f;
  f.lambda = {{0.5, 1.0}, {0.0, 1.2}};
  f.direction = {{1, 1}, {0, 1}};
  const auto r = cfl_report(f);
  EXPECT_FALSE(r.pass);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0], (CflEntry{1, 1, 1.2}));
  ASSERT_EQ(r.stagnant.size(), 1u);
  EXPECT_EQ(r.stagnant[0].pipe, 0u);

  f.lambda = {{0.5, 1.0}};
  EXPECT_TRUE(cfl_report(f).pass);
}

TEST(GridProperties, RandomNetworksAlwaysPassCfl) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> length(1.0, 2000.0), radius(0.02, 0.6), flow(-0.3, 0.3),
      dt_choice(0.1, 60.0);
  for (int trial = 0; trial < 300; ++trial) {
    NetworkTopology t;
    t.reservoirs.push_back({"R"});
    const int nj = 1 + trial % 5;
    for (int j = 0; j < nj; ++j) t.junctions.push_back({"J" + std::to_string(j)});
    for (int j = 0; j < nj; ++j) {
      t.pipes.push_back({"P" + std::to_string(j), j == 0 ? "R" : "J" + std::to_string(j - 1), "J" + std::to_string(j),
                         length(rng), radius(rng)});
    }
    const Network net(t);
    HydraulicSchedule sched;
    for (int k = 0; k < 4; ++k) {
      auto step = fixtures::blank_step(net, 3600.0 * k, 3600.0);
      for (auto& q : step.pipe_flow) q = flow(rng);
      sched.steps.push_back(step);
    }
    const double dt = dt_choice(rng);
    const auto grid = build_fixed_grid(net, sched, dt);
    for (std::size_t p = 0; p < net.pipes().size(); ++p) {
      EXPECT_NEAR(static_cast<double>(grid.segments[p]) * grid.segment_length[p], net.pipes()[p].length,
                  1e-12 * net.pipes()[p].length);
    }
    // Only pipes shorter than one step of travel are clamped, and only those
    // may exceed Courant number one; the report flags exactly them.
    const auto field = courant_numbers(net, grid, sched);
    const auto report = cfl_report(field);
    for (std::size_t k = 0; k < field.lambda.size(); ++k) {
      for (std::size_t p = 0; p < net.pipes().size(); ++p) {
        double vmax = 0.0;
        for (const auto& step : sched.steps) {
          vmax = std::max(vmax, std::abs(mean_velocity(step.pipe_flow[p], net.pipes()[p].radius)));
        }
        const bool clamped = net.pipes()[p].length < vmax * dt;
        if (!clamped) EXPECT_LE(field.lambda[k][p], 1.0);
        const bool flagged = std::find(report.violations.begin(), report.violations.end(),
                                       CflEntry{p, k, field.lambda[k][p]}) != report.violations.end();
        EXPECT_EQ(flagged, field.lambda[k][p] > 1.0);
        if (flagged) EXPECT_TRUE(clamped);
      }
    }
  }
}

TEST(StepDivisibility, RejectsNonDividingDt) {
  const auto fixture = fixtures::single_pipe(100.0, 0.1, 1.0, 3600.0);
  EXPECT_NO_THROW(check_step_divisibility(fixture.schedule, 5.0));
  EXPECT_THROW(check_step_divisibility(fixture.schedule, 7.0), Error);
}
