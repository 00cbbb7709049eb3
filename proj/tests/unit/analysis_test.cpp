#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "aquanet/analysis.hpp"
#include "aquanet/errors.hpp"
#include "test_support.hpp"

using namespace aquanet;

namespace {

SimulationResult toy_result(Scheme scheme, double scale) {
  SimulationResult r;
  r.scheme = scheme;
  r.time = {0.0, 3600.0, 7200.0};
  r.elements.push_back({"J1", ElementKind::Junction, {std::vector<double>{1.0, 0.5 * scale, 0.25},
                                                      std::vector<double>{0.0, 0.1, 0.2 * scale}}, {}});
  r.elements.push_back({"P1", ElementKind::Pipe, {std::vector<double>{2.0, 2.0, 2.0},
                                                  std::vector<double>{0.0, 0.0, 0.0}}, {}});
  return r;
}

}  // namespace

TEST(Averages, SegmentAndVolumeWeighted) {
  EXPECT_DOUBLE_EQ(segment_average(std::vector<double>{1.0, 2.0, 3.0}), 2.0);
  EXPECT_EQ(segment_average(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(volume_weighted_average(std::vector<double>{1.0, 3.0}, std::vector<double>{3.0, 1.0}), 1.5);
  EXPECT_EQ(volume_weighted_average(std::vector<double>{1.0}, std::vector<double>{0.0}), 0.0);
}

TEST(PipeAverageSeries, UsesProfilesWhenPresent) {
  auto r = toy_result(Scheme::LaxWendroff, 1.0);
  EXPECT_EQ(pipe_average_series(r, "P1", Species::Chlorine), (std::vector<double>{2.0, 2.0, 2.0}));
  PipeProfile p;
  p.concentration[0] = {1.0, 3.0};
  p.concentration[1] = {0.0, 0.0};
  p.volume = {3.0, 1.0};
  r.elements[1].profiles = {p};
  EXPECT_EQ(pipe_average_series(r, "P1", Species::Chlorine), std::vector<double>{2.0});
  r.scheme = Scheme::Lagrangian;
  EXPECT_EQ(pipe_average_series(r, "P1", Species::Chlorine), std::vector<double>{1.5});
  EXPECT_THROW((void)pipe_average_series(r, "J1", Species::Chlorine), Error);
}

TEST(RelativeDifference, Examples) {
  const auto rd = relative_difference(std::vector<double>{1.0, 2.0, 0.0}, std::vector<double>{0.9, 2.2, 5.0});
  ASSERT_EQ(rd.size(), 3u);
  EXPECT_NEAR(*rd[0], 0.1, 1e-15);
  EXPECT_NEAR(*rd[1], -0.1, 1e-15);
  EXPECT_FALSE(rd[2].has_value());
  EXPECT_NEAR(*max_abs(rd), 0.1, 1e-15);
  EXPECT_FALSE(max_abs(std::vector<std::optional<double>>{std::nullopt}).has_value());
  EXPECT_THROW((void)relative_difference(std::vector<double>{1.0}, std::vector<double>{}), Error);
}

TEST(RelativeDifference, IdenticalSeriesAreZero) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> c(0.0, 4.0);
  std::vector<double> a(500);
  for (auto& v : a) v = c(rng);
  for (const auto& d : relative_difference(a, a)) {
    if (d) EXPECT_EQ(*d, 0.0);
  }
}

TEST(AnalyticPlugFlow, DecaysAfterArrival) {
  EXPECT_DOUBLE_EQ(analytic_plug_flow_decay(2.0, 0.001, 100.0, 1.0, 100.0), 2.0 * std::exp(-0.1));
  EXPECT_EQ(analytic_plug_flow_decay(2.0, 0.001, 100.0, 1.0, 99.0, 0.5), 0.5);
}

TEST(Timeseries, RoundTrip) {
  auto r = toy_result(Scheme::Characteristics, 1.0);
  r.elements[0].values[0][1] = 0.1 + 0.2;  // needs all 17 digits
  std::ostringstream os;
  write_timeseries(os, r);
  const auto t = read_timeseries(os.str());
  EXPECT_EQ(t.time, r.time);
  EXPECT_EQ(t.ids, (std::vector<std::string>{"J1", "P1"}));
  EXPECT_TRUE(t.present[0] && t.present[1]);
  for (std::size_t e = 0; e < 2; ++e) {
    for (std::size_t s = 0; s < 2; ++s) EXPECT_EQ(t.values[e][s], r.elements[e].values[s]);
  }

  r.species = SpeciesMode::Chlorine;
  const auto path = std::filesystem::temp_directory_path() / "aquanet_ts_test.csv";
  export_timeseries(r, path);
  const auto back = import_timeseries(path);
  EXPECT_FALSE(back.present[1]);
  EXPECT_EQ(back.values[0][0], r.elements[0].values[0]);
  std::filesystem::remove(path);
}

TEST(Timeseries, Errors) {
  EXPECT_THROW((void)read_timeseries("t,e,s,c\n"), Error);
  EXPECT_THROW((void)read_timeseries("time_s,element_id,species,concentration_mg_L\n0,J,3,1\n"), Error);
  EXPECT_THROW((void)read_timeseries("time_s,element_id,species,concentration_mg_L\n0,J,1\n"), Error);
  EXPECT_THROW(export_timeseries(toy_result(Scheme::LaxWendroff, 1.0), "/nonexistent/dir/out.csv"), Error);
  try {
    (void)read_text_file("/nonexistent/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Io);
  }
}

TEST(CompareResults, MaxRdPerElementAndSpecies) {
  const auto ref = toy_result(Scheme::Lagrangian, 1.0);
  const std::vector<SimulationResult> models{toy_result(Scheme::LaxWendroff, 0.9)};
  const auto rows = compare_results(ref, models);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].element, "J1");
  EXPECT_EQ(rows[0].scheme, Scheme::LaxWendroff);
  EXPECT_NEAR(*rows[0].max_rd, 0.1, 1e-12);
  EXPECT_NEAR(*rows[1].max_rd, 0.1, 1e-12);
  EXPECT_EQ(*rows[2].max_rd, 0.0);
  EXPECT_FALSE(rows[3].max_rd.has_value());
}
