#include <gtest/gtest.h>

#include <filesystem>

#include "aquanet/errors.hpp"
#include "aquanet/plot.hpp"

using namespace aquanet;

namespace {

SimulationResult flat(Scheme scheme, SpeciesMode mode) {
  SimulationResult r;
  r.scheme = scheme;
  r.species = mode;
  r.time = {0.0, 3600.0, 7200.0};
  r.elements.push_back({"TK1", ElementKind::Tank, {std::vector<double>{1.0, 1.0, 1.0},
                                                   std::vector<double>{0.2, 0.2, 0.2}}, {}});
  return r;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(RenderSvg, FlatSeriesIsAHorizontalLine) {
  const std::vector<SimulationResult> results{flat(Scheme::LaxWendroff, SpeciesMode::Chlorine)};
  const auto svg = render_svg(results, "TK1", 800, 480);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_NE(svg.find("lw species 1"), std::string::npos);
  // Every vertex of the polyline shares one y coordinate.
  const auto at = svg.find("points=\"");
  const auto end = svg.find('"', at + 8);
  std::string y;
  for (std::size_t pos = at + 8; pos < end;) {
    const auto comma = svg.find(',', pos);
    const auto space = std::min(svg.find(' ', comma), end);
    const auto this_y = svg.substr(comma + 1, space - comma - 1);
    if (y.empty()) y = this_y;
    EXPECT_EQ(this_y, y);
    pos = space + 1;
  }
}

TEST(RenderSvg, OverlaysEverySchemeAndSpecies) {
  const std::vector<SimulationResult> results{flat(Scheme::LaxWendroff, SpeciesMode::Both),
                                              flat(Scheme::Lagrangian, SpeciesMode::Both)};
  const auto svg = render_svg(results, "TK1", 640, 400);
  EXPECT_EQ(count(svg, "<polyline"), 4u);
  EXPECT_NE(svg.find("ltd species 2"), std::string::npos);
}

TEST(RenderPlots, UnknownElementWritesNothing) {
  const auto dir = std::filesystem::temp_directory_path() / "aquanet_plot_test";
  std::filesystem::remove_all(dir);
  const std::vector<SimulationResult> results{flat(Scheme::LaxWendroff, SpeciesMode::Both)};
  try {
    (void)render_plots(results, {{"TK1", "J9"}, dir});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::Validation);
    EXPECT_EQ(e.element(), "J9");
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "TK1.svg"));
  const auto written = render_plots(results, {{"TK1"}, dir});
  ASSERT_EQ(written.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "TK1.svg"));
  std::filesystem::remove_all(dir);
}
