#include "aquanet/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aquanet/errors.hpp"

namespace aquanet {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

}  // namespace

std::string render_svg(std::span<const SimulationResult> results, const std::string& element, double width,
                       double height) {
  if (results.empty()) throw Error(ErrorCategory::Usage, "nothing to plot");
  struct Curve {
    std::string label;
    const std::vector<double>* time;
    const std::vector<double>* values;
  };
  std::vector<Curve> curves;
  double t_lo = INFINITY, t_hi = -INFINITY, c_lo = 0.0, c_hi = -INFINITY;
  for (const auto& r : results) {
    const auto& series = r.element(element);
    for (auto s : {Species::Chlorine, Species::Reactant}) {
      if (!simulates(r.species, s)) continue;
      const auto& v = series.values[index_of(s)];
      curves.push_back({std::string(to_string(r.scheme)) + " species " + std::to_string(index_of(s) + 1), &r.time, &v});
      for (double x : v) {
        c_lo = std::min(c_lo, x);
        c_hi = std::max(c_hi, x);
      }
      if (!r.time.empty()) {
        t_lo = std::min(t_lo, r.time.front());
        t_hi = std::max(t_hi, r.time.back());
      }
    }
  }
  if (!std::isfinite(t_lo)) t_lo = 0.0, t_hi = 1.0;
  if (t_hi <= t_lo) t_hi = t_lo + 1.0;
  if (!std::isfinite(c_hi) || c_hi <= c_lo) c_hi = c_lo + 1.0;

  const double left = 70.0, right = 160.0, top = 30.0, bottom = 50.0;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto px = [&](double t) { return left + (t - t_lo) / (t_hi - t_lo) * pw; };
  auto py = [&](double c) { return top + (1.0 - (c - c_lo) / (c_hi - c_lo)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fixed(left) << "\" y=\"18\">" << element << "</text>\n";
  svg << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
      << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double c = c_lo + (c_hi - c_lo) * i / 4.0;
    const double t = t_lo + (t_hi - t_lo) * i / 4.0;
    svg << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(c) + 4) << "\" text-anchor=\"end\">"
        << fixed(c, 3) << "</text>\n";
    svg << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"middle\">"
        << fixed(t / 3600.0, 1) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(height - 10)
      << "\" text-anchor=\"middle\">time (h)</text>\n";
  svg << "<text x=\"16\" y=\"" << fixed(top + ph / 2) << "\" transform=\"rotate(-90 16 " << fixed(top + ph / 2)
      << ")\" text-anchor=\"middle\">concentration (mg/L)</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < c.values->size() && k < c.time->size(); ++k) {
      svg << fixed(px((*c.time)[k])) << ',' << fixed(py((*c.values)[k])) << ' ';
    }
    svg << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fixed(left + pw + 10) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(left + pw + 30)
        << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fixed(left + pw + 36) << "\" y=\"" << fixed(ly) << "\">" << c.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> render_plots(std::span<const SimulationResult> results, const PlotSpec& spec) {
  if (results.empty()) throw Error(ErrorCategory::Usage, "render_plots needs at least one result");
  for (const auto& e : spec.elements) {
    for (const auto& r : results) (void)r.element(e);  // validate before writing anything
  }
  std::filesystem::create_directories(spec.out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& e : spec.elements) {
    const auto path = spec.out_dir / (e + ".svg");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "' for writing");
    out << render_svg(results, e, spec.width, spec.height);
    if (!out) throw Error(ErrorCategory::Io, "failed writing '" + path.string() + "'");
    written.push_back(path);
  }
  return written;
}

}  // namespace aquanet
