#include "locsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "locsim/errors.hpp"

namespace locsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi > lo ? hi - lo : 1.0; }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Three-stop gradient, dark blue to magenta to yellow.
std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto lerp = [](int a, int b, double u) {
    return static_cast<int>(std::lround(a + (b - a) * u));
  };
  int r, g, b;
  if (t < 0.5) {
    const double u = t / 0.5;
    r = lerp(13, 204, u);
    g = lerp(8, 71, u);
    b = lerp(135, 120, u);
  } else {
    const double u = (t - 0.5) / 0.5;
    r = lerp(204, 240, u);
    g = lerp(71, 249, u);
    b = lerp(120, 33, u);
  }
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
  return buffer;
}

}  // namespace

void write_line_chart_svg(const std::filesystem::path& path,
                          const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::string& title) {
  const double width = 800, height = 500;
  const double ml = 70, mr = 150, mt = 40, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;

  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  if (!std::isfinite(xr.lo) || !std::isfinite(yr.lo)) {
    xr = {0.0, 1.0};
    yr = {0.0, 1.0};
  }
  auto px = [&](double x) { return ml + (x - xr.lo) / xr.span() * pw; };
  auto py = [&](double y) { return mt + ph - (y - yr.lo) / yr.span() * ph; };

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "' viewBox='0 0 " << width << " " << height
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='16'>" << title << "</text>\n";

  // axes and ticks
  out << "<g stroke='#333' stroke-width='1'>"
      << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw
      << "' y2='" << mt + ph << "'/>"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << mt + ph << "'/></g>\n";
  out << "<g font-family='sans-serif' font-size='11' fill='#333'>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double xv = xr.lo + xr.span() * i / ticks;
    const double yv = yr.lo + yr.span() * i / ticks;
    out << "<text x='" << px(xv) << "' y='" << mt + ph + 16
        << "' text-anchor='middle'>" << fmt(xv) << "</text>\n";
    out << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
        << "' text-anchor='end'>" << fmt(yv) << "</text>\n";
  }
  out << "<text x='" << ml + pw / 2 << "' y='" << height - 10
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  out << "<text x='18' y='" << mt + ph / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
      << mt + ph / 2 << ")'>" << y_label << "</text>\n</g>\n";

  for (size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < series[s].x.size(); ++i) {
      out << px(series[s].x[i]) << ',' << py(series[s].y[i]) << ' ';
    }
    out << "'/>\n";
    const double ly = mt + 20 + 18 * s;
    out << "<line x1='" << ml + pw + 10 << "' y1='" << ly << "' x2='"
        << ml + pw + 34 << "' y2='" << ly << "' stroke='" << color
        << "' stroke-width='2'/>\n";
    out << "<text x='" << ml + pw + 40 << "' y='" << ly + 4
        << "' font-family='sans-serif' font-size='12'>" << series[s].label
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw ValidationError("write failed: " + path.string());
}

void write_spectrum_line_svg(
    const std::filesystem::path& path, const SearchGrid& grid,
    const std::vector<std::pair<std::string, std::vector<double>>>& spectra) {
  std::vector<SvgSeries> series;
  for (const auto& [label, values] : spectra) {
    SvgSeries s;
    s.label = label;
    double peak = 0.0;
    for (double v : values) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    for (size_t i = 0; i < values.size(); ++i) {
      // distance along the line from the first grid point
      s.x.push_back((grid.points[i] - grid.points[0]).norm());
      const double db = 10.0 * std::log10(std::max(values[i] / peak, 1e-12));
      s.y.push_back(std::max(db, -60.0));
    }
    series.push_back(std::move(s));
  }
  write_line_chart_svg(path, series, "position along the grid (m)",
                       "normalized power (dB)", "power spectrum");
}

void write_heatmap_svg(const std::filesystem::path& path, const SearchGrid& grid,
                       const std::vector<double>& values,
                       const std::string& title) {
  if (grid.descriptor.kind != SearchGrid::Kind::rect) {
    throw ValidationError("heat maps need a rectangular grid");
  }
  const int nx = grid.descriptor.nx, ny = grid.descriptor.ny;
  const double cell = std::max(2.0, std::min(720.0 / nx, 560.0 / ny));
  const double ml = 60, mt = 40;
  const double width = ml + nx * cell + 30;
  const double height = mt + ny * cell + 50;

  double peak = 0.0;
  for (double v : values) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;
  const double floor_db = -40.0;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n<rect width='100%' height='100%' "
      << "fill='white'/>\n<text x='" << width / 2
      << "' y='24' text-anchor='middle' font-family='sans-serif' "
      << "font-size='15'>" << title << "</text>\n";
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double v = values[static_cast<size_t>(iy) * nx + ix];
      const double db =
          std::max(10.0 * std::log10(std::max(v / peak, 1e-12)), floor_db);
      const double t = (db - floor_db) / (-floor_db);
      // y axis points up: row 0 (smallest y) drawn at the bottom
      out << "<rect x='" << ml + ix * cell << "' y='"
          << mt + (ny - 1 - iy) * cell << "' width='" << cell << "' height='"
          << cell << "' fill='" << heat_color(t) << "'/>\n";
    }
  }
  out << "<g font-family='sans-serif' font-size='11' fill='#333'>\n";
  out << "<text x='" << ml << "' y='" << mt + ny * cell + 16 << "'>x = "
      << fmt(grid.descriptor.x_min) << "</text>\n";
  out << "<text x='" << ml + nx * cell << "' y='" << mt + ny * cell + 16
      << "' text-anchor='end'>x = " << fmt(grid.descriptor.x_max) << "</text>\n";
  out << "<text x='" << ml - 6 << "' y='" << mt + ny * cell
      << "' text-anchor='end'>y = " << fmt(grid.descriptor.y_min) << "</text>\n";
  out << "<text x='" << ml - 6 << "' y='" << mt + 10 << "' text-anchor='end'>y = "
      << fmt(grid.descriptor.y_max) << "</text>\n</g>\n</svg>\n";
  if (!out) throw ValidationError("write failed: " + path.string());
}

}  // namespace locsim
