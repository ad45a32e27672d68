#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "locsim/geometry.hpp"

namespace locsim {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart (axes, ticks, legend, one polyline per series).
void write_line_chart_svg(const std::filesystem::path& path,
                          const std::vector<SvgSeries>& series,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::string& title);

/// Power spectrum over a line grid, normalized to dB relative to the peak.
void write_spectrum_line_svg(const std::filesystem::path& path,
                             const SearchGrid& grid,
                             const std::vector<std::pair<std::string, std::vector<double>>>& spectra);

/// Power spectrum over a rectangular grid as a dB heat map.
void write_heatmap_svg(const std::filesystem::path& path,
                       const SearchGrid& grid,
                       const std::vector<double>& values,
                       const std::string& title);

}  // namespace locsim
