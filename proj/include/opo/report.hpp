#pragma once

#include <string>
#include <vector>

namespace opo {

// Deterministic shortest round-trip formatting so repeated runs are byte-identical.
std::string format_number(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG line plot with axes and tick labels; no external dependencies.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, int width = 900, int height = 520);

} // namespace opo
