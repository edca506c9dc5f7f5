#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ctca {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Standalone SVG line chart. CSV files are the contract; this is convenience
// output for eyeballing curves.
void write_line_chart_svg(const std::vector<ChartSeries>& series,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label, std::ostream& out);

}  // namespace ctca
