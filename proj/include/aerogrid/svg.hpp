#pragma once

#include <string>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/grid.hpp"
#include "aerogrid/metrics.hpp"

namespace aerogrid::svg {

struct Series {
  std::string name;
  std::vector<double> values;
};

// One polyline per series, x = sample index. Decoration over the CSVs;
// deterministic output, no timestamps.
std::string line_chart(const std::vector<Series>& series,
                       const std::string& title, const std::string& x_label,
                       const std::string& y_label);

// Blue-to-red cell grid; booth cells, if given, get a ring marker.
std::string heatmap(const ScalarField& field, const std::string& title,
                    const booth::Placement* placement = nullptr);

// Normalized multi-axis comparison, one polygon per strategy.
std::string radar_chart(const metrics::RadarData& data,
                        const std::string& title);

}  // namespace aerogrid::svg
