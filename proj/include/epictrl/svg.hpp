#pragma once

#include <string>
#include <utility>
#include <vector>

#include "epictrl/seird.hpp"

namespace epictrl {

struct ChartSeries {
    std::string label;
    std::string color;
    std::vector<double> values; // one per x position
};

/// Shaded background span [start, end) in x units.
struct ChartBand {
    double start = 0.0;
    double end = 0.0;
    std::string color;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<ChartSeries> series;
    std::vector<ChartBand> bands;
    /// Legend entries for the bands (label, color).
    std::vector<std::pair<std::string, std::string>> band_legend;
};

/// Self-contained SVG document: one polyline per series plus a legend.
std::string render_svg(const LineChart& chart);

/// Five compartments plus the economy, in persons per day.
LineChart trajectory_chart(const Trajectory& traj, const std::string& title);

/// trajectory_chart with one background band per run of identical actions.
LineChart policy_chart(const Trajectory& traj, const std::string& title);

/// Colors used for restriction bands, indexed by restriction code.
const std::string& restriction_color(Restriction r);

} // namespace epictrl
