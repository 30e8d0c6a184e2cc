#pragma once

#include <optional>

#include "epictrl/seird.hpp"

namespace epictrl {

inline constexpr double kQuarter = 0.25;

/// First day with cumulative ever-infected (i + r + d) >= fraction * N.
std::optional<int> crossing_day_cumulative(const Trajectory& traj, double N,
                                           double fraction = kQuarter);

/// First day with currently infected i >= fraction * N.
std::optional<int> crossing_day_current(const Trajectory& traj, double N,
                                        double fraction = kQuarter);

struct TrajectorySummary {
    std::optional<int> crossing_cumulative;
    std::optional<int> crossing_current;
    double mean_economy_norm = 0.0;  // over every recorded day
    double final_economy_norm = 0.0;
    /// Normalized economy on the cumulative crossing day, and its mean over days 0..crossing.
    std::optional<double> economy_at_crossing;
    std::optional<double> mean_economy_to_crossing;
    double total_deaths = 0.0;
    int length_days = 0; // number of simulated steps
    std::optional<double> reward_mean;
    std::optional<double> reward_peak;
    std::optional<double> reward_total;
};

TrajectorySummary summarize(const Trajectory& traj, double N);

} // namespace epictrl
