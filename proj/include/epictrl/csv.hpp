#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epictrl/ddqn.hpp"
#include "epictrl/metrics.hpp"
#include "epictrl/seird.hpp"

namespace epictrl {

inline constexpr int kCsvFormatVersion = 1;

inline constexpr std::string_view kTrajectoryHeader =
    "day,S,E,I,R,D,economy,economy_norm,action,reward";
inline constexpr std::string_view kTrainingHeader =
    "episode,length_days,mean_reward,peak_reward,epsilon,final_deaths";
inline constexpr std::string_view kScheduleHeader = "day,action";
inline constexpr std::string_view kSummaryHeader =
    "policy,crossing_day_cumulative,crossing_day_current,mean_economy_pct,final_economy_pct,"
    "economy_at_crossing_pct,total_deaths,episode_length,reward_mean,reward_peak,reward_total";

/// Shortest text that parses back to the identical double.
std::string format_number(double v);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double N);
/// Throws SchemaMismatch on a wrong header, bad field or non-contiguous days.
Trajectory read_trajectory_csv(std::istream& in);

void write_training_csv(std::ostream& out, const std::vector<EpisodeLog>& logs);

void write_schedule_csv(std::ostream& out, const std::vector<Restriction>& schedule);
std::vector<Restriction> read_schedule_csv(std::istream& in);

/// The restriction chosen on each day of a trajectory: entry d is the action
/// recorded on row d + 1.
std::vector<Restriction> schedule_from_trajectory(const Trajectory& traj);

struct SummaryRow {
    std::string policy;
    TrajectorySummary summary;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Write a file atomically (temp file + rename). Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

} // namespace epictrl
