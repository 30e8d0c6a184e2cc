#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epictrl/config.hpp"
#include "epictrl/csv.hpp"
#include "epictrl/ddqn.hpp"
#include "epictrl/metrics.hpp"
#include "epictrl/seird.hpp"

namespace epictrl {

// Each run_* command writes its outputs and a <name>.manifest.json into
// config.output_dir and returns the in-memory results alongside the paths.

/// Constant-restriction run from the configured outbreak seed, with rewards.
Trajectory simulate_constant(const ToolkitConfig& cfg, Restriction restriction);

/// Scheduled run: entry d is the restriction in force on day d. The run stops
/// when the schedule is exhausted, the epidemic ends or max_days is reached.
Trajectory simulate_schedule(const ToolkitConfig& cfg, const std::vector<Restriction>& schedule);

/// Fill in the reward of every day after day 0 from the configured weights.
void attach_rewards(Trajectory& traj, const ToolkitConfig& cfg);

struct SimulateOptions {
    std::optional<Restriction> restriction; // default NoRestriction
    std::optional<std::filesystem::path> schedule;
    std::string name; // output stem; derived from the inputs when empty
};

struct SimulateReport {
    Trajectory trajectory;
    TrajectorySummary summary;
    std::vector<std::filesystem::path> files;
};

SimulateReport run_simulate(const ToolkitConfig& cfg, const SimulateOptions& opts,
                            std::ostream& log);

struct CalibrationTargets {
    std::array<int, kRestrictionCount> days = {50, 80, 150, 300};
    int tolerance_days = 2;
    int max_iterations = 60;
};

struct CalibrationEntry {
    Restriction restriction = Restriction::NoRestriction;
    double multiplier = 1.0;
    std::optional<int> crossing_day;
    int iterations = 0;
};

struct CalibrationReport {
    EffectsTable effects;
    std::array<CalibrationEntry, kRestrictionCount> entries;
    std::vector<std::filesystem::path> files;
};

/// Bisection per restriction on the transmission multiplier in (0, 1] until the
/// constant-restriction cumulative 25% crossing lands within tolerance of its
/// target. Throws ConfigInvalid for non-increasing targets and
/// CalibrationInfeasible when a target cannot be met.
CalibrationReport calibrate_effects(const ToolkitConfig& cfg, const CalibrationTargets& targets);

/// calibrate_effects plus <name>.json holding the calibrated restrictions section.
CalibrationReport run_calibrate(const ToolkitConfig& cfg, const CalibrationTargets& targets,
                                std::ostream& log, const std::string& name = "calibrate");

struct TrainReport {
    TrainResult result;
    std::vector<std::filesystem::path> files;
};

/// Weights archive, per-episode CSV and reward-curve SVG. Partial outputs are
/// removed when training fails.
TrainReport run_train(const ToolkitConfig& cfg, std::ostream& log,
                      const std::string& name = "train");

struct EvaluateReport {
    Trajectory trajectory;
    TrajectorySummary summary;
    std::vector<std::filesystem::path> files;
};

EvaluateReport run_evaluate(const ToolkitConfig& cfg, const std::filesystem::path& weights,
                            std::ostream& log, const std::string& name = "evaluate");

struct CompareReport {
    std::vector<SummaryRow> rows;
    std::vector<std::filesystem::path> files;
};

/// Summary rows for trajectory CSVs (labelled by file stem) and, optionally,
/// the four constant-restriction baselines. Needs at least two policies.
CompareReport run_compare(const ToolkitConfig& cfg, const std::vector<std::filesystem::path>& inputs,
                          bool include_baselines, std::ostream& log,
                          const std::string& name = "compare");

struct SteerOptions {
    std::optional<std::filesystem::path> weights;
    std::string name = "steer";
};

struct SteerReport {
    Trajectory trajectory;
    std::vector<Restriction> schedule;
    std::vector<std::filesystem::path> files;
};

/// Interactive day-by-day session. Input lines: 0-3 applies a restriction,
/// "auto N" lets the loaded agent act for N days, "q" ends the session.
SteerReport run_steer(const ToolkitConfig& cfg, const SteerOptions& opts, std::istream& in,
                      std::ostream& out);

} // namespace epictrl
