#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "epictrl/reward.hpp"
#include "epictrl/seird.hpp"

namespace epictrl {

inline constexpr std::size_t kWindowDays = 30;
inline constexpr std::size_t kFeatureCount = 7;

/// s/N, e/N, i/N, r/N, d/N, normalized economy, restriction code / 3.
using FeatureVector = std::array<double, kFeatureCount>;

FeatureVector make_features(const Compartments& c, double economy_norm, Restriction applied,
                            double N);

/// Sliding window of the last 30 daily feature rows; row 0 is the oldest.
class Observation {
public:
    static constexpr std::size_t kSize = kWindowDays * kFeatureCount;

    Observation() = default;

    /// Every row set to the same feature vector.
    static Observation filled(const FeatureVector& row);

    double at(std::size_t row, std::size_t col) const { return values_[row * kFeatureCount + col]; }
    std::span<const double, kFeatureCount> row(std::size_t t) const {
        return std::span<const double, kFeatureCount>(values_.data() + t * kFeatureCount,
                                                      kFeatureCount);
    }
    std::span<const double, kSize> values() const { return values_; }
    std::span<double, kSize> values() { return values_; }

    /// Drop the oldest row and append newest at the end.
    void push(const FeatureVector& newest);

    bool operator==(const Observation&) const = default;

private:
    std::array<double, kSize> values_{};
};

struct StepInfo {
    Compartments state;
    double economy = 0.0;
    int day = 0;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

struct EnvConfig {
    DiseaseParams disease;
    EffectsTable effects = EffectsTable::defaults();
    RewardWeights weights;
    double initial_infected_fraction = 0.07;
    SimulationSettings sim;

    void validate() const;
};

/// Episodic reset/step interface consumed by the learner.
class Environment {
public:
    virtual ~Environment() = default;
    virtual Observation reset() = 0;
    virtual StepResult step(Restriction action) = 0;
    /// Compartments behind the latest observation, for logging.
    virtual Compartments current_state() const = 0;
};

/// SEIRD outbreak with the economy tracker and reward attached.
///
/// One instance holds mutable episode state and is not meant to be shared
/// between threads while a call is in progress.
class EpidemicEnv final : public Environment {
public:
    /// Validates the config (ConfigInvalid) and resets.
    explicit EpidemicEnv(EnvConfig config);

    Observation reset() override;

    /// Applies the action for one day. Throws EpisodeFinished once done.
    StepResult step(Restriction action) override;

    Compartments current_state() const override { return state_; }

    bool done() const { return done_; }
    int day() const { return day_; }
    const Observation& observation() const { return window_; }
    const Trajectory& trajectory() const { return trajectory_; }
    const EnvConfig& config() const { return config_; }

private:
    EnvConfig config_;
    Compartments state_;
    Observation window_;
    Trajectory trajectory_;
    int day_ = 0;
    bool done_ = false;
};

} // namespace epictrl
