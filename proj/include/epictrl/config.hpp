#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "epictrl/ddqn.hpp"
#include "epictrl/env.hpp"

namespace epictrl {

/// Everything a command needs. Defaults carry the published model values;
/// a config file overrides defaults and command-line flags override the file.
struct ToolkitConfig {
    DiseaseParams disease;
    EffectsTable effects = EffectsTable::defaults();
    std::string reward_preset = "default";
    RewardWeights weights = RewardWeights::default_preset();
    double initial_infected_fraction = 0.07;
    SimulationSettings sim;
    TrainConfig train;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    /// Throws ConfigInvalid naming the offending field.
    void validate() const;

    EnvConfig env_config() const;
    /// Training settings with the run seed applied.
    TrainConfig train_config() const;

    nlohmann::json to_json() const;

    /// Overlay a (possibly partial) document. Unknown keys and wrong types raise
    /// ConfigInvalid with the dotted key path.
    void merge(const nlohmann::json& doc);

    void set_reward_preset(const std::string& preset);

    static ToolkitConfig from_json(const nlohmann::json& doc);
    /// Throws IoError when unreadable, ConfigInvalid when malformed or invalid.
    static ToolkitConfig load(const std::filesystem::path& path);
};

/// Serialized form of an effects table, as written by calibration.
nlohmann::json effects_to_json(const EffectsTable& table);

} // namespace epictrl
