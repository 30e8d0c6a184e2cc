#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "epictrl/adam.hpp"
#include "epictrl/env.hpp"
#include "epictrl/network.hpp"
#include "epictrl/rng.hpp"

namespace epictrl {

struct Transition {
    Observation obs;
    Restriction action = Restriction::NoRestriction;
    double reward = 0.0;
    Observation next_obs;
    bool done = false;
};

/// Bounded FIFO of transitions with a seeded uniform sampler.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed);

    /// Overwrites the oldest entry once full.
    void push(Transition t);

    /// n draws with replacement. Throws BufferTooSmall when empty.
    std::vector<const Transition*> sample(std::size_t n);

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// i-th oldest entry.
    const Transition& operator[](std::size_t i) const;

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t next_ = 0;
    Rng rng_;
};

struct TrainConfig {
    int episodes = 200;
    std::size_t replay_capacity = 10000;
    std::size_t batch_size = 32;
    double discount = 0.95;
    int target_sync_interval = 100; // environment steps
    double epsilon_floor = 0.01;
    double epsilon_decay = 125.0;   // episodes
    double learning_rate = 1e-3;
    std::size_t warmup_steps = 200; // transitions before the first update
    std::uint64_t seed = 0;
    NetworkSizes network;

    /// Throws ConfigInvalid.
    void validate() const;
};

struct EpisodeLog {
    int episode = 0;
    int length_days = 0;
    std::vector<double> rewards;
    double mean_reward = 0.0;
    double peak_reward = 0.0;
    double epsilon = 0.0;
    Compartments final_state;
    std::array<int, kRestrictionCount> action_histogram{};
};

/// max(1 - episode / decay, floor)
double epsilon_schedule(int episode, const TrainConfig& cfg);

/// Greedy index of the largest value; ties go to the lowest action code.
Restriction greedy_action(std::span<const double> qvals);

/// Uniform random action with probability epsilon, greedy otherwise.
Restriction select_action(std::span<const double> qvals, double epsilon, Rng& rng);

/// Buffers reused between updates. Optional everywhere; passing one only
/// saves allocations.
struct TrainWorkspace {
    Sequence obs, next_obs;
    ForwardCache online_next, target_next, online_obs;
    NetworkParams grads;
};

/// Double-Q targets: the online network picks the next action, the target
/// network scores it. Terminal transitions take the bare reward.
std::vector<double> td_targets(std::span<const Transition* const> batch,
                               const NetworkParams& online, const NetworkParams& target,
                               double discount, TrainWorkspace* ws = nullptr);

/// Samples a batch and applies one optimizer step to online. Only the taken
/// action's output receives gradient. Returns the batch loss.
double train_step(ReplayBuffer& buffer, NetworkParams& online, const NetworkParams& target,
                  AdamState& opt, const TrainConfig& cfg, TrainWorkspace* ws = nullptr);

/// Same update on an explicit batch.
double train_on_batch(std::span<const Transition* const> batch, NetworkParams& online,
                      const NetworkParams& target, AdamState& opt, double discount,
                      TrainWorkspace* ws = nullptr);

struct TrainHooks {
    /// Overrides the schedule for every episode.
    std::optional<double> fixed_epsilon;
    std::function<void(const EpisodeLog&)> on_episode;
};

struct TrainResult {
    NetworkParams weights;
    std::vector<EpisodeLog> episodes;
    std::vector<double> losses; // one per optimizer step
    std::size_t replay_size = 0;
};

/// Runs cfg.episodes full episodes with epsilon-greedy exploration, an update
/// per environment step once warm, and a hard target sync every
/// cfg.target_sync_interval steps. Single-threaded and reproducible from cfg.seed.
TrainResult train(Environment& env, const TrainConfig& cfg, const TrainHooks& hooks = {});

TrainResult train(const EnvConfig& env_config, const TrainConfig& cfg,
                  const TrainHooks& hooks = {});

/// One greedy episode. Rewards are recorded for every day after day 0.
Trajectory greedy_rollout(const NetworkParams& weights, const EnvConfig& env_config);

/// Q-values for a single observation.
std::array<double, kRestrictionCount> q_values(const NetworkParams& params,
                                               const Observation& obs);

/// Stack observations into the network's per-timestep input layout.
Sequence observations_to_sequence(std::span<const Observation* const> obs);
void observations_to_sequence(std::span<const Observation* const> obs, Sequence& out);

} // namespace epictrl
