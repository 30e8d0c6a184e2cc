#include "epictrl/ddqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "epictrl/errors.hpp"
#include "epictrl/loss.hpp"

namespace epictrl {

namespace {

// Independent generator seeds derived from one run seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

template <typename GreedyFn>
Restriction epsilon_greedy(double epsilon, Rng& rng, GreedyFn greedy)
{
    if (rng.uniform() < epsilon)
        return static_cast<Restriction>(rng.below(kRestrictionCount));
    return greedy();
}

} // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::uint64_t seed)
    : capacity_(capacity), rng_(seed)
{
    if (capacity == 0)
        throw ConfigInvalid("replay capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t)
{
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
        return;
    }
    storage_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n)
{
    if (storage_.empty())
        throw BufferTooSmall("cannot sample from an empty replay buffer");
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(&storage_[rng_.below(storage_.size())]);
    return out;
}

const Transition& ReplayBuffer::operator[](std::size_t i) const
{
    return storage_[(next_ + i) % storage_.size()];
}

void TrainConfig::validate() const
{
    if (episodes < 1)
        throw ConfigInvalid("training.episodes must be >= 1");
    if (replay_capacity < 1)
        throw ConfigInvalid("training.replay_capacity must be >= 1");
    if (batch_size < 1 || batch_size > replay_capacity)
        throw ConfigInvalid("training.batch_size must be in [1, replay_capacity]");
    if (!(discount >= 0.0 && discount < 1.0))
        throw ConfigInvalid("training.discount must be in [0, 1)");
    if (target_sync_interval < 1)
        throw ConfigInvalid("training.target_sync_interval must be >= 1");
    if (!(epsilon_floor >= 0.0 && epsilon_floor <= 1.0))
        throw ConfigInvalid("training.epsilon_floor must be in [0, 1]");
    if (!(epsilon_decay > 0.0))
        throw ConfigInvalid("training.epsilon_decay must be positive");
    if (!(learning_rate > 0.0 && std::isfinite(learning_rate)))
        throw ConfigInvalid("training.learning_rate must be positive");
    try {
        network.validate();
    } catch (const SizeMismatch& e) {
        throw ConfigInvalid(std::string("training.network: ") + e.what());
    }
    if (network.outputs != kRestrictionCount || network.input_width != kFeatureCount ||
        network.seq_len != kWindowDays)
        throw ConfigInvalid("training.network must map a 30 x 7 window to 4 outputs");
}

double epsilon_schedule(int episode, const TrainConfig& cfg)
{
    return std::max(1.0 - static_cast<double>(episode) / cfg.epsilon_decay, cfg.epsilon_floor);
}

Restriction greedy_action(std::span<const double> qvals)
{
    std::size_t best = 0;
    for (std::size_t a = 1; a < qvals.size(); ++a)
        if (qvals[a] > qvals[best])
            best = a;
    return static_cast<Restriction>(best);
}

Restriction select_action(std::span<const double> qvals, double epsilon, Rng& rng)
{
    return epsilon_greedy(epsilon, rng, [&] { return greedy_action(qvals); });
}

Sequence observations_to_sequence(std::span<const Observation* const> obs)
{
    Sequence seq;
    observations_to_sequence(obs, seq);
    return seq;
}

void observations_to_sequence(std::span<const Observation* const> obs, Sequence& seq)
{
    const std::size_t B = obs.size();
    seq.steps = kWindowDays;
    seq.batch = B;
    seq.data.resize(static_cast<Eigen::Index>(kFeatureCount),
                    static_cast<Eigen::Index>(kWindowDays * B));
    for (std::size_t b = 0; b < B; ++b) {
        const auto& o = *obs[b];
        for (std::size_t t = 0; t < kWindowDays; ++t)
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                seq.data(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(t * B + b)) =
                    o.at(t, f);
    }
}

std::array<double, kRestrictionCount> q_values(const NetworkParams& params, const Observation& obs)
{
    const Observation* one[] = {&obs};
    const Eigen::MatrixXd q = forward(params, observations_to_sequence(one));
    if (q.rows() != static_cast<Eigen::Index>(kRestrictionCount))
        throw ShapeMismatch("Q-network must have 4 outputs");
    std::array<double, kRestrictionCount> out{};
    for (std::size_t a = 0; a < kRestrictionCount; ++a)
        out[a] = q(static_cast<Eigen::Index>(a), 0);
    return out;
}

std::vector<double> td_targets(std::span<const Transition* const> batch,
                               const NetworkParams& online, const NetworkParams& target,
                               double discount, TrainWorkspace* ws)
{
    TrainWorkspace local;
    if (!ws)
        ws = &local;
    if (batch.empty())
        throw ShapeMismatch("td_targets needs a non-empty batch");
    if (!(online.sizes == target.sizes))
        throw ShapeMismatch("online and target networks differ in shape");

    std::vector<const Observation*> next;
    next.reserve(batch.size());
    for (const auto* t : batch)
        next.push_back(&t->next_obs);
    observations_to_sequence(next, ws->next_obs);
    const Eigen::MatrixXd q_online = forward(online, ws->next_obs, &ws->online_next);
    const Eigen::MatrixXd q_target = forward(target, ws->next_obs, &ws->target_next);

    std::vector<double> y(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        if (batch[k]->done) {
            y[k] = batch[k]->reward;
            continue;
        }
        Eigen::Index chosen = 0;
        q_online.col(col).maxCoeff(&chosen); // first maximum, i.e. lowest code on ties
        y[k] = batch[k]->reward + discount * q_target(chosen, col);
    }
    return y;
}

double train_on_batch(std::span<const Transition* const> batch, NetworkParams& online,
                      const NetworkParams& target, AdamState& opt, double discount,
                      TrainWorkspace* ws)
{
    TrainWorkspace local;
    if (!ws)
        ws = &local;
    const std::vector<double> y = td_targets(batch, online, target, discount, ws);

    std::vector<const Observation*> obs;
    obs.reserve(batch.size());
    for (const auto* t : batch)
        obs.push_back(&t->obs);

    observations_to_sequence(obs, ws->obs);
    const Eigen::MatrixXd q = forward(online, ws->obs, &ws->online_obs);

    std::vector<double> taken(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k)
        taken[k] = q(code(batch[k]->action), static_cast<Eigen::Index>(k));
    const MseResult mse = mse_loss(taken, y);

    Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    for (std::size_t k = 0; k < batch.size(); ++k)
        upstream(code(batch[k]->action), static_cast<Eigen::Index>(k)) = mse.gradient[k];

    backward(online, ws->online_obs, upstream, ws->grads);
    adam_update(online, ws->grads, opt);
    return mse.loss;
}

double train_step(ReplayBuffer& buffer, NetworkParams& online, const NetworkParams& target,
                  AdamState& opt, const TrainConfig& cfg, TrainWorkspace* ws)
{
    const std::size_t needed = std::max(cfg.batch_size, cfg.warmup_steps);
    if (buffer.size() < needed)
        throw BufferTooSmall("replay buffer holds " + std::to_string(buffer.size()) +
                             " transitions, " + std::to_string(needed) + " needed");
    const auto batch = buffer.sample(cfg.batch_size);
    return train_on_batch(batch, online, target, opt, cfg.discount, ws);
}

TrainResult train(Environment& env, const TrainConfig& cfg, const TrainHooks& hooks)
{
    cfg.validate();

    TrainResult result;
    NetworkParams online = init_network(derive_seed(cfg.seed, 0), cfg.network);
    NetworkParams target = online;
    AdamState opt = AdamState::for_params(online, AdamConfig{cfg.learning_rate});
    ReplayBuffer buffer(cfg.replay_capacity, derive_seed(cfg.seed, 1));
    Rng action_rng(derive_seed(cfg.seed, 2));
    TrainWorkspace ws;

    const std::size_t warm = std::max(cfg.batch_size, cfg.warmup_steps);
    std::uint64_t steps = 0;

    for (int episode = 0; episode < cfg.episodes; ++episode) {
        EpisodeLog log;
        log.episode = episode;
        log.epsilon = hooks.fixed_epsilon.value_or(epsilon_schedule(episode, cfg));
        log.peak_reward = -std::numeric_limits<double>::infinity();

        Observation obs = env.reset();
        for (;;) {
            const Restriction action = epsilon_greedy(log.epsilon, action_rng, [&] {
                return greedy_action(q_values(online, obs));
            });
            StepResult sr = env.step(action);
            buffer.push({obs, action, sr.reward, sr.observation, sr.done});
            ++steps;

            log.rewards.push_back(sr.reward);
            log.peak_reward = std::max(log.peak_reward, sr.reward);
            ++log.action_histogram[static_cast<std::size_t>(code(action))];

            if (buffer.size() >= warm)
                result.losses.push_back(train_step(buffer, online, target, opt, cfg, &ws));
            if (steps % static_cast<std::uint64_t>(cfg.target_sync_interval) == 0)
                target = online;

            obs = std::move(sr.observation);
            if (sr.done)
                break;
        }

        log.length_days = static_cast<int>(log.rewards.size());
        double sum = 0.0;
        for (double r : log.rewards)
            sum += r;
        log.mean_reward = sum / static_cast<double>(log.rewards.size());
        log.final_state = env.current_state();
        if (hooks.on_episode)
            hooks.on_episode(log);
        result.episodes.push_back(std::move(log));
    }

    result.weights = std::move(online);
    result.replay_size = buffer.size();
    return result;
}

TrainResult train(const EnvConfig& env_config, const TrainConfig& cfg, const TrainHooks& hooks)
{
    EpidemicEnv env(env_config);
    return train(env, cfg, hooks);
}

Trajectory greedy_rollout(const NetworkParams& weights, const EnvConfig& env_config)
{
    EpidemicEnv env(env_config);
    while (!env.done())
        env.step(greedy_action(q_values(weights, env.observation())));
    return env.trajectory();
}

} // namespace epictrl
