#include "epictrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "epictrl/economy.hpp"
#include "epictrl/errors.hpp"

namespace epictrl {

FeatureVector make_features(const Compartments& c, double economy_norm, Restriction applied,
                            double N)
{
    return {c.s / N,      c.e / N,      c.i / N,
            c.r / N,      c.d / N,      economy_norm,
            code(applied) / static_cast<double>(kRestrictionCount - 1)};
}

Observation Observation::filled(const FeatureVector& row)
{
    Observation o;
    for (std::size_t t = 0; t < kWindowDays; ++t)
        std::copy(row.begin(), row.end(), o.values_.begin() + t * kFeatureCount);
    return o;
}

void Observation::push(const FeatureVector& newest)
{
    std::copy(values_.begin() + kFeatureCount, values_.end(), values_.begin());
    std::copy(newest.begin(), newest.end(), values_.end() - kFeatureCount);
}

void EnvConfig::validate() const
{
    disease.validate();
    effects.validate();
    weights.validate();
    if (!(std::isfinite(initial_infected_fraction) && initial_infected_fraction >= 0.0 &&
          initial_infected_fraction <= 1.0))
        throw ConfigInvalid("environment.initial_infected_fraction must be in [0, 1]");
    if (sim.max_days < 1)
        throw ConfigInvalid("environment.max_days must be >= 1");
    if (!(std::isfinite(sim.termination_threshold) && sim.termination_threshold >= 0.0))
        throw ConfigInvalid("environment.termination_threshold must be >= 0");
}

EpidemicEnv::EpidemicEnv(EnvConfig config) : config_(std::move(config))
{
    config_.validate();
    reset();
}

Observation EpidemicEnv::reset()
{
    const double N = config_.disease.N;
    state_ = initial_state(config_.disease, config_.initial_infected_fraction);
    day_ = 0;
    done_ = false;

    const auto econ = economy_value(state_, config_.effects[Restriction::NoRestriction].zeta, N);
    window_ = Observation::filled(
        make_features(state_, econ.normalized, Restriction::NoRestriction, N));
    trajectory_.days.clear();
    trajectory_.days.push_back({0, state_, Restriction::NoRestriction, econ.value, std::nullopt});
    return window_;
}

StepResult EpidemicEnv::step(Restriction action)
{
    if (done_)
        throw EpisodeFinished("step called on a finished episode (day " + std::to_string(day_) +
                              ")");
    const double N = config_.disease.N;
    const auto& eff = config_.effects[action];

    state_ = integrate_day(state_, config_.disease, eff);
    ++day_;

    const auto econ = economy_value(state_, eff.zeta, N);
    window_.push(make_features(state_, econ.normalized, action, N));
    const double r = reward(normalize(state_, econ.value, N), config_.weights);

    done_ = state_.i < config_.sim.termination_threshold || day_ >= config_.sim.max_days;
    trajectory_.days.push_back({day_, state_, action, econ.value, r});

    return {window_, r, done_, {state_, econ.value, day_}};
}

} // namespace epictrl
