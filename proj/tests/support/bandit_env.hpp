#pragma once

#include "epictrl/env.hpp"

namespace epictrl::testing {

// Degenerate environment: the observation never changes, action 2 pays 1 and
// everything else pays 0. Each episode is a single step, so the optimal
// action is known and there is nothing to bootstrap.
class BanditEnv final : public Environment {
public:
    static constexpr Restriction kBest = Restriction::Lockdown;

    static FeatureVector base_row() { return {0.6, 0.05, 0.1, 0.2, 0.05, 0.5, 1.0 / 3.0}; }

    Observation reset() override { return Observation::filled(base_row()); }

    StepResult step(Restriction action) override
    {
        StepResult r;
        r.observation = Observation::filled(base_row());
        r.reward = action == kBest ? 1.0 : 0.0;
        r.done = true;
        r.info.day = 1;
        return r;
    }

    Compartments current_state() const override { return {600, 50, 100, 200, 50}; }
};

} // namespace epictrl::testing
