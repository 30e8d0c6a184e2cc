#include "epictrl/reward.hpp"

#include <cmath>
#include <string>

#include "epictrl/errors.hpp"

namespace epictrl {

RewardWeights RewardWeights::preset(std::string_view name)
{
    if (name == "default")
        return default_preset();
    if (name == "balanced")
        return balanced();
    if (name == "economy_biased")
        return economy_biased();
    throw ConfigInvalid("unknown reward preset '" + std::string(name) +
                        "' (expected default, balanced or economy_biased)");
}

void RewardWeights::validate() const
{
    if (!(std::isfinite(r) && r > 0.0))
        throw ConfigInvalid("reward.r must be positive");
    if (!(std::isfinite(s) && s >= 0.0))
        throw ConfigInvalid("reward.s must be non-negative");
}

NormalizedState normalize(const Compartments& c, double economy, double N)
{
    return {economy / N, c.i / N, c.d / N};
}

double reward(const NormalizedState& ns, const RewardWeights& w)
{
    return ns.e_norm * std::exp(-w.r * ns.a) - w.s * ns.d_frac;
}

} // namespace epictrl
