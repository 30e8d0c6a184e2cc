#pragma once

#include <string_view>

#include "epictrl/seird.hpp"

namespace epictrl {

struct RewardWeights {
    double r = 10.0; // infection vs economy
    double s = 7.0;  // deaths

    static RewardWeights default_preset() { return {10.0, 7.0}; }
    static RewardWeights balanced() { return {12.0, 5.0}; }
    static RewardWeights economy_biased() { return {10.0, 9.0}; }

    /// "default", "balanced" or "economy_biased"; throws ConfigInvalid otherwise.
    static RewardWeights preset(std::string_view name);

    /// r > 0, s >= 0, both finite.
    void validate() const;
};

struct NormalizedState {
    double e_norm = 0.0; // economy / N
    double a = 0.0;      // currently infected / N
    double d_frac = 0.0; // deceased / N
};

NormalizedState normalize(const Compartments& c, double economy, double N);

/// e_norm * exp(-r * a) - s * d_frac
double reward(const NormalizedState& ns, const RewardWeights& w);

} // namespace epictrl
