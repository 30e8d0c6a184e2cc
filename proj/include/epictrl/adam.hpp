#pragma once

#include <cstdint>

#include "epictrl/network.hpp"

namespace epictrl {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Moment accumulators shaped like the parameters they track.
struct AdamState {
    AdamConfig config;
    NetworkParams m;
    NetworkParams v;
    std::uint64_t step = 0;

    static AdamState for_params(const NetworkParams& params, AdamConfig config = {});
};

/// One bias-corrected adaptive-moment step, in place. Throws ShapeMismatch when
/// grads or state do not mirror params.
void adam_update(NetworkParams& params, const NetworkParams& grads, AdamState& state);

} // namespace epictrl
