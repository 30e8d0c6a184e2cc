#include "epictrl/adam.hpp"

#include <cmath>

#include "epictrl/errors.hpp"

namespace epictrl {

AdamState AdamState::for_params(const NetworkParams& params, AdamConfig config)
{
    return {config, NetworkParams::zeros(params.sizes), NetworkParams::zeros(params.sizes), 0};
}

void adam_update(NetworkParams& params, const NetworkParams& grads, AdamState& state)
{
    if (!(grads.sizes == params.sizes) || !(state.m.sizes == params.sizes) ||
        !(state.v.sizes == params.sizes))
        throw ShapeMismatch("optimizer state and gradients must mirror the parameters");

    auto p = params.views();
    const auto g = grads.views();
    auto m = state.m.views();
    auto v = state.v.views();

    ++state.step;
    const auto& c = state.config;
    const double t = static_cast<double>(state.step);
    const double m_correction = 1.0 - std::pow(c.beta1, t);
    const double v_correction = 1.0 - std::pow(c.beta2, t);

    for (std::size_t k = 0; k < p.size(); ++k) {
        if (g[k].values.size() != p[k].values.size())
            throw ShapeMismatch("gradient " + g[k].name + " has the wrong size");
        for (std::size_t j = 0; j < p[k].values.size(); ++j) {
            const double gj = g[k].values[j];
            double& mj = m[k].values[j];
            double& vj = v[k].values[j];
            mj = c.beta1 * mj + (1.0 - c.beta1) * gj;
            vj = c.beta2 * vj + (1.0 - c.beta2) * gj * gj;
            const double m_hat = mj / m_correction;
            const double v_hat = vj / v_correction;
            p[k].values[j] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

} // namespace epictrl
