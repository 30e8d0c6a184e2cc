#include "epictrl/loss.hpp"

#include <string>

#include "epictrl/errors.hpp"

namespace epictrl {

MseResult mse_loss(std::span<const double> pred, std::span<const double> target)
{
    if (pred.empty() || pred.size() != target.size())
        throw ShapeMismatch("mse_loss needs equal non-empty lengths, got " +
                            std::to_string(pred.size()) + " and " +
                            std::to_string(target.size()));
    const double n = static_cast<double>(pred.size());
    MseResult out;
    out.gradient.resize(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double diff = pred[k] - target[k];
        out.loss += diff * diff;
        out.gradient[k] = 2.0 * diff / n;
    }
    out.loss /= n;
    return out;
}

} // namespace epictrl
