#pragma once

#include <span>
#include <vector>

namespace epictrl {

struct MseResult {
    double loss = 0.0;
    std::vector<double> gradient; // d loss / d pred
};

/// Mean squared error and its gradient 2 (pred - target) / n.
MseResult mse_loss(std::span<const double> pred, std::span<const double> target);

} // namespace epictrl
