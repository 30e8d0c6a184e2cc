#pragma once

#include "epictrl/seird.hpp"

namespace epictrl {

/// Workforce proxy for economic activity on one day.
struct EconomyValue {
    double value = 0.0;      // persons contributing, after the restriction's impact
    double normalized = 0.0; // value / N
};

/// Economic impact factor of each restriction: 0, 0.25, 0.5, 0.65.
double zeta_for(Restriction restriction);

/// (s + e + r) * (1 - zeta). Infected and deceased never contribute.
EconomyValue economy_value(const Compartments& c, double zeta, double N);

EconomyValue economy_value(const Compartments& c, Restriction restriction, double N);

} // namespace epictrl
