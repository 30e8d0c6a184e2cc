#include "epictrl/economy.hpp"

namespace epictrl {

double zeta_for(Restriction restriction)
{
    switch (restriction) {
    case Restriction::NoRestriction: return 0.0;
    case Restriction::SocialDistancing: return 0.25;
    case Restriction::Lockdown: return 0.5;
    case Restriction::LockdownCurfew: return 0.65;
    }
    return 0.0;
}

EconomyValue economy_value(const Compartments& c, double zeta, double N)
{
    const double value = (c.s + c.e + c.r) * (1.0 - zeta);
    return {value, value / N};
}

EconomyValue economy_value(const Compartments& c, Restriction restriction, double N)
{
    return economy_value(c, zeta_for(restriction), N);
}

} // namespace epictrl
