#include "epictrl/seird.hpp"

#include <cmath>
#include <string>

#include "epictrl/economy.hpp"
#include "epictrl/errors.hpp"

namespace epictrl {

namespace {

constexpr double kClampTolerance = 1e-9;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

Compartments axpy(const Compartments& x, double h, const Rates& k)
{
    return {x.s + h * k.ds, x.e + h * k.de, x.i + h * k.di, x.r + h * k.dr, x.d + h * k.dd};
}

} // namespace

void DiseaseParams::validate() const
{
    if (!positive_finite(N) || N < 1.0)
        throw ConfigInvalid("disease.N must be >= 1, got " + std::to_string(N));
    if (!positive_finite(beta))
        throw ConfigInvalid("disease.beta must be positive");
    if (!positive_finite(sigma))
        throw ConfigInvalid("disease.sigma must be positive");
    if (!positive_finite(gamma))
        throw ConfigInvalid("disease.gamma must be positive");
    if (!positive_finite(mu))
        throw ConfigInvalid("disease.mu must be positive");
}

Restriction restriction_from_code(int c)
{
    if (c < 0 || c >= static_cast<int>(kRestrictionCount))
        throw ConfigInvalid("restriction code must be 0..3, got " + std::to_string(c));
    return static_cast<Restriction>(c);
}

std::string_view name(Restriction r)
{
    switch (r) {
    case Restriction::NoRestriction: return "no_restriction";
    case Restriction::SocialDistancing: return "social_distancing";
    case Restriction::Lockdown: return "lockdown";
    case Restriction::LockdownCurfew: return "lockdown_curfew";
    }
    return "unknown";
}

EffectsTable EffectsTable::defaults()
{
    EffectsTable t;
    const double multipliers[] = {1.00, 0.55, 0.30, 0.18};
    for (Restriction r : kAllRestrictions)
        t[r] = {multipliers[code(r)], zeta_for(r)};
    return t;
}

void EffectsTable::validate() const
{
    for (Restriction r : kAllRestrictions) {
        const auto& e = (*this)[r];
        const std::string label(name(r));
        if (!(std::isfinite(e.beta_multiplier) && e.beta_multiplier > 0.0 &&
              e.beta_multiplier <= 1.0))
            throw ConfigInvalid("restrictions." + label + ".beta_multiplier must be in (0, 1]");
        if (!(std::isfinite(e.zeta) && e.zeta >= 0.0 && e.zeta < 1.0))
            throw ConfigInvalid("restrictions." + label + ".zeta must be in [0, 1)");
    }
    if ((*this)[Restriction::NoRestriction].zeta != 0.0)
        throw ConfigInvalid("restrictions.no_restriction.zeta must be 0");
    for (std::size_t k = 1; k < kRestrictionCount; ++k) {
        const auto& looser = entries[k - 1];
        const auto& stricter = entries[k];
        if (!(stricter.beta_multiplier < looser.beta_multiplier))
            throw ConfigInvalid("restrictions: beta_multiplier must strictly decrease with "
                                "strictness at " + std::string(name(kAllRestrictions[k])));
        if (!(stricter.zeta > looser.zeta))
            throw ConfigInvalid("restrictions: zeta must strictly increase with strictness at " +
                                std::string(name(kAllRestrictions[k])));
    }
}

Rates derivatives(const Compartments& c, const DiseaseParams& p)
{
    const double infection = p.beta * c.i * c.s / p.N;
    const double onset = p.sigma * c.e;
    const double recovery = p.gamma * c.i;
    const double death = p.mu * c.i;
    return {-infection, infection - onset, onset - (recovery + death), recovery, death};
}

DiseaseParams effective_params(const DiseaseParams& p, const RestrictionEffects& eff)
{
    DiseaseParams out = p;
    out.beta = p.beta * eff.beta_multiplier;
    return out;
}

Compartments integrate_day(const Compartments& c, const DiseaseParams& p,
                           const RestrictionEffects& eff)
{
    const DiseaseParams q = effective_params(p, eff);
    constexpr double h = 1.0 / kSubstepsPerDay;

    Compartments x = c;
    for (int step = 0; step < kSubstepsPerDay; ++step) {
        const Rates k1 = derivatives(x, q);
        const Rates k2 = derivatives(axpy(x, h / 2, k1), q);
        const Rates k3 = derivatives(axpy(x, h / 2, k2), q);
        const Rates k4 = derivatives(axpy(x, h, k3), q);
        x.s += h / 6 * (k1.ds + 2 * k2.ds + 2 * k3.ds + k4.ds);
        x.e += h / 6 * (k1.de + 2 * k2.de + 2 * k3.de + k4.de);
        x.i += h / 6 * (k1.di + 2 * k2.di + 2 * k3.di + k4.di);
        x.r += h / 6 * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr);
        x.d += h / 6 * (k1.dd + 2 * k2.dd + 2 * k3.dd + k4.dd);
    }

    double* fields[] = {&x.s, &x.e, &x.i, &x.r, &x.d};
    double residual = 0.0;
    for (double* v : fields) {
        if (!std::isfinite(*v) || *v < -kClampTolerance)
            throw IntegrationDiverged("integration diverged: compartment value " +
                                      std::to_string(*v));
        if (*v < 0.0) {
            residual += *v;
            *v = 0.0;
        }
    }
    x.s += residual;
    if (x.s < 0.0)
        x.s = 0.0;
    return x;
}

Compartments initial_state(const DiseaseParams& p, double infected_fraction)
{
    const double infected = p.N * infected_fraction;
    return {p.N - infected, 0.0, infected, 0.0, 0.0};
}

Trajectory simulate_policy(const Compartments& init, const DiseaseParams& p,
                           const EffectsTable& effects, const DayPolicy& policy,
                           const SimulationSettings& settings)
{
    if (settings.max_days < 1)
        throw ConfigInvalid("max_days must be >= 1");

    Trajectory traj;
    traj.days.push_back({0, init, Restriction::NoRestriction,
                         economy_value(init, effects[Restriction::NoRestriction].zeta, p.N).value,
                         std::nullopt});

    Compartments state = init;
    for (int day = 0; day < settings.max_days; ++day) {
        if (state.i < settings.termination_threshold)
            break;
        const Restriction applied = policy(day, state);
        state = integrate_day(state, p, effects[applied]);
        traj.days.push_back({day + 1, state, applied,
                             economy_value(state, effects[applied].zeta, p.N).value,
                             std::nullopt});
    }
    return traj;
}

} // namespace epictrl
